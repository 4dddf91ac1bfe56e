from fractions import Fraction

import numpy as np
import pytest

from akweyl import catalog


@pytest.mark.parametrize("eid", catalog.ENTRY_IDS)
def test_every_entry_loads_and_samples_inside_its_box(eid):
    e = catalog.load(eid)
    pts = e.sample_points(50, seed=0)
    assert pts.shape == (50, 4)
    assert np.all(pts >= np.asarray(e.sample_lower)) and np.all(pts <= np.asarray(e.sample_upper))
    assert np.array_equal(pts, e.sample_points(50, seed=0))


def test_unknown_entry():
    with pytest.raises(catalog.UnknownEntryError):
        catalog.load("k3_surface")


@pytest.mark.parametrize("eid,params", [("s4_round", {"r": 0.0}), ("s2xs2", {"a": -1.0}),
                                        ("t4_flat", {"r": 1.0}), ("kodaira_thurston", {"chart": 2})])
def test_invalid_parameters(eid, params):
    with pytest.raises(catalog.InvalidParameterError):
        catalog.load(eid, **params)


def test_volumes_are_exact():
    assert catalog.load("cp2_fs").volume.coeff == Fraction(1, 2)
    v = catalog.load("s2xs2", a=1.0, b=2.0).volume
    assert (v.coeff, v.pi_power) == (Fraction(64), 2)
    assert catalog.load("s4_round").volume.value == pytest.approx(8.0 / 3.0 * np.pi**2)


def test_c1_squared_from_topology():
    assert catalog.load("cp2_fs").c1_squared == 9
    assert catalog.load("s2xs2").c1_squared == 8


def test_einstein_flag_follows_radii():
    assert catalog.load("s2xs2", a=1.0, b=1.0).flags["einstein"]
    assert not catalog.load("s2xs2", a=1.0, b=2.0).flags["einstein"]


def test_certified_flags_carry_justification():
    for eid in catalog.ENTRY_IDS:
        e = catalog.load(eid)
        if e.flags.get("delta_wplus_zero"):
            assert e.certification.get("delta_wplus_zero")


def test_flag_consistency_check():
    e = catalog.load("cp2_fs")
    e.flags["delta_wplus_zero"] = False
    with pytest.raises(ValueError):
        catalog.check_flags(e)

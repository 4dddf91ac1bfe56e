import numpy as np
import pytest

from akweyl import almost_kahler as ak
from akweyl import catalog, geometry
from akweyl import sd_algebra as sd
from akweyl.catalog import CompatibleJ

from .oracles import CP2, KT

AK_ENTRIES = [("t4_flat", {}), ("s2xs2", {"a": 1.0, "b": 2.0}), ("cp2_fs", {}), ("ch2_chart", {}),
              ("kodaira_thurston", {}), ("kodaira_thurston", {"chart": 1})]


def _data(eid, params, n=20, seed=0):
    e = catalog.load(eid, **params)
    pts = e.sample_points(n, seed=seed)
    return e, pts, ak.structure(e.description, e.J, pts)


@pytest.mark.parametrize("eid,params", AK_ENTRIES)
def test_omega_is_self_dual_with_norm_two(eid, params):
    _, _, data = _data(eid, params)
    assert np.allclose(sd.norm2(data.omega), 2.0)
    assert np.allclose(sd.project_minus(data.omega), 0.0, atol=1e-12)
    assert np.allclose(data.J @ data.J, -np.eye(4), atol=1e-12)


@pytest.mark.parametrize("eid,params", AK_ENTRIES)
def test_star_scalar_two_routes(eid, params):
    e, pts, data = _data(eid, params)
    st = ak.s_star(e.description, e.J, pts, data=data)
    assert np.max(st.mismatch) <= 1e-8 * max(1.0, np.max(np.abs(st.s_star)))
    assert np.all(st.s_star >= st.s - 1e-10)


@pytest.mark.parametrize("eid,params", AK_ENTRIES)
def test_wplus_quadratic_identity(eid, params):
    e, pts, data = _data(eid, params)
    assert np.max(ak.w_quadratic_identity_residual(e.description, e.J, pts, data=data)) <= 1e-9


@pytest.mark.parametrize("eid,params", [p for p in AK_ENTRIES if p[0] != "kodaira_thurston"])
def test_kahler_entries_have_parallel_omega(eid, params):
    e, pts, data = _data(eid, params)
    assert np.max(np.abs(data.nabla_omega)) <= 1e-10
    q, perp2, w2, _ = ak.wplus_omega_terms(data)
    s = data.geometry.s
    assert np.allclose(q, s / 3.0, atol=1e-10)
    assert np.allclose(perp2, 0.0, atol=1e-18)
    assert np.allclose(w2, s * s / 24.0, atol=1e-9)


def test_kodaira_thurston_values():
    for chart in (0, 1):
        e, pts, data = _data("kodaira_thurston", {"chart": chart}, n=5)
        st = ak.s_star(e.description, e.J, pts, data=data)
        assert np.allclose(st.s, KT["s"])
        assert np.allclose(st.nabla_omega_norm2, KT["nabla_omega2"])
        assert np.allclose(st.s_star, KT["s_star"])


def test_cp2_weyl_spectrum_and_blair_form():
    e, pts, data = _data("cp2_fs", {}, n=10)
    b = geometry.decompose(data.geometry)
    eig = np.sort(np.linalg.eigvalsh(b.wplus), axis=1)[:, ::-1]
    assert np.allclose(eig, CP2["wplus_eigenvalues"], atol=1e-10)
    bl = ak.blair_curvature(e.description, e.J, pts, data=data)
    v = sd.project_plus(data.omega)
    assert np.allclose(bl.F_plus, CP2["s"] / 4.0 * v, atol=1e-10)
    assert np.allclose(bl.F_minus, 0.0, atol=1e-10)


@pytest.mark.parametrize("eid,params", AK_ENTRIES)
def test_blair_self_dual_part(eid, params):
    e, pts, data = _data(eid, params)
    bl = ak.blair_curvature(e.description, e.J, pts, data=data)
    assert np.max(bl.residual) <= 1e-9


def test_blair_anti_self_dual_part_is_primitive_ricci_form():
    e, pts, data = _data("s2xs2", {"a": 1.0, "b": 2.0})
    bl = ak.blair_curvature(e.description, e.J, pts, data=data)
    ric0 = geometry.ric0_norm2(data.geometry)
    assert np.allclose(sd.norm2(bl.F_minus), ric0 / 2.0, atol=1e-12)


def test_incompatible_structures_are_rejected():
    e = catalog.load("cp2_fs")
    pts = e.sample_points(3, seed=0)

    def not_complex(*x):
        return [[1.0 if i == j else 0.0 for j in range(4)] for i in range(4)]

    with pytest.raises(ak.IncompatibleStructureError):
        ak.structure(e.description, CompatibleJ(field=not_complex), pts)
    with pytest.raises(ak.IncompatibleStructureError):
        ak.structure(e.description, CompatibleJ(), pts)
    kt = catalog.load("kodaira_thurston")
    with pytest.raises(ak.IncompatibleStructureError):
        ak.structure(kt.description, CompatibleJ(field=not_complex), pts)


def test_anti_self_dual_structure_is_rejected():
    e = catalog.load("t4_flat")
    J = np.zeros((4, 4))
    # omega = e12 - e34
    J[1, 0], J[0, 1], J[2, 3], J[3, 2] = 1.0, -1.0, 1.0, -1.0

    def field(*x):
        return J.tolist()

    with pytest.raises(ak.IncompatibleStructureError):
        ak.structure(e.description, CompatibleJ(field=field), e.sample_points(2, seed=0))


def test_omega_coordinates_match_frame_omega():
    e, pts, data = _data("cp2_fs", {}, n=4)
    oc = ak.omega_coordinates(e.description, e.J, pts)
    E = data.geometry.frame
    of = np.swapaxes(E, 1, 2) @ oc @ E
    assert np.allclose(sd.from_matrix(of), data.omega, atol=1e-12)

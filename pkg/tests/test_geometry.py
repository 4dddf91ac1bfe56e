import logging

import numpy as np
import pytest

from akweyl import catalog, geometry, jets, kernels
from akweyl.geometry import ChartMetric, FrameMetric

from .conftest import random_rotation
from .oracles import S2XS2_1_2


def _s2_times_plane(th, ph, x, y):
    s = jets.sin(th)
    return [[1.0, 0.0, 0.0, 0.0], [0.0, s * s, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]


S2R2 = ChartMetric(_s2_times_plane, lower=(0.0, -np.inf, -np.inf, -np.inf), upper=(np.pi, np.inf, np.inf, np.inf))


def test_two_sphere_christoffel():
    th = np.array([0.3, 1.1, 2.0])
    pts = np.stack([th, np.zeros(3), np.zeros(3), np.zeros(3)], axis=1)
    gam = geometry.christoffel(S2R2, pts)
    assert np.allclose(gam[:, 0, 1, 1], -np.sin(th) * np.cos(th), atol=1e-14)
    assert np.allclose(gam[:, 1, 0, 1], np.cos(th) / np.sin(th), atol=1e-14)
    assert np.allclose(gam[:, 1, 1, 0], np.cos(th) / np.sin(th), atol=1e-14)
    gam[:, 0, 1, 1] = gam[:, 1, 0, 1] = gam[:, 1, 1, 0] = 0.0
    assert np.allclose(gam, 0.0)


def test_two_sphere_curvature():
    pg = geometry.riemann(S2R2, [[0.7, 0.1, 0.0, 0.0]])
    assert pg.riemann[0, 0, 1, 0, 1] == pytest.approx(1.0)
    assert pg.s[0] == pytest.approx(2.0)


def test_round_s4():
    e = catalog.load("s4_round")
    pg = geometry.riemann(e.description, e.sample_points(20, seed=3))
    assert np.allclose(pg.s, 12.0, atol=1e-10)
    # sectional curvature 1 on every frame plane
    for i in range(4):
        for j in range(i + 1, 4):
            assert np.allclose(pg.riemann[:, i, j, i, j], 1.0, atol=1e-10)
    inv = geometry.invariants(pg)
    assert np.allclose(inv["wplus2"], 0.0, atol=1e-18) and np.allclose(inv["ric0_2"], 0.0, atol=1e-18)


def test_round_s4_scales_with_radius():
    e = catalog.load("s4_round", r=2.0)
    pg = geometry.riemann(e.description, e.sample_points(5, seed=0))
    assert np.allclose(pg.s, 3.0)


def test_product_of_spheres_with_different_radii():
    e = catalog.load("s2xs2", a=1.0, b=2.0)
    pg = geometry.riemann(e.description, e.sample_points(10, seed=1))
    inv = geometry.invariants(pg)
    assert np.allclose(inv["s"], S2XS2_1_2["s"])
    assert np.allclose(inv["ric0_2"], S2XS2_1_2["ric0_2"])


def test_hyperbolic_spaces():
    h4 = catalog.load("h4_hyperbolic")
    pg = geometry.riemann(h4.description, h4.sample_points(10, seed=0))
    assert np.allclose(pg.s, -12.0)
    assert np.allclose(pg.riemann[:, 0, 3, 0, 3], -1.0)
    ch2 = catalog.load("ch2_chart")
    inv = geometry.invariants(geometry.riemann(ch2.description, ch2.sample_points(10, seed=0)))
    assert np.allclose(inv["s"], -24.0)
    assert np.allclose(inv["wminus2"], 0.0, atol=1e-20)


@pytest.mark.parametrize("eid", catalog.ENTRY_IDS)
def test_algebraic_symmetries(eid):
    e = catalog.load(eid)
    pg = geometry.riemann(e.description, e.sample_points(30, seed=7))
    res = geometry.symmetry_residuals(pg)
    assert max(res.values()) <= 1e-10
    if e.description.kind == "chart":
        assert geometry.metric_compatibility(e.description, pg.points) <= 1e-10


def _fd_coordinate_riemann(desc, p, h=1e-4):
    """Coordinate R_ijkl = g(R(d_i, d_j) d_l, d_k) from finite differences of the metric only."""

    def gamma_at(q):
        def g_at(r):
            return desc.evaluate(r[None])[0]

        dg = np.zeros((4, 4, 4))
        for k in range(4):
            e = np.zeros(4)
            e[k] = h
            dg[:, :, k] = (g_at(q + e) - g_at(q - e)) / (2 * h)
        gi = np.linalg.inv(g_at(q))
        # low[m, i, j] = 1/2 (d_i g_mj + d_j g_mi - d_m g_ij)
        low = 0.5 * (np.einsum("mji->mij", dg) + np.einsum("mij->mij", dg) - np.einsum("ijm->mij", dg))
        return np.einsum("km,mij->kij", gi, low)

    G = gamma_at(p)
    dG = np.zeros((4, 4, 4, 4))
    for c in range(4):
        e = np.zeros(4)
        e[c] = h
        dG[..., c] = (gamma_at(p + e) - gamma_at(p - e)) / (2 * h)
    # R(d_c, d_d) d_b = R^a_bcd d_a
    Rup = (np.einsum("adbc->abcd", dG) - np.einsum("acbd->abcd", dG)
           + np.einsum("ace,edb->abcd", G, G) - np.einsum("ade,ecb->abcd", G, G))
    g = desc.evaluate(p[None])[0]
    # R_ijkl = g_ka R^a_lij
    return np.einsum("ka,alij->ijkl", g, Rup)


def test_riemann_against_finite_differences():
    e = catalog.load("cp2_fs")
    p = np.array([0.3, -0.2, 0.5, 0.1])
    g, dg, ddg = geometry.metric_jets(e.description, p[None])
    Rc = kernels.riemann(g, dg, ddg)[2][0]
    ref = _fd_coordinate_riemann(e.description, p)
    assert np.max(np.abs(Rc - ref)) <= 1e-6 * max(1.0, np.max(np.abs(ref)))


def test_metric_validation():
    bad = ChartMetric(lambda a, b, c, d: [[1.0, 0, 0, 0], [0, -1.0, 0, 0], [0, 0, 1.0, 0], [0, 0, 0, 1.0]])
    with pytest.raises(geometry.NotPositiveDefiniteError):
        geometry.riemann(bad, [[0.0, 0.0, 0.0, 0.0]])
    e = catalog.load("ch2_chart")
    with pytest.raises(geometry.OutsideDomainError):
        geometry.riemann(e.description, [[0.9, 0.0, 0.0, 0.0]])
    with pytest.raises(geometry.GeometryError):
        FrameMetric(np.ones((4, 4, 4)))


def test_chart_and_frame_flat_torus_agree():
    chart = catalog.load("t4_flat")
    frame = FrameMetric(np.zeros((4, 4, 4)))
    pts = chart.sample_points(5, seed=0)
    a = geometry.invariants(geometry.riemann(chart.description, pts))
    b = geometry.invariants(geometry.riemann(frame, pts))
    for k in a:
        assert np.allclose(a[k], 0.0) and np.allclose(b[k], 0.0)


def test_kodaira_thurston_chart_and_frame_agree():
    f = catalog.load("kodaira_thurston")
    c = catalog.load("kodaira_thurston", chart=1)
    a = geometry.invariants(geometry.riemann(f.description, f.sample_points(3, seed=0)))
    b = geometry.invariants(geometry.riemann(c.description, c.sample_points(3, seed=0)))
    for k in a:
        assert np.allclose(a[k], b[k], atol=1e-12), k


def test_frame_rotation_preserves_invariants(rng):
    e = catalog.load("s2xs2", a=1.0, b=2.0)
    pg = geometry.riemann(e.description, e.sample_points(8, seed=2))
    ref = geometry.invariants(pg)
    for _ in range(5):
        rot = geometry.invariants(geometry.rotate_frame(pg, random_rotation(rng)))
        for k in ref:
            assert np.allclose(rot[k], ref[k], atol=1e-10)


def test_orientation_reversal_swaps_weyl_halves(caplog):
    e = catalog.load("cp2_fs")
    pg = geometry.riemann(e.description, e.sample_points(4, seed=0))
    ref = geometry.invariants(pg)
    with caplog.at_level(logging.WARNING):
        rev = geometry.invariants(geometry.reverse_orientation(pg))
    assert np.allclose(rev["wplus2"], ref["wminus2"], atol=1e-12)
    assert np.allclose(rev["wminus2"], ref["wplus2"], atol=1e-12)
    assert "swapping" in caplog.text


def test_blocks_reassemble_operator():
    e = catalog.load("s2xs2", a=1.0, b=2.0)
    b = geometry.decompose(geometry.riemann(e.description, e.sample_points(6, seed=0)))
    assert np.allclose(b.reassemble(), b.operator, atol=1e-13)
    assert np.allclose(np.trace(b.wplus, axis1=1, axis2=2), 0.0)
    assert np.allclose(b.wplus, np.swapaxes(b.wplus, 1, 2))


def test_koszul_connection_is_metric_and_torsion_free():
    c = catalog.kodaira_thurston_structure()
    gam = geometry.koszul_connection(c)
    # metric: gamma[k, i, j] antisymmetric in (k, j)
    assert np.allclose(gam, -np.einsum("kij->jik", gam))
    # torsion free: nabla_i e_j - nabla_j e_i = [e_i, e_j]
    assert np.allclose(gam - np.swapaxes(gam, 1, 2), c)

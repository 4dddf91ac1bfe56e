import numpy as np
import pytest

from akweyl import catalog
from akweyl import weitzenboeck as wz
from akweyl.catalog import Axis


def test_grid_layout():
    g = wz.Grid((Axis("periodic", 0.0, 1.0), Axis("interval", 0.0, 1.0)) * 2, 8)
    assert np.allclose(g.h, 1.0 / 8)
    c = g.coordinates(ghost=0)
    assert len(c[0]) == 8 and len(c[1]) == 9
    pts, shape = g.points(ghost=2)
    assert shape == (12, 13, 12, 13) and pts.shape == (12 * 13 * 12 * 13, 4)


def test_grid_too_coarse():
    with pytest.raises(wz.GridTooCoarseError):
        wz.Grid(wz.T4_AXES, 4)


def test_fit_order():
    h = np.array([0.4, 0.2, 0.1])
    assert wz.fit_order(h, 3.0 * h**2) == pytest.approx(2.0)
    assert wz.fit_order(h, [1e-14, 1e-13, 2e-14]) == "exact"


def test_needs_three_levels():
    e = catalog.load("t4_flat")
    with pytest.raises(ValueError):
        wz.convergence(e.description, wz.t4_bump_form, wz.T4_AXES, [8, 12])


def test_rhs_rejects_anti_self_dual_forms():
    e = catalog.load("t4_flat")

    def asd(*x):
        A = [[0.0] * 4 for _ in range(4)]
        A[0][1], A[1][0], A[2][3], A[3][2] = 1.0, -1.0, -1.0, 1.0
        return A

    with pytest.raises(ValueError):
        wz.weitzenboeck_rhs(e.description, asd, e.sample_points(2, seed=0))


def test_flat_rough_laplacian_of_bump_form():
    # on flat space the rough Laplacian is minus the coordinate Laplacian: sin(x0) -> sin(x0), cos(x1+x2) -> 2 cos
    e = catalog.load("t4_flat")
    pts = e.sample_points(5, seed=1)
    rough = wz.rough_laplacian(e.description, wz.t4_bump_form, pts)
    from akweyl import jets

    A = jets.stack_matrix(wz.t4_bump_form(*pts.T), 5)[0]
    expected = A.copy()
    expected[:, 0, 2] *= 2.0
    expected[:, 2, 0] *= 2.0
    expected[:, 1, 3] *= 2.0
    expected[:, 3, 1] *= 2.0
    assert np.allclose(rough, expected, atol=1e-12)


def test_kahler_form_on_s2xs2_is_at_floor():
    e = catalog.load("s2xs2", a=1.0, b=2.0)
    r = wz.weitzenboeck_residual(e.description, wz.s2xs2_kahler_form(1.0, 2.0), wz.Grid(wz.S2XS2_AXES, 8))
    assert r <= wz.FLOOR


@pytest.mark.slow
def test_transverse_form_converges_at_second_order():
    e = catalog.load("s2xs2", a=1.0, b=2.0)
    tab = wz.convergence(e.description, wz.s2xs2_transverse_form(1.0, 2.0), wz.S2XS2_AXES, [8, 12, 16])
    assert 1.8 <= tab.order <= 2.2
    assert tab.residuals[0] > tab.residuals[1] > tab.residuals[2]

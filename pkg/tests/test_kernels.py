import numpy as np
import pytest

from akweyl import _jit, catalog, geometry, kernels

pytestmark = pytest.mark.skipif(not _jit.HAVE_NUMBA, reason="numba not installed")


def _both(fn, *args):
    saved = _jit.USE_NUMBA
    try:
        _jit.USE_NUMBA = False
        a = fn(*args)
        _jit.USE_NUMBA = True
        b = fn(*args)
    finally:
        _jit.USE_NUMBA = saved
    return a, b


@pytest.fixture(scope="module")
def jets_cp2():
    e = catalog.load("cp2_fs")
    return geometry.metric_jets(e.description, e.sample_points(64, seed=1))


def test_riemann_numba_equals_numpy(jets_cp2):
    a, b = _both(kernels.riemann, *jets_cp2)
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-12, atol=1e-12)


def test_gram_schmidt_numba_equals_numpy(jets_cp2):
    g = jets_cp2[0]
    a, b = _both(kernels.gram_schmidt, g)
    assert np.allclose(a, b, atol=1e-13)
    # columns are g-orthonormal
    assert np.allclose(np.swapaxes(a, 1, 2) @ g @ a, np.eye(4), atol=1e-12)


def test_to_frame_numba_equals_numpy(jets_cp2):
    R = kernels.riemann(*jets_cp2)[2]
    E = kernels.gram_schmidt(jets_cp2[0])
    a, b = _both(kernels.to_frame4, R, E)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-11)


def test_env_flag_disables_numba(monkeypatch):
    import importlib

    monkeypatch.setenv("AKWEYL_DISABLE_NUMBA", "1")
    mod = importlib.reload(_jit)
    try:
        assert mod.USE_NUMBA is False
    finally:
        monkeypatch.delenv("AKWEYL_DISABLE_NUMBA")
        importlib.reload(_jit)
    assert _jit.USE_NUMBA is True

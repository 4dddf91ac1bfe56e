"""Hot per-point kernels: Levi-Civita data, Riemann tensor, orthonormal frames.

Every kernel exists twice: a numba ``@njit`` loop and a vectorized numpy
version.  :data:`akweyl._jit.USE_NUMBA` (``AKWEYL_DISABLE_NUMBA=1`` turns it
off) picks the implementation; both are tested against each other.
"""
import numpy as np

from . import _jit
from ._jit import njit

# ---------------------------------------------------------------------------
# numpy implementations


def _christoffel_np(g, dg):
    ginv = np.linalg.inv(g)
    # lowered[l, i, j] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij); dg[..., a, b, k] = d_k g_ab
    low = 0.5 * (
        np.einsum("njli->nlij", dg) + np.einsum("nilj->nlij", dg) - np.einsum("nijl->nlij", dg)
    )
    gamma = np.einsum("nkl,nlij->nkij", ginv, low)
    return ginv, gamma


def _riemann_np(g, dg, ddg):
    ginv, gamma = _christoffel_np(g, dg)
    # ddg[..., a, b, k, l] = d_k d_l g_ab
    second = 0.5 * (
        np.einsum("niljk->nijkl", ddg)
        + np.einsum("njkil->nijkl", ddg)
        - np.einsum("njlik->nijkl", ddg)
        - np.einsum("nikjl->nijkl", ddg)
    )
    quad = np.einsum("nmp,nmjk,npil->nijkl", g, gamma, gamma) - np.einsum(
        "nmp,nmik,npjl->nijkl", g, gamma, gamma
    )
    return ginv, gamma, second + quad


def _gram_schmidt_np(g):
    N = g.shape[0]
    E = np.zeros((N, 4, 4))
    for a in range(4):
        v = np.zeros((N, 4))
        v[:, a] = 1.0
        for b in range(a):
            proj = np.einsum("ni,nij,nj->n", E[:, :, b], g, v)
            v = v - proj[:, None] * E[:, :, b]
        nrm = np.sqrt(np.einsum("ni,nij,nj->n", v, g, v))
        E[:, :, a] = v / nrm[:, None]
    return E


def _to_frame4_np(R, E):
    return np.einsum("nijkl,nia,njb,nkc,nld->nabcd", R, E, E, E, E, optimize=True)


# ---------------------------------------------------------------------------
# numba implementations


@njit(cache=True)
def _riemann_jit(g, dg, ddg):
    N = g.shape[0]
    ginv = np.empty((N, 4, 4))
    gamma = np.zeros((N, 4, 4, 4))
    R = np.zeros((N, 4, 4, 4, 4))
    low = np.empty((4, 4, 4))
    for n in range(N):
        ginv[n] = np.linalg.inv(g[n])
        for l in range(4):
            for i in range(4):
                for j in range(4):
                    low[l, i, j] = 0.5 * (dg[n, j, l, i] + dg[n, i, l, j] - dg[n, i, j, l])
        for k in range(4):
            for i in range(4):
                for j in range(4):
                    acc = 0.0
                    for l in range(4):
                        acc += ginv[n, k, l] * low[l, i, j]
                    gamma[n, k, i, j] = acc
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    for l in range(4):
                        val = 0.5 * (
                            ddg[n, i, l, j, k] + ddg[n, j, k, i, l] - ddg[n, j, l, i, k] - ddg[n, i, k, j, l]
                        )
                        # g_mp G^m_jk G^p_il = low[p, j, k] G^p_il
                        for p in range(4):
                            val += low[p, j, k] * gamma[n, p, i, l] - low[p, i, k] * gamma[n, p, j, l]
                        R[n, i, j, k, l] = val
    return ginv, gamma, R


@njit(cache=True)
def _gram_schmidt_jit(g):
    N = g.shape[0]
    E = np.zeros((N, 4, 4))
    v = np.empty(4)
    for n in range(N):
        for a in range(4):
            for i in range(4):
                v[i] = 0.0
            v[a] = 1.0
            for b in range(a):
                proj = 0.0
                for i in range(4):
                    for j in range(4):
                        proj += E[n, i, b] * g[n, i, j] * v[j]
                for i in range(4):
                    v[i] -= proj * E[n, i, b]
            nrm = 0.0
            for i in range(4):
                for j in range(4):
                    nrm += v[i] * g[n, i, j] * v[j]
            nrm = np.sqrt(nrm)
            for i in range(4):
                E[n, i, a] = v[i] / nrm
    return E


@njit(cache=True)
def _to_frame4_jit(R, E):
    N = R.shape[0]
    out = np.empty((N, 4, 4, 4, 4))
    t1 = np.empty((4, 4, 4, 4))
    t2 = np.empty((4, 4, 4, 4))
    for n in range(N):
        # contract one index at a time, cycling the result into the last slot
        src = R[n]
        for step in range(4):
            dst = t1 if step % 2 == 0 else t2
            for a in range(4):
                for j in range(4):
                    for k in range(4):
                        for l in range(4):
                            acc = 0.0
                            for i in range(4):
                                acc += src[i, j, k, l] * E[n, i, a]
                            dst[j, k, l, a] = acc
            src = dst
        out[n] = src
    return out


# ---------------------------------------------------------------------------
# dispatch


def christoffel(g, dg):
    """``(ginv, gamma)`` with ``gamma[n, k, i, j]`` = Gamma^k_ij."""
    return _christoffel_np(np.asarray(g, float), np.asarray(dg, float))


def riemann(g, dg, ddg):
    """``(ginv, gamma, R)``; ``R[n, i, j, k, l]`` has R_ijij equal to sectional curvature times area^2."""
    g = np.ascontiguousarray(g, dtype=float)
    dg = np.ascontiguousarray(dg, dtype=float)
    ddg = np.ascontiguousarray(ddg, dtype=float)
    if _jit.USE_NUMBA:
        return _riemann_jit(g, dg, ddg)
    return _riemann_np(g, dg, ddg)


def gram_schmidt(g):
    """Orthonormal frame (columns) from the coordinate frame in fixed order."""
    g = np.ascontiguousarray(g, dtype=float)
    if _jit.USE_NUMBA:
        return _gram_schmidt_jit(g)
    return _gram_schmidt_np(g)


def to_frame4(R, E):
    R = np.ascontiguousarray(R, dtype=float)
    E = np.ascontiguousarray(E, dtype=float)
    if _jit.USE_NUMBA:
        return _to_frame4_jit(R, E)
    return _to_frame4_np(R, E)

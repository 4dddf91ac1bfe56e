"""Pointwise linear algebra of 2-forms on an oriented Euclidean 4-space.

Conventions
-----------
A 2-form is a length-6 array of components on ``e12, e13, e14, e23, e24, e34``
(``eij`` = e^i ^ e^j in an oriented orthonormal coframe).  The inner product is
``<a, b> = 1/2 sum_ij a_ij b_ij``, so the six basis forms are orthonormal and a
Kähler form has squared norm 2.

Self-dual vectors are coordinates on the orthonormal basis ``w^a / sqrt(2)`` of
Lambda^+ with

    w^1 = e12 + e34,   w^2 = e13 + e42,   w^3 = e14 + e23,

and anti-self-dual vectors use ``e12 - e34, e13 + e24, e14 - e23`` (over sqrt 2).
The self-dual Weyl operator is a traceless symmetric 3x3 matrix in the
self-dual coordinates; ``|W+|^2`` is its Frobenius norm squared.

All functions broadcast over leading batch axes.
"""
import numpy as np

from ._jit import njit

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

_R2 = 1.0 / np.sqrt(2.0)

#: rows are w^a / sqrt(2) in the e_ij basis
PLUS_BASIS = _R2 * np.array(
    [
        [1.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
    ]
)
MINUS_BASIS = _R2 * np.array(
    [
        [1.0, 0.0, 0.0, 0.0, 0.0, -1.0],
        [0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0, -1.0, 0.0, 0.0],
    ]
)
#: orthogonal change of basis e_ij -> (Lambda^+, Lambda^-)
SPLIT = np.vstack([PLUS_BASIS, MINUS_BASIS])

STAR = np.array(
    [
        [0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, -1, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, -1, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
    ],
    dtype=float,
)

KAHLER_FORM = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 1.0])

EQUALITY_TOL = 1e-12


class DegenerateInputError(ValueError):
    """Raised when an operation needs a nonzero or normalized form and gets neither."""


def basis_form(i, j):
    """The 2-form e^i ^ e^j for 1-based frame indices."""
    out = np.zeros(6)
    sign = 1.0
    if i > j:
        i, j, sign = j, i, -1.0
    if i == j:
        return out
    out[PAIRS.index((i - 1, j - 1))] = sign
    return out


def from_matrix(a):
    """Antisymmetric ``(..., 4, 4)`` components to 6-vectors."""
    a = np.asarray(a)
    return np.stack([a[..., i, j] for i, j in PAIRS], axis=-1)


def to_matrix(alpha):
    alpha = np.asarray(alpha)
    out = np.zeros(alpha.shape[:-1] + (4, 4))
    for k, (i, j) in enumerate(PAIRS):
        out[..., i, j] = alpha[..., k]
        out[..., j, i] = -alpha[..., k]
    return out


def inner(alpha, beta):
    return np.sum(np.asarray(alpha) * np.asarray(beta), axis=-1)


def norm2(alpha):
    return inner(alpha, alpha)


def hodge_star(alpha):
    return np.asarray(alpha) @ STAR.T


def project_plus(alpha):
    """Self-dual coordinates of ``alpha``."""
    return np.asarray(alpha) @ PLUS_BASIS.T


def project_minus(alpha):
    """Anti-self-dual coordinates of ``alpha``."""
    return np.asarray(alpha) @ MINUS_BASIS.T


def plus_part(alpha):
    return project_plus(alpha) @ PLUS_BASIS


def minus_part(alpha):
    return project_minus(alpha) @ MINUS_BASIS


def from_plus(v):
    """2-form with self-dual coordinates ``v``."""
    return np.asarray(v) @ PLUS_BASIS


def from_minus(v):
    return np.asarray(v) @ MINUS_BASIS


def kahler_type(s):
    """``diag(s/6, -s/12, -s/12)``, the self-dual Weyl operator of a Kähler metric."""
    return np.diag([s / 6.0, -s / 12.0, -s / 12.0])


def w_apply(W, omega):
    return np.einsum("...ij,...j->...i", W, omega)


def w_quadratic(W, omega):
    """``W(omega, omega) = <W omega, omega>``."""
    return inner(w_apply(W, omega), omega)


def w_norm2(W):
    return np.sum(np.asarray(W) ** 2, axis=(-2, -1))


def w_perp_norm2(W, omega):
    """Squared norm of the part of ``W(omega)`` orthogonal to ``omega``."""
    omega = np.asarray(omega, dtype=float)
    n2 = norm2(omega)
    if np.any(n2 <= 0.0):
        raise DegenerateInputError("omega has zero norm")
    Wo = w_apply(W, omega)
    perp = Wo - (inner(Wo, omega) / n2)[..., None] * omega
    return norm2(perp)


def _check_length(omega, tol=EQUALITY_TOL):
    n2 = norm2(omega)
    if np.any(np.abs(n2 - 2.0) > tol):
        raise DegenerateInputError(f"omega must satisfy |omega|^2 = 2, got {n2}")


def lemma1_gap(W, omega):
    """``|W|^2 - |W(omega)^perp|^2 - (3/8) W(omega, omega)^2`` for ``|omega|^2 = 2``.

    Nonnegative for every traceless symmetric ``W``.
    """
    _check_length(omega)
    q = w_quadratic(W, omega)
    return w_norm2(W) - w_perp_norm2(W, omega) - 0.375 * q * q


def lemma1_half_gap(W, omega):
    """The weaker form with only half the perpendicular term subtracted."""
    _check_length(omega)
    q = w_quadratic(W, omega)
    return w_norm2(W) - 0.5 * w_perp_norm2(W, omega) - 0.375 * q * q


def lower_pair_split2(W, omega):
    """``|B_0|^2`` for the traceless part ``B_0`` of ``W`` compressed to ``omega^perp``.

    Zero exactly when the two eigenvalues of ``W`` on the plane orthogonal to
    ``omega`` coincide.
    """
    W = np.asarray(W, dtype=float)
    omega = np.asarray(omega, dtype=float)
    n = np.sqrt(norm2(omega))
    if np.any(n <= 0.0):
        raise DegenerateInputError("omega has zero norm")
    P = np.eye(3) - np.einsum("...i,...j->...ij", omega, omega) / (n * n)[..., None, None]
    B = P @ W @ P
    tr = np.trace(B, axis1=-2, axis2=-1)
    B0 = B - 0.5 * tr[..., None, None] * P
    return w_norm2(B0)


def lemma1_equality_data(W, omega):
    """``(gap, |W(omega)^perp|^2, lower_pair_split2)`` at one or many configurations."""
    return lemma1_gap(W, omega), w_perp_norm2(W, omega), lower_pair_split2(W, omega)


# ---------------------------------------------------------------------------
# random sampling and the minimization oracle


def random_traceless(rng, size):
    """Traceless symmetric 3x3 matrices, standard Gaussian on the 5-dim space."""
    z = rng.standard_normal((size, 5))
    W = np.zeros((size, 3, 3))
    # orthonormal basis of traceless symmetric matrices (Frobenius)
    a = 1.0 / np.sqrt(2.0)
    b = 1.0 / np.sqrt(6.0)
    W[:, 0, 0] = a * z[:, 0] + b * z[:, 1]
    W[:, 1, 1] = -a * z[:, 0] + b * z[:, 1]
    W[:, 2, 2] = -2.0 * b * z[:, 1]
    for k, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
        W[:, i, j] = W[:, j, i] = a * z[:, 2 + k]
    return W


def random_omega(rng, size):
    """Self-dual vectors uniform on the sphere of radius sqrt(2)."""
    v = rng.standard_normal((size, 3))
    return np.sqrt(2.0) * v / np.linalg.norm(v, axis=1, keepdims=True)


@njit(cache=True)
def _gap_batch_jit(W, omega):
    n = W.shape[0]
    out = np.empty(n)
    for k in range(n):
        fro = 0.0
        for i in range(3):
            for j in range(3):
                fro += W[k, i, j] * W[k, i, j]
        wo0 = W[k, 0, 0] * omega[k, 0] + W[k, 0, 1] * omega[k, 1] + W[k, 0, 2] * omega[k, 2]
        wo1 = W[k, 1, 0] * omega[k, 0] + W[k, 1, 1] * omega[k, 1] + W[k, 1, 2] * omega[k, 2]
        wo2 = W[k, 2, 0] * omega[k, 0] + W[k, 2, 1] * omega[k, 1] + W[k, 2, 2] * omega[k, 2]
        n2 = omega[k, 0] ** 2 + omega[k, 1] ** 2 + omega[k, 2] ** 2
        q = wo0 * omega[k, 0] + wo1 * omega[k, 1] + wo2 * omega[k, 2]
        c = q / n2
        p0 = wo0 - c * omega[k, 0]
        p1 = wo1 - c * omega[k, 1]
        p2 = wo2 - c * omega[k, 2]
        out[k] = fro - (p0 * p0 + p1 * p1 + p2 * p2) - 0.375 * q * q
    return out


def lemma1_gap_batch(W, omega):
    """Batched :func:`lemma1_gap` without per-call validation (hot path for sampling)."""
    from . import _jit

    W = np.ascontiguousarray(W, dtype=float)
    omega = np.ascontiguousarray(omega, dtype=float)
    if _jit.USE_NUMBA:
        return _gap_batch_jit(W, omega)
    q = w_quadratic(W, omega)
    Wo = w_apply(W, omega)
    perp = Wo - (q / norm2(omega))[:, None] * omega
    return w_norm2(W) - norm2(perp) - 0.375 * q * q


def sample_lemma1(n, seed=0, chunk=200_000):
    """Minimum of the algebraic gap over ``n`` random samples."""
    rng = np.random.default_rng(seed)
    lo = np.inf
    done = 0
    while done < n:
        m = min(chunk, n - done)
        gaps = lemma1_gap_batch(random_traceless(rng, m), random_omega(rng, m))
        lo = min(lo, float(gaps.min()))
        done += m
    return lo


def _sym_from_params(p):
    W = np.zeros((3, 3))
    W[0, 0] = p[0]
    W[1, 1] = p[1]
    W[2, 2] = -p[0] - p[1]
    W[0, 1] = W[1, 0] = p[2]
    W[0, 2] = W[2, 0] = p[3]
    W[1, 2] = W[2, 1] = p[4]
    return W


def minimize_lemma1(seed=0, omega=None, steps=4000, lr=0.05, fd_step=1e-6):
    """Projected gradient descent of the gap over unit-norm traceless ``W``.

    The gradient is taken by central finite differences so the oracle shares no
    code with any closed-form expression of the gap.  Returns ``(gap, W)``.
    """
    rng = np.random.default_rng(seed)
    if omega is None:
        omega = np.array([np.sqrt(2.0), 0.0, 0.0])

    def objective(p):
        W = _sym_from_params(p)
        W = W / np.sqrt(w_norm2(W))
        return float(lemma1_gap(W, omega))

    p = rng.standard_normal(5)
    for _ in range(steps):
        g = np.empty(5)
        for i in range(5):
            e = np.zeros(5)
            e[i] = fd_step
            g[i] = (objective(p + e) - objective(p - e)) / (2 * fd_step)
        p = p - lr * g
        p = p / np.sqrt(w_norm2(_sym_from_params(p)))
    W = _sym_from_params(p)
    W = W / np.sqrt(w_norm2(W))
    return float(lemma1_gap(W, omega)), W

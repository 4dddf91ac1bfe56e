"""Weitzenböck residual on structured grids.

The Hodge Laplacian ``d delta + delta d`` (with ``delta = -*d*``) is discretized
with centred differences on a coordinate grid; the right-hand side
``nabla*nabla alpha - 2 W+(alpha) + s/3 alpha`` is evaluated pointwise from jets.
The two routes share nothing but the metric and the form, so their difference
measures the discretization error, O(h^2).
"""
from dataclasses import dataclass

import numpy as np

from . import geometry, jets, kernels
from . import sd_algebra as sd
from .catalog import Axis

MIN_NODES = 8
GHOST = 2
_CHUNK = 20_000

# ordered triples complementary to m and the sign of eps^{ijk m}
_TRIPLES = ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))
_TRIPLE_SIGN = np.array([-1.0, 1.0, -1.0, 1.0])


class GridTooCoarseError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``n`` cells per axis.

    Periodic axes carry ``n`` nodes ``lower + i h``; interval axes carry ``n + 1``
    nodes including both ends.  Ghost layers are evaluated from the analytic
    fields, so no wrap-around is needed.
    """

    axes: tuple
    n: int

    def __post_init__(self):
        if self.n < MIN_NODES:
            raise GridTooCoarseError(f"need at least {MIN_NODES} nodes per axis, got {self.n}")

    @property
    def h(self):
        return np.array([(a.upper - a.lower) / self.n for a in self.axes])

    def coordinates(self, ghost=GHOST):
        out = []
        for a, h in zip(self.axes, self.h):
            count = self.n if a.kind == "periodic" else self.n + 1
            idx = np.arange(-ghost, count + ghost)
            out.append(a.lower + idx * h)
        return out

    def points(self, ghost=GHOST):
        mesh = np.meshgrid(*self.coordinates(ghost), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1), mesh[0].shape


def _trim(arr, m=1):
    if m == 0:
        return arr
    return arr[m:-m, m:-m, m:-m, m:-m]


def _diff(f, axis, h):
    """Centred difference along ``axis``; result trimmed by one layer in every axis."""
    sl_p = [slice(1, -1)] * 4
    sl_m = [slice(1, -1)] * 4
    sl_p[axis] = slice(2, None)
    sl_m[axis] = slice(None, -2)
    return (f[tuple(sl_p)] - f[tuple(sl_m)]) / (2.0 * h[axis])


def _raise2(alpha6, ginv):
    A = sd.to_matrix(alpha6)
    return sd.from_matrix(ginv @ A @ ginv)


def _star2(alpha6, ginv, vol):
    return vol[..., None] * (_raise2(alpha6, ginv) @ sd.STAR.T)


def _star3(c, g, vol):
    b = c * _TRIPLE_SIGN
    return np.einsum("...lm,...m->...l", g, b) / vol[..., None]


def _d1(beta, h):
    out = []
    for i, j in sd.PAIRS:
        out.append(_diff(beta[..., j], i, h) - _diff(beta[..., i], j, h))
    return np.stack(out, axis=-1)


def _d2(alpha6, h):
    comp = {p: alpha6[..., k] for k, p in enumerate(sd.PAIRS)}
    out = []
    for i, j, k in _TRIPLES:
        out.append(_diff(comp[(j, k)], i, h) - _diff(comp[(i, k)], j, h) + _diff(comp[(i, j)], k, h))
    return np.stack(out, axis=-1)


def hodge_laplacian(desc, alpha, grid):
    """Discrete ``(d delta + delta d) alpha`` at the grid nodes (coordinate components, 6-vectors)."""
    pts, shape = grid.points(GHOST)
    g = desc.evaluate(pts).reshape(shape + (4, 4))
    a = sd.from_matrix(jets.stack_matrix(alpha(*pts.T), pts.shape[0])[0]).reshape(shape + (6,))
    ginv = np.linalg.inv(g)
    vol = np.sqrt(np.linalg.det(g))
    h = grid.h
    # delta alpha = -*d*alpha (1-form, one layer in)
    delta_a = -_star3(_d2(_star2(a, ginv, vol), h), _trim(g), _trim(vol))
    d_delta = _d1(delta_a, h)
    # delta d alpha = -*d*d alpha
    star_da = _star3(_d2(a, h), _trim(g), _trim(vol))
    delta_d = -_star2(_d1(star_da, h), _trim(ginv, 2), _trim(vol, 2))
    return (d_delta + delta_d).reshape(-1, 6)


def _dgamma(g, dg, ddg, ginv, gamma):
    """``dgam[n, k, i, j, m] = d_m Gamma^k_ij``."""
    low = 0.5 * (
        np.einsum("njli->nlij", dg) + np.einsum("nilj->nlij", dg) - np.einsum("nijl->nlij", dg)
    )
    dlow = 0.5 * (
        np.einsum("njlim->nlijm", ddg) + np.einsum("niljm->nlijm", ddg) - np.einsum("nijlm->nlijm", ddg)
    )
    dginv = -np.einsum("nka,nabm,nbl->nklm", ginv, dg, ginv)
    return np.einsum("nklm,nlij->nkijm", dginv, low) + np.einsum("nkl,nlijm->nkijm", ginv, dlow)


def rough_laplacian(desc, alpha, points):
    """``nabla* nabla alpha = -g^kl nabla_k nabla_l alpha`` from jets (coordinate 4x4 components)."""
    points = np.atleast_2d(points)
    N = points.shape[0]
    g, dg, ddg = geometry.metric_jets(desc, points)
    ginv, gamma = kernels.christoffel(g, dg)
    dgam = _dgamma(g, dg, ddg, ginv, gamma)
    A, dA, ddA = jets.stack_matrix(alpha(*jets.Jet.variables(points)), N)
    # first covariant derivative: C[n, l, i, j] = (nabla_l alpha)_ij
    C = (
        np.einsum("nijl->nlij", dA)
        - np.einsum("nmli,nmj->nlij", gamma, A)
        - np.einsum("nmlj,nim->nlij", gamma, A)
    )
    # d_k C[l, i, j]
    dC = (
        np.einsum("nijlk->nklij", ddA)
        - np.einsum("nmlik,nmj->nklij", dgam, A)
        - np.einsum("nmli,nmjk->nklij", gamma, dA)
        - np.einsum("nmljk,nim->nklij", dgam, A)
        - np.einsum("nmlj,nimk->nklij", gamma, dA)
    )
    CC = (
        dC
        - np.einsum("nmkl,nmij->nklij", gamma, C)
        - np.einsum("nmki,nlmj->nklij", gamma, C)
        - np.einsum("nmkj,nlim->nklij", gamma, C)
    )
    return -np.einsum("nkl,nklij->nij", ginv, CC)


def weitzenboeck_rhs(desc, alpha, points):
    """``nabla*nabla alpha - 2 W+(alpha) + s/3 alpha`` as coordinate 6-vectors."""
    out = []
    for start in range(0, points.shape[0], _CHUNK):
        p = points[start:start + _CHUNK]
        rough = rough_laplacian(desc, alpha, p)
        pg = geometry.riemann(desc, p)
        pg, _ = geometry.oriented(pg)
        blocks = geometry.decompose(pg)
        E = pg.frame
        Th = np.linalg.inv(E)
        A = jets.stack_matrix(alpha(*p.T), p.shape[0])[0]
        af = sd.from_matrix(np.swapaxes(E, 1, 2) @ A @ E)
        if np.max(np.abs(sd.project_minus(af))) > 1e-10:
            raise ValueError("alpha must be self-dual")
        Wa = sd.to_matrix(sd.from_plus(sd.w_apply(blocks.wplus, sd.project_plus(af))))
        Wa_c = np.swapaxes(Th, 1, 2) @ Wa @ Th
        rhs = rough - 2.0 * Wa_c + (blocks.s / 3.0)[:, None, None] * A
        out.append(sd.from_matrix(rhs))
    return np.concatenate(out, axis=0)


def form_norm(beta6, ginv):
    """Pointwise metric norm of 2-forms given by coordinate 6-vectors."""
    return np.sqrt(np.abs(np.sum(beta6 * _raise2(beta6, ginv), axis=-1)))


def weitzenboeck_residual(desc, alpha, grid):
    """Max over grid nodes of |Delta alpha - (nabla*nabla alpha - 2 W+(alpha) + s/3 alpha)|."""
    lap = hodge_laplacian(desc, alpha, grid)
    pts, _ = grid.points(0)
    rhs = weitzenboeck_rhs(desc, alpha, pts)
    ginv = np.linalg.inv(desc.evaluate(pts))
    return float(np.max(form_norm(lap - rhs, ginv)))


@dataclass
class ConvergenceTable:
    resolutions: list
    h: list
    residuals: list
    order: object  # float, or "exact" when every residual is at the rounding floor

    def rows(self):
        return [
            {"n": n, "h": h, "residual": r} for n, h, r in zip(self.resolutions, self.h, self.residuals)
        ]


FLOOR = 1e-10


def fit_order(h, residuals, floor=FLOOR):
    h = np.asarray(h, dtype=float)
    r = np.asarray(residuals, dtype=float)
    if np.all(r <= floor):
        return "exact"
    slope, _ = np.polyfit(np.log(h), np.log(r), 1)
    return float(slope)


def convergence(desc, alpha, axes, resolutions):
    if len(resolutions) < 3:
        raise ValueError("convergence study needs at least three resolutions")
    res, hs = [], []
    for n in resolutions:
        grid = Grid(tuple(axes), int(n))
        res.append(weitzenboeck_residual(desc, alpha, grid))
        hs.append(float(np.max(grid.h)))
    return ConvergenceTable(list(resolutions), hs, res, fit_order(hs, res))


# ---------------------------------------------------------------------------
# standard test forms


def t4_constant_form(*x):
    """omega^1 = dx0^dx1 + dx2^dx3 (constant)."""
    A = [[0.0] * 4 for _ in range(4)]
    A[0][1], A[1][0] = 1.0, -1.0
    A[2][3], A[3][2] = 1.0, -1.0
    return A


def t4_bump_form(x0, x1, x2, x3):
    """sin(x0) omega^1 + cos(x1 + x2) omega^2, a non-closed self-dual form on the flat torus."""
    f = jets.sin(x0)
    k = jets.cos(x1 + x2)
    A = [[0.0] * 4 for _ in range(4)]
    A[0][1], A[1][0] = f, -f
    A[2][3], A[3][2] = f, -f
    A[0][2], A[2][0] = k, -k
    A[1][3], A[3][1] = -k, k
    return A


def s2xs2_kahler_form(a=1.0, b=1.0):
    def form(t1, p1, t2, p2):
        u = a * a * jets.sin(t1)
        w = b * b * jets.sin(t2)
        A = [[0.0] * 4 for _ in range(4)]
        A[0][1], A[1][0] = u, -u
        A[2][3], A[3][2] = w, -w
        return A

    return form


def s2xs2_transverse_form(a=1.0, b=1.0):
    """The frame form e13 - e24, self-dual but not an eigenform of the Laplacian."""

    def form(t1, p1, t2, p2):
        c = a * b * jets.sin(t1) * jets.sin(t2)
        A = [[0.0] * 4 for _ in range(4)]
        A[0][2], A[2][0] = a * b, -a * b
        A[1][3], A[3][1] = -c, c
        return A

    return form


T4_AXES = tuple(Axis("periodic", 0.0, 2.0 * np.pi) for _ in range(4))
S2XS2_AXES = (
    Axis("interval", np.pi / 4, 3 * np.pi / 4),
    Axis("periodic", 0.0, 2.0 * np.pi),
    Axis("interval", np.pi / 4, 3 * np.pi / 4),
    Axis("periodic", 0.0, 2.0 * np.pi),
)

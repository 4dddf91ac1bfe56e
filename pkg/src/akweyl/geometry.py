"""Curvature of 4-dimensional metrics given in a chart or by a left-invariant frame."""
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import jets, kernels
from . import sd_algebra as sd

log = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9


class GeometryError(ValueError):
    pass


class NotPositiveDefiniteError(GeometryError):
    pass


class OutsideDomainError(GeometryError):
    pass


@dataclass(frozen=True)
class ChartMetric:
    """Metric given by ``metric(x0, x1, x2, x3) -> 4x4 nested list``.

    The callable must be written with :mod:`akweyl.jets` functions so it accepts
    both float arrays and jets.  ``lower``/``upper`` bound the chart box that
    points must lie in; ``orientation`` is +1 when the coordinate order is
    positively oriented.
    """

    metric: Callable
    lower: tuple = (-np.inf,) * 4
    upper: tuple = (np.inf,) * 4
    orientation: int = 1
    name: str = "chart"

    kind = "chart"

    def evaluate(self, points):
        """Metric values on a batch of points, no derivatives."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        entries = self.metric(*points.T)
        return jets.stack_matrix(entries, points.shape[0])[0]


@dataclass(frozen=True)
class FrameMetric:
    """Left-invariant metric for which the frame ``e_1..e_4`` is orthonormal.

    ``structure[k, i, j]`` is ``c^k_ij`` in ``[e_i, e_j] = c^k_ij e_k``.  The frame
    order fixes the orientation.
    """

    structure: np.ndarray
    volume: float = 1.0
    name: str = "frame"

    kind = "frame"

    def __post_init__(self):
        c = np.asarray(self.structure, dtype=float)
        if c.shape != (4, 4, 4):
            raise GeometryError("structure constants must have shape (4, 4, 4)")
        if np.max(np.abs(c + np.swapaxes(c, 1, 2))) > 1e-14:
            raise GeometryError("structure constants must be antisymmetric in the lower indices")
        object.__setattr__(self, "structure", c)


def koszul_connection(c):
    """Levi-Civita coefficients of a left-invariant orthonormal frame.

    ``gamma[k, i, j]`` is the e_k component of ``nabla_{e_i} e_j``.
    """
    c = np.asarray(c, dtype=float)
    return 0.5 * (c - np.einsum("ijk->kij", c) + np.einsum("jki->kij", c))


def frame_riemann(c):
    """``R[i, j, k, l] = g(R(e_i, e_j) e_l, e_k)`` for a left-invariant frame."""
    gam = koszul_connection(c)
    # R(e_i, e_j) e_l = (G^m_jl G^p_im - G^m_il G^p_jm - c^m_ij G^p_ml) e_p
    Rvec = (
        np.einsum("mjl,pim->ijlp", gam, gam)
        - np.einsum("mil,pjm->ijlp", gam, gam)
        - np.einsum("mij,pml->ijlp", c, gam)
    )
    return np.einsum("ijlk->ijkl", Rvec)


@dataclass
class PointGeometry:
    """Curvature data on a batch of points (leading axis ``N``).

    ``riemann`` and ``ricci`` are components in the oriented orthonormal frame
    whose coordinate components are the columns of ``frame``.  In frame mode the
    frame is the identity and ``gamma`` holds the Koszul coefficients.
    """

    points: np.ndarray
    metric: np.ndarray
    metric_inv: np.ndarray
    gamma: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    s: np.ndarray
    frame: np.ndarray
    orientation: int = 1
    kind: str = "chart"
    dmetric: Optional[np.ndarray] = field(default=None, repr=False)
    ddmetric: Optional[np.ndarray] = field(default=None, repr=False)

    def __len__(self):
        return self.points.shape[0]


@dataclass
class CurvatureBlocks:
    """Blocks of the curvature operator on Lambda^+ (+) Lambda^-."""

    wplus: np.ndarray
    wminus: np.ndarray
    ric0block: np.ndarray
    s: np.ndarray
    operator: np.ndarray
    frame_repaired: bool = False

    def reassemble(self):
        """The 6x6 operator in the e_ij basis rebuilt from the blocks."""
        n = self.s.shape[0]
        eye = np.eye(3)[None] * (self.s / 12.0)[:, None, None]
        M = np.zeros((n, 6, 6))
        M[:, :3, :3] = self.wplus + eye
        M[:, 3:, 3:] = self.wminus + eye
        M[:, :3, 3:] = self.ric0block
        M[:, 3:, :3] = np.swapaxes(self.ric0block, 1, 2)
        return np.einsum("ai,nab,bj->nij", sd.SPLIT, M, sd.SPLIT)


def _as_points(points):
    points = np.asarray(points, dtype=float)
    return np.atleast_2d(points)


def _check_domain(desc, points):
    lo = np.asarray(desc.lower, dtype=float)
    hi = np.asarray(desc.upper, dtype=float)
    if np.any(points < lo) or np.any(points > hi):
        raise OutsideDomainError(f"points outside chart box [{lo}, {hi}] for {desc.name}")


def metric_jets(desc, points):
    """Metric values, first and second derivatives on a batch of chart points."""
    points = _as_points(points)
    _check_domain(desc, points)
    entries = desc.metric(*jets.Jet.variables(points))
    g, dg, ddg = jets.stack_matrix(entries, points.shape[0])
    eig = np.linalg.eigvalsh(g)
    if np.any(eig[:, 0] <= 0.0):
        raise NotPositiveDefiniteError(f"metric of {desc.name} is not positive definite at some point")
    return g, dg, ddg


def christoffel(desc, points):
    """Christoffel symbols ``gamma[n, k, i, j] = Gamma^k_ij`` (chart) or Koszul coefficients (frame)."""
    points = _as_points(points)
    if desc.kind == "frame":
        return np.broadcast_to(koszul_connection(desc.structure), (points.shape[0], 4, 4, 4)).copy()
    g, dg, _ = metric_jets(desc, points)
    return kernels.christoffel(g, dg)[1]


def riemann(desc, points):
    """Full :class:`PointGeometry` at ``points`` (shape ``(4,)`` or ``(N, 4)``)."""
    points = _as_points(points)
    N = points.shape[0]
    if desc.kind == "frame":
        R = np.broadcast_to(frame_riemann(desc.structure), (N, 4, 4, 4, 4)).copy()
        eye = np.broadcast_to(np.eye(4), (N, 4, 4)).copy()
        ric = np.einsum("nabad->nbd", R)
        return PointGeometry(
            points=points,
            metric=eye,
            metric_inv=eye.copy(),
            gamma=christoffel(desc, points),
            riemann=R,
            ricci=ric,
            s=np.einsum("nbb->n", ric),
            frame=eye.copy(),
            orientation=1,
            kind="frame",
        )
    g, dg, ddg = metric_jets(desc, points)
    ginv, gamma, Rc = kernels.riemann(g, dg, ddg)
    E = kernels.gram_schmidt(g)
    R = kernels.to_frame4(Rc, E)
    ric = np.einsum("nabad->nbd", R)
    return PointGeometry(
        points=points,
        metric=g,
        metric_inv=ginv,
        gamma=gamma,
        riemann=R,
        ricci=ric,
        s=np.einsum("nbb->n", ric),
        frame=E,
        orientation=desc.orientation,
        kind="chart",
        dmetric=dg,
        ddmetric=ddg,
    )


def symmetry_residuals(pg):
    """Largest violation of antisymmetry, pair symmetry and first Bianchi identity."""
    R = pg.riemann
    anti1 = np.max(np.abs(R + np.swapaxes(R, 1, 2)))
    anti2 = np.max(np.abs(R + np.swapaxes(R, 3, 4)))
    pair = np.max(np.abs(R - np.einsum("nijkl->nklij", R)))
    bianchi = np.max(np.abs(R + np.einsum("nijkl->niklj", R) + np.einsum("nijkl->niljk", R)))
    return {"antisym_12": anti1, "antisym_34": anti2, "pair": pair, "bianchi": bianchi}


def metric_compatibility(desc, points):
    """Max of |d_k g_ij - Gamma^m_ki g_mj - Gamma^m_kj g_im| (chart mode)."""
    g, dg, _ = metric_jets(desc, points)
    _, gamma = kernels.christoffel(g, dg)
    cov = (
        np.einsum("nijk->nkij", dg)
        - np.einsum("nmki,nmj->nkij", gamma, g)
        - np.einsum("nmkj,nim->nkij", gamma, g)
    )
    return float(np.max(np.abs(cov)))


def rotate_frame(pg, Q):
    """Re-express ``pg`` in the frame ``e'_a = e_b Q[b, a]`` (``Q`` orthogonal, per point or shared)."""
    Q = np.asarray(Q, dtype=float)
    if Q.ndim == 2:
        Q = np.broadcast_to(Q, (len(pg), 4, 4))
    R = np.einsum("nijkl,nia,njb,nkc,nld->nabcd", pg.riemann, Q, Q, Q, Q, optimize=True)
    ric = np.einsum("nij,nia,njb->nab", pg.ricci, Q, Q)
    return replace(pg, riemann=R, ricci=ric, frame=np.einsum("nib,nba->nia", pg.frame, Q))


def reverse_orientation(pg):
    return replace(pg, orientation=-pg.orientation)


def frame_orientation(pg):
    """Sign of det(frame) times the declared orientation; +1 when consistent."""
    return np.sign(np.linalg.det(pg.frame)) * pg.orientation


_SWAP34 = np.array([0, 1, 3, 2])


def oriented(pg):
    """``pg`` with frame legs 3 and 4 swapped at points whose frame disagrees with the orientation."""
    bad = frame_orientation(pg) < 0
    if not np.any(bad):
        return pg, False
    log.warning("frame orientation disagrees with manifold orientation at %d points; swapping legs 3,4",
                int(bad.sum()))
    R = pg.riemann.copy()
    ric = pg.ricci.copy()
    E = pg.frame.copy()
    idx = np.ix_(_SWAP34, _SWAP34, _SWAP34, _SWAP34)
    for n in np.flatnonzero(bad):
        R[n] = pg.riemann[n][idx]
        ric[n] = pg.ricci[n][np.ix_(_SWAP34, _SWAP34)]
        E[n] = pg.frame[n][:, _SWAP34]
    return replace(pg, riemann=R, ricci=ric, frame=E), True


def curvature_operator(R):
    """6x6 matrix ``R[(ij), (kl)] = R_ijkl`` on the e_ij basis."""
    idx_i = [p[0] for p in sd.PAIRS]
    idx_j = [p[1] for p in sd.PAIRS]
    return R[:, idx_i, idx_j][:, :, idx_i, idx_j]


def decompose(pg):
    """Split the curvature operator into W+, W-, the ric_0 block and s."""
    pg, repaired = oriented(pg)
    op = curvature_operator(pg.riemann)
    M = np.einsum("ai,nij,bj->nab", sd.SPLIT, op, sd.SPLIT)
    A, C, B = M[:, :3, :3], M[:, 3:, 3:], M[:, :3, 3:]
    trA = np.trace(A, axis1=1, axis2=2)
    trC = np.trace(C, axis1=1, axis2=2)
    s = 2.0 * (trA + trC)
    eye = np.eye(3)[None]
    return CurvatureBlocks(
        wplus=A - (trA / 3.0)[:, None, None] * eye,
        wminus=C - (trC / 3.0)[:, None, None] * eye,
        ric0block=B,
        s=s,
        operator=op,
        frame_repaired=repaired,
    )


def ric0_norm2(pg):
    """Squared norm of the trace-free Ricci tensor in the orthonormal frame."""
    ric0 = pg.ricci - (pg.s / 4.0)[:, None, None] * np.eye(4)[None]
    return np.sum(ric0**2, axis=(1, 2))


def invariants(pg):
    """Frame-independent scalars ``s, |W+|^2, |W-|^2, |ric0|^2``."""
    b = decompose(pg)
    return {
        "s": b.s,
        "wplus2": sd.w_norm2(b.wplus),
        "wminus2": sd.w_norm2(b.wminus),
        "ric0_2": ric0_norm2(pg),
    }

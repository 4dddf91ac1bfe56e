"""Almost-Kähler layer: omega, its covariant derivative, s*, and the Blair connection curvature.

All quantities are returned in the oriented orthonormal frame that
:func:`akweyl.geometry.riemann` builds, so they combine directly with the
curvature blocks of :func:`akweyl.geometry.decompose`.
"""
from dataclasses import dataclass

import numpy as np

from . import geometry, jets
from . import sd_algebra as sd

J_TOL = 1e-12
S_STAR_TOL = 1e-8


class IncompatibleStructureError(ValueError):
    """J fails J^2 = -1, orthogonality, or omega is not self-dual."""


class ConventionError(RuntimeError):
    """The two routes to s* disagree; a sign or normalization convention is broken."""


@dataclass
class AlmostKahlerData:
    """Frame components of J, its covariant derivative and omega on a batch of points."""

    geometry: geometry.PointGeometry
    J: np.ndarray  # (N, 4, 4), J[n, i, j] = i-th component of J e_j
    DJ: np.ndarray  # (N, 4, 4, 4), DJ[n, a] = nabla_{e_a} J
    omega: np.ndarray  # (N, 6)
    nabla_omega: np.ndarray  # (N, 4, 6)


@dataclass
class StarScalar:
    s_star: np.ndarray
    nabla_omega_norm2: np.ndarray
    s: np.ndarray
    s_star_cross: np.ndarray
    mismatch: np.ndarray


@dataclass
class BlairCurvature:
    iF: np.ndarray  # (N, 6) real curvature 2-form of the anti-canonical bundle
    F_plus: np.ndarray  # (N, 3)
    F_minus: np.ndarray  # (N, 3)
    residual: np.ndarray  # (N,)


def _frame_j(desc, J, pg):
    N = len(pg)
    if desc.kind == "frame":
        if J.matrix is None:
            raise IncompatibleStructureError("frame-mode metric needs a constant frame matrix for J")
        Jf = np.broadcast_to(np.asarray(J.matrix, dtype=float), (N, 4, 4)).copy()
        # nabla_a J = [Gamma_a, J] with (Gamma_a)[p, m] = gamma[p, a, m]
        Ga = np.einsum("npam->napm", pg.gamma)
        DJ = np.einsum("napm,nmj->napj", Ga, Jf) - np.einsum("npm,namj->napj", Jf, Ga)
        return Jf, DJ
    if J.field is None:
        raise IncompatibleStructureError("chart-mode metric needs a J field")
    entries = J.field(*jets.Jet.variables(pg.points))
    Jc, dJ, _ = jets.stack_matrix(entries, N)
    # nabla_k J^i_j = d_k J^i_j + Gamma^i_km J^m_j - Gamma^m_kj J^i_m
    gam = pg.gamma
    cov = (
        np.einsum("nijk->nkij", dJ)
        + np.einsum("nikm,nmj->nkij", gam, Jc)
        - np.einsum("nmkj,nim->nkij", gam, Jc)
    )
    E = pg.frame
    Th = np.linalg.inv(E)
    Jf = Th @ Jc @ E
    DJ = np.einsum("nka,nci,nkij,njb->nacb", E, Th, cov, E)
    return Jf, DJ


def _validate(Jf, pg, tol=J_TOL):
    N = Jf.shape[0]
    eye = np.eye(4)[None]
    sq = np.max(np.abs(Jf @ Jf + eye))
    if sq > tol:
        raise IncompatibleStructureError(f"J^2 != -1 (max deviation {sq:.3e})")
    orth = np.max(np.abs(np.swapaxes(Jf, 1, 2) @ Jf - eye))
    if orth > tol:
        raise IncompatibleStructureError(f"J is not g-orthogonal (max deviation {orth:.3e})")
    omega = sd.from_matrix(np.swapaxes(Jf, 1, 2))
    asd = np.max(np.abs(sd.project_minus(omega))) if N else 0.0
    if asd > 1e-10:
        raise IncompatibleStructureError(f"omega is not self-dual for this orientation (|omega^-| = {asd:.3e})")
    return omega


def structure(desc, J, points, tol=J_TOL):
    """Frame components of J, nabla J, omega and nabla omega at ``points``."""
    pg, _ = geometry.oriented(geometry.riemann(desc, points))
    Jf, DJ = _frame_j(desc, J, pg)
    omega = _validate(Jf, pg, tol)
    # omega_ab = g(J e_a, e_b) = J_ba; same transpose for the covariant derivative
    nabla_omega = sd.from_matrix(np.swapaxes(DJ, 2, 3))
    return AlmostKahlerData(geometry=pg, J=Jf, DJ=DJ, omega=omega, nabla_omega=nabla_omega)


def omega_field(desc, J, points):
    """Fundamental form omega(X, Y) = g(JX, Y) as frame 2-form components (N, 6)."""
    return structure(desc, J, points).omega


def omega_coordinates(desc, J, points):
    """Coordinate components ``omega_ij = g(J d_i, d_j)`` (chart mode)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    g = desc.evaluate(points)
    Jc = jets.stack_matrix(J.field(*points.T), points.shape[0])[0]
    return np.swapaxes(Jc, 1, 2) @ g


def nabla_omega_norm2(desc, J, points, data=None):
    data = data or structure(desc, J, points)
    return np.sum(data.nabla_omega**2, axis=(1, 2))


def _s_star_curvature(data):
    op = geometry.curvature_operator(data.geometry.riemann)
    return 2.0 * np.einsum("ni,nij,nj->n", data.omega, op, data.omega)


def s_star(desc, J, points, data=None, tol=S_STAR_TOL):
    """s* = 2 R(omega, omega), cross-checked against s + |nabla omega|^2."""
    data = data or structure(desc, J, points)
    ss = _s_star_curvature(data)
    nw = nabla_omega_norm2(desc, J, points, data)
    s = data.geometry.s
    cross = s + nw
    mismatch = np.abs(ss - cross)
    scale = np.maximum(1.0, np.abs(ss))
    if np.any(mismatch > tol * scale):
        raise ConventionError(f"s* routes disagree: max |2R(w,w) - (s + |nabla w|^2)| = {mismatch.max():.3e}")
    return StarScalar(s_star=ss, nabla_omega_norm2=nw, s=s, s_star_cross=cross, mismatch=mismatch)


def _wplus_omega(data):
    blocks = geometry.decompose(data.geometry)
    v = sd.project_plus(data.omega)
    return blocks, v


def w_quadratic_identity_residual(desc, J, points, data=None):
    """|W+(omega, omega) - (s*/2 - s/6)| pointwise."""
    data = data or structure(desc, J, points)
    blocks, v = _wplus_omega(data)
    q = sd.w_quadratic(blocks.wplus, v)
    ss = _s_star_curvature(data)
    return np.abs(q - (ss / 2.0 - blocks.s / 6.0))


def wplus_omega_terms(data):
    """``(W+(omega, omega), |W+(omega)^perp|^2, |W+|^2, W+(omega)^perp as self-dual coordinates)``."""
    blocks, v = _wplus_omega(data)
    Wv = sd.w_apply(blocks.wplus, v)
    q = sd.inner(Wv, v)
    perp = Wv - (q / sd.norm2(v))[:, None] * v
    return q, sd.norm2(perp), sd.w_norm2(blocks.wplus), perp


def blair_curvature(desc, J, points, data=None):
    """Curvature iF of the connection nabla - 1/2 J (nabla J) on the anti-canonical bundle.

    With tr the real trace, iF(X, Y) = 1/2 tr(J R(X, Y)) - 1/4 tr(J nabla_X J nabla_Y J).
    The residual compares the self-dual part with W+(omega)^perp + (s + s*)/8 omega.
    """
    data = data or structure(desc, J, points)
    R = data.geometry.riemann
    Jf, DJ = data.J, data.DJ
    # endomorphism R(e_a, e_b) has (p, l) entry R_abpl
    term1 = 0.5 * np.einsum("nkp,nabpk->nab", Jf, R)
    term2 = 0.25 * np.einsum("nij,najk,nbki->nab", Jf, DJ, DJ)
    iF = sd.from_matrix(term1 - term2)
    F_plus = sd.project_plus(iF)
    F_minus = sd.project_minus(iF)
    ss = _s_star_curvature(data)
    s = data.geometry.s
    _, _, _, perp = wplus_omega_terms(data)
    v = sd.project_plus(data.omega)
    expected = perp + ((s + ss) / 8.0)[:, None] * v
    residual = np.sqrt(sd.norm2(F_plus - expected))
    return BlairCurvature(iF=iF, F_plus=F_plus, F_minus=F_minus, residual=residual)

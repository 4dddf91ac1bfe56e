"""Built-in manifolds with certified structural flags and reference data."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import jets
from .geometry import ChartMetric, FrameMetric

TWO_PI = 2.0 * np.pi


class InvalidParameterError(ValueError):
    pass


class UnknownEntryError(KeyError):
    pass


@dataclass(frozen=True)
class Volume:
    """``coeff * pi**pi_power``; kept exact so saturation cases compare as rationals."""

    coeff: Fraction
    pi_power: int

    @property
    def value(self):
        return float(self.coeff) * np.pi**self.pi_power


@dataclass(frozen=True)
class CompatibleJ:
    """Almost-complex structure: a chart field ``J(x) -> 4x4 nested list`` or a constant frame matrix.

    ``J[i][j]`` is the i-th component of ``J d_j`` (or ``J e_j``).
    """

    field: Optional[Callable] = None
    matrix: Optional[np.ndarray] = None


@dataclass(frozen=True)
class Axis:
    """One quadrature axis: ``kind`` is ``"periodic"`` (trapezoid) or ``"gauss"`` (Gauss-Legendre)."""

    kind: str
    lower: float
    upper: float


@dataclass(frozen=True)
class Quadrature:
    """Product rule on parameter space mapped into the chart.

    ``to_chart(u) -> (x, jac)`` maps parameter points ``u`` (N, 4) to chart points
    and the absolute Jacobian determinant; ``None`` means identity.
    """

    axes: tuple
    to_chart: Optional[Callable] = None


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    params: dict
    description: object
    J: Optional[CompatibleJ]
    flags: dict
    certification: dict
    chi: Optional[int]
    tau: Optional[int]
    volume: Optional[Volume]
    compact: bool = True
    homogeneous: bool = False
    reference_point: tuple = (0.0, 0.0, 0.0, 0.0)
    sample_lower: tuple = (0.0, 0.0, 0.0, 0.0)
    sample_upper: tuple = (1.0, 1.0, 1.0, 1.0)
    quadrature: Optional[Quadrature] = None
    constants: dict = field(default_factory=dict)

    @property
    def c1_squared(self):
        if self.chi is None:
            return None
        return 2 * self.chi + 3 * self.tau

    def sample_points(self, n, seed=0):
        rng = np.random.default_rng(seed)
        lo = np.asarray(self.sample_lower, dtype=float)
        hi = np.asarray(self.sample_upper, dtype=float)
        return lo + (hi - lo) * rng.random((n, 4))


STANDARD_J = np.array(
    [[0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, -1.0], [0.0, 0.0, 1.0, 0.0]]
)


def _const_matrix(m):
    return [[float(m[i, j]) for j in range(4)] for i in range(4)]


def _standard_j_field(*x):
    return _const_matrix(STANDARD_J)


def _diag(*d):
    out = [[0.0] * 4 for _ in range(4)]
    for i, v in enumerate(d):
        out[i][i] = v
    return out


# ---------------------------------------------------------------------------
# flat torus


def _t4_metric(x0, x1, x2, x3):
    return _diag(1.0, 1.0, 1.0, 1.0)


def _positive(**kw):
    (name, value), = kw.items()
    value = float(value)
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def t4_flat():
    periodic = tuple(Axis("periodic", 0.0, TWO_PI) for _ in range(4))
    return CatalogEntry(
        id="t4_flat",
        params={},
        description=ChartMetric(_t4_metric, lower=(-10.0,) * 4, upper=(20.0,) * 4, name="t4_flat"),
        J=CompatibleJ(field=_standard_j_field),
        flags=dict(kahler=True, einstein=True, constant_s=True, delta_wplus_zero=True, self_dual=True),
        certification={"delta_wplus_zero": "flat metric: W+ = 0 identically"},
        chi=0,
        tau=0,
        volume=Volume(Fraction(16), 4),
        homogeneous=True,
        sample_lower=(0.0,) * 4,
        sample_upper=(TWO_PI,) * 4,
        quadrature=Quadrature(periodic),
        constants={"s": 0.0, "s_star": 0.0},
    )


def t4_frame_description():
    """The flat torus as a left-invariant frame with vanishing structure constants."""
    return FrameMetric(np.zeros((4, 4, 4)), volume=TWO_PI**4, name="t4_flat_frame")


# ---------------------------------------------------------------------------
# round S^4


def s4_round(r=1.0):
    r = _positive(r=r)

    def metric(p1, p2, p3, ph):
        s1, s2, s3 = jets.sin(p1), jets.sin(p2), jets.sin(p3)
        a = s1 * s1
        b = a * s2 * s2
        c = b * s3 * s3
        return _diag(r * r, r * r * a, r * r * b, r * r * c)

    eps = 0.05
    return CatalogEntry(
        id="s4_round",
        params={"r": r},
        description=ChartMetric(metric, lower=(0.0, 0.0, 0.0, -10.0), upper=(np.pi, np.pi, np.pi, 20.0),
                                name="s4_round"),
        J=None,
        flags=dict(kahler=False, einstein=True, constant_s=True, delta_wplus_zero=True, self_dual=True,
                   almost_kahler=False),
        certification={"delta_wplus_zero": "Einstein metric (constant curvature), W+ = 0"},
        chi=2,
        tau=0,
        volume=Volume(Fraction(8, 3) * Fraction(r) ** 4, 2),
        homogeneous=True,
        reference_point=(np.pi / 2, np.pi / 2, np.pi / 2, 0.0),
        sample_lower=(eps, eps, eps, 0.0),
        sample_upper=(np.pi - eps, np.pi - eps, np.pi - eps, TWO_PI),
        quadrature=Quadrature(
            (Axis("gauss", 0.0, np.pi), Axis("gauss", 0.0, np.pi), Axis("gauss", 0.0, np.pi),
             Axis("periodic", 0.0, TWO_PI))
        ),
        constants={"s": 12.0 / r**2},
    )


# ---------------------------------------------------------------------------
# S^2(a) x S^2(b)


def s2xs2(a=1.0, b=1.0):
    a, b = _positive(a=a), _positive(b=b)

    def metric(t1, p1, t2, p2):
        s1, s2 = jets.sin(t1), jets.sin(t2)
        return _diag(a * a, a * a * s1 * s1, b * b, b * b * s2 * s2)

    def jfield(t1, p1, t2, p2):
        s1, s2 = jets.sin(t1), jets.sin(t2)
        # J d_theta = d_phi / sin(theta), J d_phi = -sin(theta) d_theta
        out = [[0.0] * 4 for _ in range(4)]
        out[1][0] = 1.0 / s1
        out[0][1] = -s1
        out[3][2] = 1.0 / s2
        out[2][3] = -s2
        return out

    eps = 0.05
    einstein = a == b
    s = 2.0 / a**2 + 2.0 / b**2
    return CatalogEntry(
        id="s2xs2",
        params={"a": a, "b": b},
        description=ChartMetric(metric, lower=(0.0, -10.0, 0.0, -10.0), upper=(np.pi, 20.0, np.pi, 20.0),
                                name=f"s2xs2({a},{b})"),
        J=CompatibleJ(field=jfield),
        flags=dict(kahler=True, einstein=einstein, constant_s=True, delta_wplus_zero=True,
                   self_dual=False, almost_kahler=True, rational_or_ruled=True),
        certification={"delta_wplus_zero": "Kähler product with constant scalar curvature"},
        chi=4,
        tau=0,
        volume=Volume(16 * Fraction(a) ** 2 * Fraction(b) ** 2, 2),
        homogeneous=True,
        reference_point=(np.pi / 2, 0.0, np.pi / 2, 0.0),
        sample_lower=(eps, 0.0, eps, 0.0),
        sample_upper=(np.pi - eps, TWO_PI, np.pi - eps, TWO_PI),
        quadrature=Quadrature(
            (Axis("gauss", 0.0, np.pi), Axis("periodic", 0.0, TWO_PI), Axis("gauss", 0.0, np.pi),
             Axis("periodic", 0.0, TWO_PI))
        ),
        constants={"s": s, "s_star": s},
    )


# ---------------------------------------------------------------------------
# complex projective plane and complex hyperbolic plane in affine charts


def _hermitian_metric(sign):
    """Real metric of h = ((1 + sign|z|^2) delta - sign zbar_a z_b) / (1 + sign|z|^2)^2.

    Coordinates are (x1, y1, x2, y2) with z_a = x_a + i y_a; sign=+1 gives
    Fubini-Study (holomorphic sectional curvature 4), sign=-1 the Bergman ball
    (holomorphic sectional curvature -4).
    """

    def metric(x1, y1, x2, y2):
        r2 = x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2
        den = 1.0 + sign * r2
        inv2 = 1.0 / (den * den)
        zz = [[x1 * x1 + y1 * y1, None], [None, x2 * x2 + y2 * y2]]
        re12 = x1 * x2 + y1 * y2  # Re(zbar_1 z_2)
        im12 = x1 * y2 - y1 * x2  # Im(zbar_1 z_2)
        h = {}
        for a in range(2):
            h[(a, a)] = ((den - sign * zz[a][a]) * inv2, 0.0)
        h[(0, 1)] = (-sign * re12 * inv2, -sign * im12 * inv2)
        h[(1, 0)] = (-sign * re12 * inv2, sign * im12 * inv2)
        g = [[0.0] * 4 for _ in range(4)]
        for a in range(2):
            for b in range(2):
                p, q = h[(a, b)]
                # g(u, v) = Re sum h_ab u_a conj(v_b): block [[p, q], [-q, p]]
                g[2 * a][2 * b] = p
                g[2 * a][2 * b + 1] = q
                g[2 * a + 1][2 * b] = -q
                g[2 * a + 1][2 * b + 1] = p
        return g

    return metric


def _cp2_to_chart(u):
    rho, beta, p1, p2 = u.T
    R = np.tan(rho)
    x = np.stack(
        [R * np.cos(beta) * np.cos(p1), R * np.cos(beta) * np.sin(p1),
         R * np.sin(beta) * np.cos(p2), R * np.sin(beta) * np.sin(p2)],
        axis=1,
    )
    jac = R**3 * np.cos(beta) * np.sin(beta) / np.cos(rho) ** 2
    return x, jac


def cp2_fs():
    return CatalogEntry(
        id="cp2_fs",
        params={},
        description=ChartMetric(_hermitian_metric(+1.0), name="cp2_fs"),
        J=CompatibleJ(field=_standard_j_field),
        flags=dict(kahler=True, einstein=True, constant_s=True, delta_wplus_zero=True, self_dual=True,
                   almost_kahler=True, rational_or_ruled=True),
        certification={"delta_wplus_zero": "Kähler-Einstein (Einstein implies harmonic W+)"},
        chi=3,
        tau=1,
        volume=Volume(Fraction(1, 2), 2),
        homogeneous=True,
        reference_point=(0.3, -0.2, 0.5, 0.1),
        sample_lower=(-2.0,) * 4,
        sample_upper=(2.0,) * 4,
        quadrature=Quadrature(
            (Axis("gauss", 0.0, np.pi / 2), Axis("gauss", 0.0, np.pi / 2), Axis("periodic", 0.0, TWO_PI),
             Axis("periodic", 0.0, TWO_PI)),
            to_chart=_cp2_to_chart,
        ),
        constants={"s": 24.0, "s_star": 24.0},
    )


def ch2_chart():
    return CatalogEntry(
        id="ch2_chart",
        params={},
        description=ChartMetric(_hermitian_metric(-1.0), lower=(-0.75,) * 4, upper=(0.75,) * 4,
                                name="ch2_chart"),
        J=CompatibleJ(field=_standard_j_field),
        flags=dict(kahler=True, einstein=True, constant_s=True, delta_wplus_zero=True, self_dual=True,
                   almost_kahler=True, pointwise_only=True),
        certification={"delta_wplus_zero": "Kähler-Einstein (Einstein implies harmonic W+)"},
        chi=None,
        tau=None,
        volume=None,
        compact=False,
        homogeneous=True,
        reference_point=(0.1, 0.2, -0.1, 0.3),
        sample_lower=(-0.45,) * 4,
        sample_upper=(0.45,) * 4,
        constants={"s": -24.0, "s_star": -24.0},
    )


def h4_hyperbolic():
    def metric(x0, x1, x2, x3):
        f = 1.0 / (x3 * x3)
        return _diag(f, f, f, f)

    return CatalogEntry(
        id="h4_hyperbolic",
        params={},
        description=ChartMetric(metric, lower=(-np.inf, -np.inf, -np.inf, 1e-6), name="h4_hyperbolic"),
        J=None,
        flags=dict(kahler=False, einstein=True, constant_s=True, delta_wplus_zero=True, self_dual=True,
                   almost_kahler=False, pointwise_only=True),
        certification={"delta_wplus_zero": "Einstein metric (constant curvature), W+ = 0"},
        chi=None,
        tau=None,
        volume=None,
        compact=False,
        homogeneous=True,
        reference_point=(0.0, 0.0, 0.0, 1.0),
        sample_lower=(-1.0, -1.0, -1.0, 0.5),
        sample_upper=(1.0, 1.0, 1.0, 2.0),
        constants={"s": -12.0},
    )


# ---------------------------------------------------------------------------
# Kodaira-Thurston nilmanifold (Heisenberg x R) / lattice


def kodaira_thurston_structure():
    """Structure constants of the frame f1..f4 with df^4 = f^1 ^ f^3.

    The frame is ordered so that omega = f^12 + f^34 is self-dual for the
    orientation f^1234, i.e. [f1, f3] = -f4.
    """
    c = np.zeros((4, 4, 4))
    c[3, 0, 2] = -1.0
    c[3, 2, 0] = 1.0
    return c


def _kt_chart_metric(y1, y2, y3, y4):
    # coframe dy1, dy2, dy3, dy4 + y1 dy3
    g = _diag(1.0, 1.0, 1.0, 1.0)
    g[2][2] = 1.0 + y1 * y1
    g[2][3] = y1
    g[3][2] = y1
    return g


def _kt_chart_j(y1, y2, y3, y4):
    # J = F Jstd F^-1 with frame vectors F3 = d3 - y1 d4, F4 = d4
    J = [[0.0] * 4 for _ in range(4)]
    J[1][0] = 1.0
    J[0][1] = -1.0
    # J d3 = J(F3 + y1 F4) = F4 - y1 F3 = -y1 d3 + (1 + y1^2) d4
    J[2][2] = -y1
    J[3][2] = 1.0 + y1 * y1
    # J d4 = J F4 = -F3 = -d3 + y1 d4
    J[2][3] = -1.0
    J[3][3] = y1
    return J


def kodaira_thurston(chart=0):
    if int(chart) not in (0, 1):
        raise ValueError("chart must be 0 or 1")
    chart = bool(int(chart))
    if chart:
        desc = ChartMetric(_kt_chart_metric, name="kodaira_thurston_chart")
        J = CompatibleJ(field=_kt_chart_j)
        quad = Quadrature(tuple(Axis("periodic", 0.0, 1.0) for _ in range(4)))
    else:
        desc = FrameMetric(kodaira_thurston_structure(), volume=1.0, name="kodaira_thurston")
        J = CompatibleJ(matrix=STANDARD_J.copy())
        quad = None
    return CatalogEntry(
        id="kodaira_thurston",
        params={"chart": int(chart)},
        description=desc,
        J=J,
        flags=dict(kahler=False, einstein=False, constant_s=True, delta_wplus_zero=None, self_dual=False,
                   almost_kahler=True),
        certification={"delta_wplus_zero": "unknown; reports are observational"},
        chi=0,
        tau=0,
        volume=Volume(Fraction(1), 0),
        homogeneous=True,
        reference_point=(0.0, 0.0, 0.0, 0.0),
        sample_lower=(0.0,) * 4,
        sample_upper=(1.0,) * 4,
        quadrature=quad,
        constants={},
    )


_BUILDERS = {
    "t4_flat": t4_flat,
    "s4_round": s4_round,
    "s2xs2": s2xs2,
    "cp2_fs": cp2_fs,
    "kodaira_thurston": kodaira_thurston,
    "h4_hyperbolic": h4_hyperbolic,
    "ch2_chart": ch2_chart,
}

ENTRY_IDS = tuple(_BUILDERS)


def load(entry_id, **params):
    """Build a catalog entry; ``params`` are entry parameters such as ``r``, ``a``, ``b``."""
    try:
        builder = _BUILDERS[entry_id]
    except KeyError:
        raise UnknownEntryError(f"unknown catalog entry {entry_id!r}; known: {', '.join(ENTRY_IDS)}") from None
    try:
        entry = builder(**params)
    except (TypeError, ValueError) as exc:
        raise InvalidParameterError(f"{entry_id}: bad parameters {params}: {exc}") from None
    check_flags(entry)
    return entry


def check_flags(entry):
    """Structural flags must be mutually consistent."""
    f = entry.flags
    ak = f.get("almost_kahler", entry.J is not None)
    if f.get("einstein") and ak and not f.get("delta_wplus_zero"):
        raise ValueError(f"{entry.id}: Einstein almost-Kähler entry must certify delta W+ = 0")
    if f.get("kahler") and f.get("constant_s") and not f.get("delta_wplus_zero"):
        raise ValueError(f"{entry.id}: Kähler constant-s entry must certify delta W+ = 0")
    if f.get("delta_wplus_zero") and "delta_wplus_zero" not in entry.certification:
        raise ValueError(f"{entry.id}: certified flag without justification")

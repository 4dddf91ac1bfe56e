"""Quadrature over catalog manifolds and the integral identities and inequalities.

Integrals are sums of pointwise curvature quantities against quadrature
weights that already include the Riemannian volume density.  Every functional
takes a :class:`~akweyl.catalog.CatalogEntry` and a :class:`QuadratureScheme`.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import almost_kahler as ak
from . import geometry
from . import sd_algebra as sd

PI2 = np.pi**2
EINSTEIN_TOL = 1e-9
_CHUNK = 4096


class HypothesisViolation(ValueError):
    """The entry does not satisfy the hypothesis the identity is stated under."""


class NoStructureError(ValueError):
    """The functional needs an almost-Kähler structure the entry does not carry."""


@dataclass
class QuadratureScheme:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    resolution: int
    _table: dict = field(default_factory=dict, repr=False)

    @property
    def volume(self):
        return fsum(self.weights)


def fsum(values):
    """Compensated sum, independent of summation order to rounding."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def _axis_rule(axis, n):
    if axis.kind == "periodic":
        h = (axis.upper - axis.lower) / n
        return axis.lower + h * np.arange(n), np.full(n, h)
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (axis.upper - axis.lower)
    return axis.lower + half * (x + 1.0), half * w


def chart_scheme(entry, n):
    """Product rule with ``n`` nodes per axis, weights times volume density."""
    if entry.quadrature is None or entry.description.kind != "chart":
        raise ValueError(f"{entry.id} has no chart quadrature")
    rules = [_axis_rule(a, n) for a in entry.quadrature.axes]
    mesh = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wmesh = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    u = np.stack([m.ravel() for m in mesh], axis=1)
    w = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
    if entry.quadrature.to_chart is not None:
        x, jac = entry.quadrature.to_chart(u)
    else:
        x, jac = u, np.ones(len(u))
    density = np.sqrt(np.linalg.det(entry.description.evaluate(x)))
    return QuadratureScheme(nodes=x, weights=w * jac * density, kind="product", resolution=n)


def homogeneous_scheme(entry):
    """One node carrying the whole (exact) volume."""
    if not entry.homogeneous or entry.volume is None:
        raise ValueError(f"{entry.id} has no homogeneous shortcut")
    return QuadratureScheme(
        nodes=np.asarray([entry.reference_point], dtype=float),
        weights=np.array([entry.volume.value]),
        kind="homogeneous",
        resolution=1,
    )


def scheme(entry, n=None):
    """Homogeneous shortcut when ``n`` is None, chart product rule otherwise."""
    return homogeneous_scheme(entry) if n is None else chart_scheme(entry, n)


def _evaluate(entry, nodes):
    pg = geometry.riemann(entry.description, nodes)
    inv = geometry.invariants(pg)
    out = dict(inv)
    if entry.J is not None:
        data = ak.structure(entry.description, entry.J, nodes)
        star = ak.s_star(entry.description, entry.J, nodes, data=data)
        q, perp2, _, _ = ak.wplus_omega_terms(data)
        blair = ak.blair_curvature(entry.description, entry.J, nodes, data=data)
        out.update(
            s_star=star.s_star,
            nabla_omega2=star.nabla_omega_norm2,
            wq=q,
            wperp2=perp2,
            F_plus2=sd.norm2(blair.F_plus),
            F_minus2=sd.norm2(blair.F_minus),
            F_dot_omega=sd.inner(blair.iF, data.omega),
            blair_residual=blair.residual,
        )
    return out


def node_table(entry, sch):
    """Pointwise quantities at every node of ``sch`` (cached on the scheme)."""
    key = (entry.id, tuple(sorted(entry.params.items())))
    if key not in sch._table:
        parts = [_evaluate(entry, sch.nodes[i:i + _CHUNK]) for i in range(0, len(sch.nodes), _CHUNK)]
        sch._table[key] = {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}
    return sch._table[key]


def integrate(entry, sch, fn):
    """Integral of ``fn(table)`` over the manifold."""
    t = node_table(entry, sch)
    return fsum(fn(t) * sch.weights)


def _need_j(entry):
    if entry.J is None:
        raise NoStructureError(f"{entry.id} carries no almost-Kähler structure")


# ---------------------------------------------------------------------------
# characteristic numbers


def gauss_bonnet_integrand(t):
    return (t["s"] ** 2 / 24.0 + t["wplus2"] + t["wminus2"] - t["ric0_2"] / 2.0) / (8.0 * PI2)


def signature_integrand(t):
    return (t["wplus2"] - t["wminus2"]) / (12.0 * PI2)


def euler_characteristic(entry, sch):
    return integrate(entry, sch, gauss_bonnet_integrand)


def signature(entry, sch):
    return integrate(entry, sch, signature_integrand)


def chi_minus_3tau(entry, sch):
    """The combined integrand (1/8 pi^2)(s^2/24 - |W+|^2 + 3|W-|^2 - |ric0|^2/2)."""
    return integrate(
        entry,
        sch,
        lambda t: (t["s"] ** 2 / 24.0 - t["wplus2"] + 3.0 * t["wminus2"] - t["ric0_2"] / 2.0) / (8.0 * PI2),
    )


def two_chi_plus_3tau(entry, sch):
    """(1/4 pi^2) int (s^2/24 + 2|W+|^2 - |ric0|^2/2)."""
    return integrate(entry, sch, lambda t: (t["s"] ** 2 / 24.0 + 2.0 * t["wplus2"] - t["ric0_2"] / 2.0) / (4.0 * PI2))


def c1_dot_omega(entry, sch):
    """(1/4 pi) int (s + s*)/2."""
    _need_j(entry)
    return integrate(entry, sch, lambda t: (t["s"] + t["s_star"]) / 2.0) / (4.0 * np.pi)


def c1_dot_omega_blair(entry, sch):
    """(1/2 pi) int <iF, omega>, the same pairing from the Blair curvature."""
    _need_j(entry)
    return integrate(entry, sch, lambda t: t["F_dot_omega"]) / (2.0 * np.pi)


def c1_squared(entry, sch):
    """``(2 chi + 3 tau from curvature, (1/4 pi^2) int |iF+|^2 - |iF-|^2)``."""
    _need_j(entry)
    blair = integrate(entry, sch, lambda t: t["F_plus2"] - t["F_minus2"]) / (4.0 * PI2)
    topo = 2.0 * euler_characteristic(entry, sch) + 3.0 * signature(entry, sch)
    return topo, blair


# ---------------------------------------------------------------------------
# identities and inequalities


def prop1_residual(entry, sch):
    """``(int s W+(w,w), 8 int (|W+|^2 - 1/2 |W+(w)^perp|^2))``.

    The equality is claimed only for harmonic W+; entries without that
    certification still get both numbers.
    """
    _need_j(entry)
    lhs = integrate(entry, sch, lambda t: t["s"] * t["wq"])
    rhs = 8.0 * integrate(entry, sch, lambda t: t["wplus2"] - 0.5 * t["wperp2"])
    return lhs, rhs


def prop2_value(entry, sch):
    """int W+(w,w) (W+(w,w) - s/3); nonpositive under harmonic W+."""
    _need_j(entry)
    return integrate(entry, sch, lambda t: t["wq"] * (t["wq"] - t["s"] / 3.0))


def thm3_gap(entry, sch):
    """int s^2/24 - int |W+|^2."""
    return integrate(entry, sch, lambda t: t["s"] ** 2 / 24.0 - t["wplus2"])


def kahler_gap_lower_bound(entry, sch):
    """int 9 (s* - s)^2 / 96, the lower bound for thm3_gap under harmonic W+."""
    _need_j(entry)
    return integrate(entry, sch, lambda t: 9.0 * (t["s_star"] - t["s"]) ** 2 / 96.0)


def _require_einstein(entry, sch):
    t = node_table(entry, sch)
    worst = float(np.max(t["ric0_2"]))
    if worst > EINSTEIN_TOL:
        raise HypothesisViolation(f"{entry.id} is not Einstein (max |ric0|^2 = {worst:.3e})")


def cor3_residual(entry, sch):
    """``(int s s*/8 - s^2/24, int 2|W+|^2 - |W+(w)^perp|^2)`` on Einstein almost-Kähler entries."""
    _need_j(entry)
    _require_einstein(entry, sch)
    lhs = integrate(entry, sch, lambda t: t["s"] * t["s_star"] / 8.0 - t["s"] ** 2 / 24.0)
    rhs = integrate(entry, sch, lambda t: 2.0 * t["wplus2"] - t["wperp2"])
    return lhs, rhs


def _topology(entry):
    if entry.chi is None:
        raise ValueError(f"{entry.id} records no reference topology")
    return 2 * entry.chi + 3 * entry.tau


def lebrun_inequality_check(entry, sch):
    """``(int |W+|^2, 4 pi^2/3 (2 chi + 3 tau))`` with the reference topology."""
    return integrate(entry, sch, lambda t: t["wplus2"]), 4.0 * PI2 / 3.0 * _topology(entry)


def corollary6_hypothesis(entry, sch):
    """``(int s^2, 32 pi^2 (2 chi + 3 tau))``."""
    return integrate(entry, sch, lambda t: t["s"] ** 2), 32.0 * PI2 * _topology(entry)


# ---------------------------------------------------------------------------
# exact multiples of pi^k on homogeneous entries


def exact_value(entry, fn, max_denominator=10**6, tol=1e-9):
    """Recognize ``fn(table)`` at the reference point as a rational and scale by the exact volume.

    Returns ``(Fraction, pi_power)``; raises ``ValueError`` when the pointwise
    constant is not recognizably rational.
    """
    sch = homogeneous_scheme(entry)
    value = float(fn(node_table(entry, sch))[0])
    frac = Fraction(value).limit_denominator(max_denominator)
    if abs(float(frac) - value) > tol:
        raise ValueError(f"{value!r} is not recognizably rational")
    return frac * entry.volume.coeff, entry.volume.pi_power


def prop1_exact(entry):
    """Both sides of the ``int s W+(w, w)`` identity as exact multiples of pi^k."""
    lhs = exact_value(entry, lambda t: t["s"] * t["wq"])
    rhs = exact_value(entry, lambda t: 8.0 * (t["wplus2"] - 0.5 * t["wperp2"]))
    return lhs, rhs

"""Integral reports, verification checks, and their JSON/CSV serializations.

JSON schema ``akweyl.integral_report/1``::

    {
      "schema": "akweyl.integral_report/1",
      "entry": str, "params": {str: number}, "flags": {...}, "certification": {...},
      "resolutions": [int, ...],          # chart quadrature nodes per axis
      "fields": {
        name: {"value": float, "error": float, "resolution": int | "homogeneous",
               "provenance": "quadrature" | "homogeneous-shortcut" | "oracle",
               "by_resolution": {str(n): float}, "reference": float | null}
        | {"status": "refused" | "not_applicable", "reason": str}
      },
      "checks": [{"name": str, "passed": bool, "value": float, "reference": float,
                  "tolerance": float, "observational": bool, "section": str}],
      "refusals": [str, ...]
    }

``error`` is the change between the two finest resolutions (zero for the
homogeneous shortcut, whose only error is rounding).  The CSV form has one row
per (entry, resolution) with a column per numeric field.
"""
import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import almost_kahler as ak
from . import functionals as F
from . import geometry, weitzenboeck
from . import sd_algebra as sd

SCHEMA = "akweyl.integral_report/1"

DEFAULT_TOLERANCES = {
    "topology_shortcut": 1e-10,
    "topology_chart": 1e-4,
    "wplus_identity": 1e-6,
    "scalar_weyl": 1e-6,
    "einstein_identity": 1e-6,
    "c1_squared": 1e-3,
    "s_star": 1e-8,
    "pointwise": 1e-8,
    "symmetry": 1e-9,
    "order_low": 1.8,
    "order_high": 2.2,
}

FIELDS = (
    "chi", "tau", "c1_dot_omega", "c1_squared_topological", "c1_squared_blair", "prop1_lhs",
    "prop1_rhs", "prop2_value", "thm3_gap", "cor3_lhs", "cor3_rhs", "lebrun_wplus_vs_topology",
    "corollary6_s2", "chi_minus_3tau",
)


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    reference: float
    tolerance: float
    observational: bool = False
    section: str = "integral"

    def as_dict(self):
        return {
            "name": self.name, "passed": bool(self.passed), "value": float(self.value),
            "reference": float(self.reference), "tolerance": float(self.tolerance),
            "observational": self.observational, "section": self.section,
        }


@dataclass
class IntegralReport:
    entry: object
    resolutions: list
    fields: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    refusals: list = field(default_factory=list)

    def as_dict(self):
        e = self.entry
        return {
            "schema": SCHEMA,
            "entry": e.id,
            "params": dict(e.params),
            "flags": dict(e.flags),
            "certification": dict(e.certification),
            "resolutions": list(self.resolutions),
            "fields": self.fields,
            "checks": [c.as_dict() for c in self.checks],
            "refusals": list(self.refusals),
        }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    @property
    def passed(self):
        return all(c.passed for c in self.checks if not c.observational)


def _field_values(entry, sch):
    """All report fields on one scheme; refusals come back as strings."""
    out = {}

    def put(name, fn):
        try:
            out[name] = float(fn())
        except F.HypothesisViolation as exc:
            out[name] = ("refused", str(exc))
        except (F.NoStructureError, ValueError) as exc:
            out[name] = ("not_applicable", str(exc))

    put("chi", lambda: F.euler_characteristic(entry, sch))
    put("tau", lambda: F.signature(entry, sch))
    put("chi_minus_3tau", lambda: F.chi_minus_3tau(entry, sch))
    put("c1_dot_omega", lambda: F.c1_dot_omega(entry, sch))
    put("c1_squared_topological", lambda: F.c1_squared(entry, sch)[0])
    put("c1_squared_blair", lambda: F.c1_squared(entry, sch)[1])
    put("prop1_lhs", lambda: F.prop1_residual(entry, sch)[0])
    put("prop1_rhs", lambda: F.prop1_residual(entry, sch)[1])
    put("prop2_value", lambda: F.prop2_value(entry, sch))
    put("thm3_gap", lambda: F.thm3_gap(entry, sch))
    put("cor3_lhs", lambda: F.cor3_residual(entry, sch)[0])
    put("cor3_rhs", lambda: F.cor3_residual(entry, sch)[1])
    put("lebrun_wplus_vs_topology", lambda: F.lebrun_inequality_check(entry, sch)[0])
    put("corollary6_s2", lambda: F.corollary6_hypothesis(entry, sch)[0])
    return out


_REFERENCES = {
    "lebrun_wplus_vs_topology": lambda e: 4.0 * F.PI2 / 3.0 * e.c1_squared,
    "corollary6_s2": lambda e: 32.0 * F.PI2 * e.c1_squared,
    "c1_squared_topological": lambda e: float(e.c1_squared),
    "chi": lambda e: float(e.chi),
    "tau": lambda e: float(e.tau),
}


def schemes_for(entry, resolutions):
    """Chart schemes at each resolution, or the homogeneous shortcut when no chart rule exists."""
    if entry.quadrature is not None and entry.description.kind == "chart" and resolutions:
        return [(n, F.chart_scheme(entry, n)) for n in resolutions]
    return [("homogeneous", F.homogeneous_scheme(entry))]


def build_report(entry, resolutions=(6, 8), tolerances=None, sections=("pointwise", "integral")):
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    report = IntegralReport(entry=entry, resolutions=list(resolutions))
    if "pointwise" in sections or "all" in sections:
        report.checks.extend(pointwise_checks(entry, tol))
    if ("integral" in sections or "all" in sections) and entry.compact:
        _integral_section(entry, resolutions, tol, report)
    elif not entry.compact:
        report.refusals.append(f"{entry.id} is noncompact: integral sections skipped (pointwise only)")
    if ("weitzenboeck" in sections or "all" in sections) and entry.id in ("t4_flat", "s2xs2"):
        levels = [n for n in resolutions if n >= weitzenboeck.MIN_NODES] or [8, 12, 16]
        if len(levels) < 3:
            levels = [8, 12, 16]
        report.checks.extend(weitzenboeck_checks(entry, levels, tol))
    return report


def _integral_section(entry, resolutions, tol, report):
    per = [(label, _field_values(entry, sch)) for label, sch in schemes_for(entry, resolutions)]
    shortcut = None
    if entry.homogeneous and entry.volume is not None:
        shortcut = _field_values(entry, F.homogeneous_scheme(entry))
    for name in FIELDS:
        label, finest = per[-1]
        v = finest[name]
        if isinstance(v, tuple):
            report.fields[name] = {"status": v[0], "reason": v[1]}
            if v[0] == "refused" and v[1] not in report.refusals:
                report.refusals.append(v[1])
            continue
        by_res = {str(lbl): vals[name] for lbl, vals in per}
        err = abs(per[-1][1][name] - per[-2][1][name]) if len(per) > 1 else 0.0
        rec = {
            "value": v,
            "error": err,
            "resolution": label,
            "provenance": "homogeneous-shortcut" if label == "homogeneous" else "quadrature",
            "by_resolution": by_res,
            "reference": _REFERENCES[name](entry) if name in _REFERENCES and entry.chi is not None else None,
        }
        if shortcut is not None and not isinstance(shortcut[name], tuple):
            rec["shortcut"] = shortcut[name]
        report.fields[name] = rec
    report.checks.extend(integral_checks(entry, report.fields, tol))


def _val(fields, name, key="value"):
    rec = fields.get(name, {})
    return rec.get(key) if "value" in rec else None


def integral_checks(entry, fields, tol):
    checks = []
    obs = not entry.flags.get("delta_wplus_zero")

    def topo_tol(rec):
        return tol["topology_shortcut"] if rec["provenance"] == "homogeneous-shortcut" else tol["topology_chart"]

    for name in ("chi", "tau"):
        rec = fields[name]
        ref = float(getattr(entry, name))
        checks.append(Check(name, abs(rec["value"] - ref) <= topo_tol(rec), rec["value"], ref, topo_tol(rec)))
        if "shortcut" in rec:
            checks.append(Check(f"{name}_shortcut", abs(rec["shortcut"] - ref) <= tol["topology_shortcut"],
                                rec["shortcut"], ref, tol["topology_shortcut"]))
    if entry.J is None:
        if entry.id == "s4_round":
            gap = fields["thm3_gap"]["value"]
            ref = 16.0 * F.PI2  # s^2/24 * vol is scale invariant
            gap_tol = tol["scalar_weyl"] + fields["thm3_gap"]["error"]
            checks.append(Check("scalar_weyl_gap_positive_outside_hypotheses", abs(gap - ref) <= gap_tol,
                                gap, ref, gap_tol, observational=True))
        return checks
    lhs, rhs = _val(fields, "prop1_lhs"), _val(fields, "prop1_rhs")
    scale = max(abs(lhs), 1.0)
    checks.append(Check("wplus_integral_identity", abs(lhs - rhs) <= tol["wplus_identity"] * scale, lhs - rhs, 0.0,
                        tol["wplus_identity"] * scale, observational=obs))
    p2 = _val(fields, "prop2_value")
    p2_err = fields["prop2_value"]["error"] + tol["wplus_identity"]
    checks.append(Check("wplus_quadratic_integral_nonpositive", p2 <= p2_err, p2, 0.0, p2_err, observational=obs))
    gap = _val(fields, "thm3_gap")
    gap_tol = fields["thm3_gap"]["error"] + tol["scalar_weyl"]
    checks.append(Check("scalar_weyl_inequality", gap >= -gap_tol, gap, 0.0, gap_tol, observational=obs))
    if entry.flags.get("kahler") and entry.flags.get("constant_s"):
        checks.append(Check("scalar_weyl_equality_kahler_csc", abs(gap) <= tol["scalar_weyl"], gap, 0.0, tol["scalar_weyl"]))
    if "value" in fields["cor3_lhs"]:
        a, b = fields["cor3_lhs"]["value"], fields["cor3_rhs"]["value"]
        checks.append(Check("einstein_star_identity", abs(a - b) <= tol["einstein_identity"], a - b, 0.0, tol["einstein_identity"]))
    topo, blair = _val(fields, "c1_squared_topological"), _val(fields, "c1_squared_blair")
    checks.append(Check("c1_squared_blair", abs(topo - blair) <= tol["c1_squared"], blair, topo,
                        tol["c1_squared"]))
    if entry.flags.get("rational_or_ruled"):
        w2 = _val(fields, "lebrun_wplus_vs_topology")
        bound = 4.0 * F.PI2 / 3.0 * entry.c1_squared
        checks.append(Check("wplus_topology_bound", w2 >= bound - tol["scalar_weyl"], w2, bound, tol["scalar_weyl"]))
    return checks


def pointwise_checks(entry, tol, npoints=100, seed=0):
    pts = entry.sample_points(npoints, seed)
    pg = geometry.riemann(entry.description, pts)
    checks = []
    sym = max(geometry.symmetry_residuals(pg).values())
    checks.append(Check("riemann_symmetries", sym <= tol["symmetry"], sym, 0.0, tol["symmetry"], section="pointwise"))
    blocks = geometry.decompose(pg)
    reasm = float(np.max(np.abs(blocks.reassemble() - blocks.operator)))
    checks.append(Check("block_reassembly", reasm <= tol["symmetry"], reasm, 0.0, tol["symmetry"],
                        section="pointwise"))
    if "s" in entry.constants:
        dev = float(np.max(np.abs(pg.s - entry.constants["s"])))
        checks.append(Check("scalar_curvature", dev <= tol["pointwise"], dev, 0.0, tol["pointwise"],
                            section="pointwise"))
    if entry.J is None:
        return checks
    data = ak.structure(entry.description, entry.J, pts)
    star = ak.s_star(entry.description, entry.J, pts, data=data, tol=np.inf)
    mis = float(np.max(star.mismatch))
    checks.append(Check("s_star_double_computation", mis <= tol["s_star"], mis, 0.0, tol["s_star"],
                        section="pointwise"))
    wq = float(np.max(ak.w_quadratic_identity_residual(entry.description, entry.J, pts, data=data)))
    checks.append(Check("wplus_quadratic_identity", wq <= tol["pointwise"], wq, 0.0, tol["pointwise"],
                        section="pointwise"))
    if entry.flags.get("kahler"):
        q, perp2, w2, _ = ak.wplus_omega_terms(data)
        s = pg.s
        dev = max(
            float(np.max(star.nabla_omega_norm2)),
            float(np.max(np.sqrt(perp2))),
            float(np.max(np.abs(q - s / 3.0))),
            float(np.max(np.abs(w2 - s**2 / 24.0))),
        )
        checks.append(Check("kahler_pointwise", dev <= tol["pointwise"], dev, 0.0, tol["pointwise"],
                            section="pointwise"))
    if entry.flags.get("kahler") and entry.flags.get("einstein"):
        bl = ak.blair_curvature(entry.description, entry.J, pts, data=data)
        target = sd.project_plus(data.omega) * (pg.s / 4.0)[:, None]
        dev = float(np.max(np.abs(bl.F_plus - target)) + np.max(np.abs(bl.F_minus)))
        checks.append(Check("blair_kahler_einstein", dev <= tol["pointwise"], dev, 0.0, tol["pointwise"],
                            section="pointwise"))
    if not entry.flags.get("kahler"):
        gap = float(np.min(star.nabla_omega_norm2))
        checks.append(Check("non_kahler_witness", gap > 0.0, gap, 0.0, 0.0, observational=True,
                            section="pointwise"))
    return checks


def weitzenboeck_checks(entry, levels, tol):
    desc = entry.description
    checks = []
    if entry.id == "t4_flat":
        tab = weitzenboeck.convergence(desc, weitzenboeck.t4_bump_form, weitzenboeck.T4_AXES, levels)
        ok = isinstance(tab.order, float) and tol["order_low"] <= tab.order <= tol["order_high"]
        checks.append(Check("weitzenboeck_order_t4_bump", ok, tab.order if isinstance(tab.order, float) else 0.0,
                            2.0, tol["order_high"] - 2.0, section="weitzenboeck"))
        tab = weitzenboeck.convergence(desc, weitzenboeck.t4_constant_form, weitzenboeck.T4_AXES, levels)
        worst = max(tab.residuals)
        checks.append(Check("weitzenboeck_constant_floor", worst <= weitzenboeck.FLOOR, worst, 0.0,
                            weitzenboeck.FLOOR, section="weitzenboeck"))
    else:
        a, b = entry.params["a"], entry.params["b"]
        tab = weitzenboeck.convergence(desc, weitzenboeck.s2xs2_kahler_form(a, b), weitzenboeck.S2XS2_AXES, levels)
        worst = max(tab.residuals)
        checks.append(Check("weitzenboeck_kahler_floor", worst <= weitzenboeck.FLOOR, worst, 0.0,
                            weitzenboeck.FLOOR, section="weitzenboeck"))
    return checks


def csv_rows(report):
    e = report.entry
    rows = []
    labels = []
    for rec in report.fields.values():
        if "by_resolution" in rec:
            labels = list(rec["by_resolution"])
            break
    for label in labels:
        row = {"entry": e.id, "params": ";".join(f"{k}={v}" for k, v in sorted(e.params.items())),
               "resolution": label}
        for name in FIELDS:
            rec = report.fields.get(name, {})
            row[name] = rec.get("by_resolution", {}).get(label, "") if "by_resolution" in rec else ""
        rows.append(row)
    return rows


def to_csv(report):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["entry", "params", "resolution", *FIELDS], lineterminator="\n")
    writer.writeheader()
    for row in csv_rows(report):
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()

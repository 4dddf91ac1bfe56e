"""Command-line front end: ``akweyl decompose | verify | converge``."""
import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import catalog, geometry, report, weitzenboeck
from . import sd_algebra as sd

SECTIONS = ("pointwise", "integral", "weitzenboeck", "all")
FORMATS = ("json", "csv", "text")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    entry: str
    params: dict = field(default_factory=dict)
    resolutions: list = field(default_factory=lambda: [6, 8])
    sections: list = field(default_factory=lambda: ["pointwise", "integral"])
    out: str = None
    tol: dict = field(default_factory=dict)
    format: str = "text"
    points: int = 4

    def validate(self):
        if self.entry not in catalog.ENTRY_IDS:
            raise ConfigError(f"unknown entry {self.entry!r}; known: {', '.join(catalog.ENTRY_IDS)}")
        if not self.resolutions:
            raise ConfigError("at least one resolution is required")
        if any(int(n) < 1 for n in self.resolutions):
            raise ConfigError("resolutions must be positive")
        for name, value in self.tol.items():
            if name not in report.DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {name!r}; known: {', '.join(report.DEFAULT_TOLERANCES)}")
            if not value > 0:
                raise ConfigError(f"tolerance {name} must be positive")
        bad = [s for s in self.sections if s not in SECTIONS]
        if bad:
            raise ConfigError(f"unknown sections {bad}; choose from {SECTIONS}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        return self


def _number(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _pairs(items, what, numeric=True):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"{what} must look like name=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = _number(v.strip())
        except ValueError:
            if not numeric:
                out[k.strip()] = v.strip()
                continue
            raise ConfigError(f"{what} {k!r} needs a numeric value, got {v!r}") from None
    return out


def build_config(args, default_resolutions):
    base = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    entry = args.entry or base.get("entry")
    if entry is None:
        raise ConfigError("--entry is required (or 'entry' in the config file)")
    params = dict(base.get("param", {}))
    params.update(_pairs(args.param, "--param", numeric=False))
    tol = dict(base.get("tol", {}))
    tol.update(_pairs(args.tol, "--tol"))
    if args.resolutions:
        try:
            resolutions = [int(x) for x in args.resolutions.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"bad --resolutions {args.resolutions!r}") from None
    else:
        resolutions = list(base.get("resolutions", default_resolutions))
    sections = args.sections.split(",") if args.sections else list(base.get("sections", ["pointwise", "integral"]))
    return RunConfig(
        entry=entry,
        params=params,
        resolutions=resolutions,
        sections=sections,
        out=args.out or base.get("out"),
        tol=tol,
        format=args.format or base.get("format", "text"),
        points=int(params.pop("points", base.get("points", 4))),
    ).validate()


def _emit(text, cfg, filename):
    if cfg.out:
        path = Path(cfg.out)
        path.mkdir(parents=True, exist_ok=True)
        (path / filename).write_text(text)
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


def _entry_params(cfg):
    return {k: v for k, v in cfg.params.items() if k not in ("form",)}


def cmd_decompose(cfg):
    entry = catalog.load(cfg.entry, **_entry_params(cfg))
    pts = entry.sample_points(cfg.points, seed=0)
    pg = geometry.riemann(entry.description, pts)
    blocks = geometry.decompose(pg)
    eig = np.linalg.eigvalsh(blocks.wplus)[:, ::-1]
    ric0 = geometry.ric0_norm2(pg)
    wm = sd.w_norm2(blocks.wminus)
    rows = []
    for i in range(len(pts)):
        rows.append({
            "point": [float(x) for x in pts[i]],
            "s": float(blocks.s[i]),
            "wplus_eigenvalues": [float(x) for x in eig[i]],
            "ric0_norm2": float(ric0[i]),
            "wminus_norm2": float(wm[i]),
        })
    if cfg.format == "json":
        text = json.dumps({"entry": entry.id, "params": entry.params, "points": rows}, indent=2, sort_keys=True)
        _emit(text, cfg, "decompose.json")
    elif cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x0", "x1", "x2", "x3", "s", "wplus_1", "wplus_2", "wplus_3", "ric0_norm2", "wminus_norm2"])
        for r in rows:
            w.writerow([*map(repr, r["point"]), repr(r["s"]), *map(repr, r["wplus_eigenvalues"]),
                        repr(r["ric0_norm2"]), repr(r["wminus_norm2"])])
        _emit(buf.getvalue(), cfg, "decompose.csv")
    else:
        lines = [f"{entry.id} {entry.params}",
                 f"{'point':>34}  {'s':>10}  {'W+ eigenvalues':>32}  {'|ric0|^2':>10}  {'|W-|^2':>10}"]
        for r in rows:
            p = " ".join(f"{x:7.3f}" for x in r["point"])
            e = " ".join(f"{x:10.5f}" for x in r["wplus_eigenvalues"])
            lines.append(f"{p:>34}  {r['s']:10.5f}  {e:>32}  {r['ric0_norm2']:10.3e}  {r['wminus_norm2']:10.3e}")
        _emit("\n".join(lines), cfg, "decompose.txt")
    return 0


def _text_report(rep):
    lines = [f"{rep.entry.id} {rep.entry.params}  resolutions={rep.resolutions}"]
    for name, rec in rep.fields.items():
        if "value" in rec:
            lines.append(f"  {name:28s} {rec['value']: .12g}  (err {rec['error']:.2e}, {rec['provenance']})")
        else:
            lines.append(f"  {name:28s} {rec['status']}: {rec['reason']}")
    for c in rep.checks:
        tag = "PASS" if c.passed else "FAIL"
        if c.observational:
            tag = "obs " + ("ok" if c.passed else "no")
        lines.append(f"  [{tag}] {c.section}/{c.name}: value={c.value:.6g} ref={c.reference:.6g} tol={c.tolerance:.1e}")
    for r in rep.refusals:
        lines.append(f"  refused: {r}")
    lines.append("RESULT: " + ("PASS" if rep.passed else "FAIL"))
    return "\n".join(lines)


def cmd_verify(cfg):
    entry = catalog.load(cfg.entry, **_entry_params(cfg))
    rep = report.build_report(entry, cfg.resolutions, cfg.tol, cfg.sections)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{entry.id}.json").write_text(rep.to_json() + "\n")
        (out / f"{entry.id}.csv").write_text(report.to_csv(rep))
    text = {"json": rep.to_json, "csv": lambda: report.to_csv(rep), "text": lambda: _text_report(rep)}[cfg.format]()
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return 0 if rep.passed else 1


_FORMS = {
    ("t4_flat", "bump"): lambda e: (weitzenboeck.t4_bump_form, weitzenboeck.T4_AXES, True),
    ("t4_flat", "constant"): lambda e: (weitzenboeck.t4_constant_form, weitzenboeck.T4_AXES, False),
    ("s2xs2", "kahler"): lambda e: (weitzenboeck.s2xs2_kahler_form(e.params["a"], e.params["b"]),
                                    weitzenboeck.S2XS2_AXES, False),
    ("s2xs2", "transverse"): lambda e: (weitzenboeck.s2xs2_transverse_form(e.params["a"], e.params["b"]),
                                        weitzenboeck.S2XS2_AXES, True),
}
_DEFAULT_FORM = {"t4_flat": "bump", "s2xs2": "kahler"}


def cmd_converge(cfg):
    if len(cfg.resolutions) < 3:
        raise ConfigError("converge needs at least three resolutions")
    form = cfg.params.get("form", _DEFAULT_FORM.get(cfg.entry))
    key = (cfg.entry, form)
    if key not in _FORMS:
        raise ConfigError(f"no Weitzenböck test form {form!r} for {cfg.entry}; "
                          f"available: {sorted(k for k in _FORMS if k[0] == cfg.entry)}")
    entry = catalog.load(cfg.entry, **_entry_params(cfg))
    alpha, axes, expect_order = _FORMS[key](entry)
    try:
        tab = weitzenboeck.convergence(entry.description, alpha, axes, cfg.resolutions)
    except weitzenboeck.GridTooCoarseError as exc:
        raise ConfigError(str(exc)) from None
    lo = cfg.tol.get("order_low", report.DEFAULT_TOLERANCES["order_low"])
    hi = cfg.tol.get("order_high", report.DEFAULT_TOLERANCES["order_high"])
    if expect_order:
        ok = isinstance(tab.order, float) and lo <= tab.order <= hi
    else:
        ok = tab.order == "exact" or max(tab.residuals) <= weitzenboeck.FLOOR
    payload = {"entry": entry.id, "form": form, "params": entry.params, "rows": tab.rows(),
               "order": tab.order, "passed": ok}
    if cfg.format == "json":
        _emit(json.dumps(payload, indent=2, sort_keys=True), cfg, "converge.json")
    elif cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "h", "residual"])
        for r in tab.rows():
            w.writerow([r["n"], repr(r["h"]), repr(r["residual"])])
        w.writerow(["order", tab.order if tab.order == "exact" else repr(tab.order), ""])
        _emit(buf.getvalue(), cfg, "converge.csv")
    else:
        lines = [f"{entry.id} form={form}", f"{'n':>4}  {'h':>10}  {'residual':>12}"]
        lines += [f"{r['n']:4d}  {r['h']:10.5f}  {r['residual']:12.4e}" for r in tab.rows()]
        order = tab.order if tab.order == "exact" else f"{tab.order:.3f}"
        lines.append(f"fitted order: {order}  -> {'PASS' if ok else 'FAIL'}")
        _emit("\n".join(lines), cfg, "converge.txt")
    return 0 if ok else 1


def make_parser():
    parser = argparse.ArgumentParser(prog="akweyl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("decompose", "curvature blocks at sample points"),
        ("verify", "integral report with pass/fail per identity"),
        ("converge", "Weitzenböck residual convergence table"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--entry", choices=catalog.ENTRY_IDS)
        p.add_argument("--param", action="append", metavar="K=V", help="entry parameter, e.g. a=1 (repeatable)")
        p.add_argument("--resolutions", metavar="N1,N2,...")
        p.add_argument("--sections", metavar="S1,S2", help=f"subset of {','.join(SECTIONS)}")
        p.add_argument("--out", metavar="DIR")
        p.add_argument("--tol", action="append", metavar="NAME=VALUE")
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--config", metavar="FILE", help="JSON file with the same keys; flags win")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


_COMMANDS = {"decompose": (cmd_decompose, [6, 8]), "verify": (cmd_verify, [6, 8]),
             "converge": (cmd_converge, [8, 12, 16])}


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    fn, default_res = _COMMANDS[args.command]
    try:
        cfg = build_config(args, default_res)
        return fn(cfg)
    except (ConfigError, catalog.UnknownEntryError, catalog.InvalidParameterError) as exc:
        print(f"akweyl: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    ifscavity lambda  --lambda qbracket --q 0.5 --nmax 3
    ifscavity mandel  --lambda factorial --nbar 0.5 --plot q.svg --out q.csv
    ifscavity squeeze --nbar 0.3 --k 0.5 --mode both
    ifscavity evolve  --gt 2.5 --mode both
    ifscavity compare --nbar 0.5
    ifscavity figures --out-dir fig

Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numeric-domain
error (truncation, overdamped lossy regime, integration failure).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .errors import ConfigError, DomainError
from .evolution import Mode, evolve
from .ifs import Family
from .output import build_manifest, emit_csv, emit_json, fmt, write_atomic
from .sweep import FIGURES, SweepConfig, compare_modes, figure_preset, run_sweep
from .svg import emit_svg

DEFAULTS = {
    "lambda": "factorial",
    "q": 0.5,
    "nbar": 0.5,
    "zeta": 0.0,
    "k": 0.0,
    "g": 1.0,
    "gt_min": 0.0,
    "gt_max": 50.0,
    "points": 1001,
    "nmax": 40,
    "mode": "paper",
    "format": "csv",
    "coherent": "paper",
    "moments": "paper",
    "independent_oracle": False,
    "steps_per_unit": 200,
    "gt": 0.0,
    "plot": None,
    "out": None,
}
_TYPES = {
    "q": float,
    "nbar": float,
    "zeta": float,
    "k": float,
    "g": float,
    "gt_min": float,
    "gt_max": float,
    "points": int,
    "nmax": int,
    "steps_per_unit": int,
    "gt": float,
    "independent_oracle": bool,
}
_CHOICES = {
    "mode": ("paper", "oracle", "both"),
    "format": ("csv", "json"),
    "coherent": ("paper", "ifs"),
    "moments": ("paper", "exact"),
}
_LAMBDA_NAMES = {f.value: f for f in Family if f is not Family.CUSTOM}
_Q_FAMILIES = (Family.QBRACKET, Family.QBRACKET_FACTORIAL)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _common_flags(grid_only=False):
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    if not grid_only:
        p.add_argument("--config", metavar="PATH", help="JSON config file; flags override it")
        p.add_argument(
            "--lambda",
            dest="lambda",
            metavar="FAMILY",
            help="factorial | factorial2 | qbracket | qbracket-factorial | file:PATH",
        )
        p.add_argument("--q", type=float, help="deformation parameter for q families (default 0.5)")
        p.add_argument("--nbar", type=float, help="mean photon number of the initial field")
        p.add_argument("--zeta", type=float, help="phase of the initial field")
        p.add_argument("--k", type=float, help="cavity decay rate")
        p.add_argument("--g", type=float, help="coupling constant g1 = g2")
        p.add_argument("--coherent", choices=_CHOICES["coherent"], help="initial field style")
        p.add_argument("--format", choices=_CHOICES["format"])
        p.add_argument("--out", metavar="PATH", help="data file (stdout when absent)")
        p.add_argument("--plot", metavar="PATH.svg")
    p.add_argument("--gt-min", dest="gt_min", type=float)
    p.add_argument("--gt-max", dest="gt_max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--mode", choices=_CHOICES["mode"])
    p.add_argument("--moments", choices=_CHOICES["moments"], help="moment engine for the witnesses")
    p.add_argument("--independent-oracle", dest="independent_oracle", action="store_true")
    p.add_argument("--steps-per-unit", dest="steps_per_unit", type=int, help="RK4 steps per unit gt")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ifscavity", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common_flags()
    sub.add_parser("lambda", parents=[common], help="print the weight table")
    ev = sub.add_parser("evolve", parents=[common], help="amplitudes at one time")
    ev.add_argument("--gt", type=float, default=argparse.SUPPRESS, help="scaled time")
    sub.add_parser("mandel", parents=[common], help="Mandel Q sweep")
    sub.add_parser("squeeze", parents=[common], help="optimal squeezing sweep")
    sub.add_parser("compare", parents=[common], help="paper vs oracle deviations")
    fig = sub.add_parser("figures", parents=[_common_flags(grid_only=True)], help="all twelve figure panels")
    fig.add_argument("--out-dir", dest="out_dir", required=True, metavar="DIR")
    return parser


def _coerce(key, value):
    if key in _TYPES:
        t = _TYPES[key]
        if t is bool:
            if not isinstance(value, bool):
                raise ConfigError(f"config key {key!r} must be true/false")
            return value
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"config key {key!r} must be a number")
        if t is int and value != int(value):
            raise ConfigError(f"config key {key!r} must be an integer")
        return t(value)
    if key in _CHOICES and value not in _CHOICES[key]:
        raise ConfigError(f"config key {key!r} must be one of {_CHOICES[key]}")
    if key in ("lambda",) and not isinstance(value, str):
        raise ConfigError("config key 'lambda' must be a string")
    return value


def load_config_file(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = set(doc) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    return {key: _coerce(key, value) for key, value in doc.items()}


def resolve_options(ns: argparse.Namespace) -> dict:
    """defaults < --config file < explicit flags."""
    given = vars(ns).copy()
    given.pop("command", None)
    opts = dict(DEFAULTS)
    path = given.pop("config", None)
    if path:
        opts.update(load_config_file(path))
    opts.update(given)
    return opts


def _family(name: str):
    if name.startswith("file:"):
        return Family.CUSTOM, name[len("file:"):]
    try:
        return _LAMBDA_NAMES[name], None
    except KeyError:
        raise ConfigError(f"unknown --lambda {name!r}") from None


def sweep_config(opts: dict, witnesses) -> SweepConfig:
    family, path = _family(opts["lambda"])
    modes = ("paper", "oracle") if opts["mode"] == "both" else (opts["mode"],)
    return SweepConfig(
        family=family,
        q=opts["q"] if family in _Q_FAMILIES else None,
        lambda_file=path,
        nbar=opts["nbar"],
        zeta=opts["zeta"],
        g=opts["g"],
        k=opts["k"],
        gt_min=opts["gt_min"],
        gt_max=opts["gt_max"],
        points=opts["points"],
        witnesses=tuple(witnesses),
        modes=modes,
        n_max=opts["nmax"],
        coherent=opts["coherent"],
        moments=opts["moments"],
        independent_oracle=opts["independent_oracle"],
        steps_per_unit=opts["steps_per_unit"],
    )


def _manifest_path(data_path: Path) -> Path:
    return data_path.with_name(data_path.stem + ".manifest.json")


def _deliver(opts, command, configs, csv_text, json_doc, plot_svg=None, started=0.0):
    """Write data (file or stdout), optional plot, and a manifest next to any file output."""
    outputs = []
    out = opts.get("out")
    if out:
        outputs.append(str(out))
    if plot_svg is not None and opts.get("plot"):
        outputs.append(str(opts["plot"]))
    manifest = build_manifest(command, configs, outputs)

    if opts["format"] == "json":
        json_doc = dict(json_doc, manifest=manifest)
        data = json.dumps(json_doc, indent=2) + "\n"
    else:
        data = csv_text
    if out:
        write_atomic(out, data)
    else:
        sys.stdout.write(data)
    if plot_svg is not None and opts.get("plot"):
        write_atomic(opts["plot"], plot_svg)
    if outputs:
        anchor = Path(out or opts["plot"])
        full = build_manifest(command, configs, outputs, time.perf_counter() - started)
        write_atomic(_manifest_path(anchor), json.dumps(full, indent=2) + "\n")


def cmd_lambda(opts, started):
    family, path = _family(opts["lambda"])
    cfg = SweepConfig(family=family, q=opts["q"] if family in _Q_FAMILIES else None, lambda_file=path, n_max=opts["nmax"])
    seq = cfg.weights()
    rows = [{"n": n, "lambda": seq.weight(n), "ratio": seq.ratio(n)} for n in range(opts["nmax"] + 1)]
    csv_text = "n,lambda,ratio\n" + "".join(f"{r['n']},{fmt(r['lambda'])},{fmt(r['ratio'])}\n" for r in rows)
    _deliver(opts, "lambda", {"lambda": cfg.to_dict()}, csv_text, {"rows": rows}, started=started)


def cmd_sweep(opts, witness, started):
    cfg = sweep_config(opts, (witness,))
    series = run_sweep(cfg)
    svg = emit_svg(series, title=f"{witness}: {cfg.family.value}, nbar={cfg.nbar:g}, k={cfg.k:g}") if opts.get("plot") else None
    json_doc = json.loads(emit_json(series))
    json_doc["summary"] = [{"witness": s.witness, "mode": s.mode, **s.summary()} for s in series]
    _deliver(opts, witness, {witness: cfg.to_dict()}, emit_csv(series), json_doc, svg, started)


def cmd_evolve(opts, started):
    cfg = sweep_config(opts, ("mandel",))
    params = cfg.params()
    t = opts["gt"] / cfg.g
    modes = {"paper": cfg.paper_mode(), "oracle": Mode.ORACLE_ODE}
    rows = []
    for name in cfg.modes:
        amps = evolve(modes[name], params, t)
        for i, n in enumerate(amps.n):
            rows.append(
                {
                    "n": int(n),
                    "mode": name,
                    "ca_re": amps.ca[i].real,
                    "ca_im": amps.ca[i].imag,
                    "cb_re": amps.cb[i].real,
                    "cb_im": amps.cb[i].imag,
                    "cc_re": amps.cc[i].real,
                    "cc_im": amps.cc[i].imag,
                }
            )
    cols = ("n", "mode", "ca_re", "ca_im", "cb_re", "cb_im", "cc_re", "cc_im")
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(str(r[c]) if c in ("n", "mode") else fmt(r[c]) for c in cols))
    config = dict(cfg.to_dict(), gt=opts["gt"])
    _deliver(opts, "evolve", {"evolve": config}, "\n".join(lines) + "\n", {"rows": rows}, started=started)


def cmd_compare(opts, started):
    cfg = sweep_config(opts, ("mandel", "squeezing"))
    rep = compare_modes(cfg)
    cols = ("gt", "dq", "ds", "paper_norm_drift", "oracle_norm_drift")
    rows = [
        dict(zip(cols, vals))
        for vals in zip(rep.gt.tolist(), rep.dq, rep.ds.tolist(), rep.paper_norm_drift.tolist(), rep.oracle_norm_drift.tolist())
    ]
    csv_text = ",".join(cols) + "\n" + "".join(",".join(fmt(r[c]) for c in cols) + "\n" for r in rows)
    summary = rep.summary()
    print(json.dumps(summary, indent=2), file=sys.stderr)
    _deliver(opts, "compare", {"compare": cfg.to_dict()}, csv_text, {"rows": rows, "summary": summary}, started=started)


_FIGURE_OVERRIDES = ("gt_min", "gt_max", "points", "nmax", "moments", "independent_oracle", "steps_per_unit")


def cmd_figures(opts, given, started):
    out_dir = Path(opts["out_dir"])
    overrides = {("n_max" if k == "nmax" else k): v for k, v in given.items() if k in _FIGURE_OVERRIDES}
    if "mode" in given:
        overrides["modes"] = ("paper", "oracle") if given["mode"] == "both" else (given["mode"],)
    configs, outputs = {}, []
    for name in FIGURES:
        cfg = figure_preset(name, **overrides)
        series = run_sweep(cfg)
        csv_path, svg_path = out_dir / f"{name}.csv", out_dir / f"{name}.svg"
        write_atomic(csv_path, emit_csv(series))
        title = f"{name}: {cfg.witnesses[0]}, {cfg.family.value}, nbar={cfg.nbar:g}, k={cfg.k:g}"
        write_atomic(svg_path, emit_svg(series, title=title))
        configs[name] = cfg.to_dict()
        outputs += [str(csv_path), str(svg_path)]
        print(f"{name}: {series[0].summary()}", file=sys.stderr)
    manifest = build_manifest("figures", configs, outputs, time.perf_counter() - started)
    write_atomic(out_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")


def main(argv=None) -> int:
    started = time.perf_counter()
    try:
        ns = build_parser().parse_args(argv)
        if ns.command == "figures":
            given = {k: v for k, v in vars(ns).items() if k not in ("command", "out_dir")}
            cmd_figures({"out_dir": ns.out_dir}, given, started)
            return 0
        opts = resolve_options(ns)
        if ns.command == "lambda":
            cmd_lambda(opts, started)
        elif ns.command == "evolve":
            cmd_evolve(opts, started)
        elif ns.command == "mandel":
            cmd_sweep(opts, "mandel", started)
        elif ns.command == "squeeze":
            cmd_sweep(opts, "squeezing", started)
        elif ns.command == "compare":
            cmd_compare(opts, started)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        print(f"numeric domain error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 1
    return 0

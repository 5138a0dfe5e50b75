"""Command line entry point ``splitlab``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from ..splitting import SplittingSequence
from .config import ConfigError, LinearSpec, RunSpec, SweepSpec, format_config, load_config
from .figures import emit_figures
from .linear_runner import run_linear
from .runner import FIELD_COLUMNS, analytic_for, fmt, run_scenario, run_sweep, write_summary

log = logging.getLogger("splitlab")


def _load(path, want):
    spec = load_config(path)
    if want is SweepSpec and isinstance(spec, RunSpec):
        spec = spec.as_sweep()
    if not isinstance(spec, want):
        raise ConfigError(f"{path}: expected a {want.__name__[:-4].lower()} config, got {type(spec).__name__}")
    return spec


def _report(records, assertions) -> int:
    for r in records:
        print(f"{r.key:40s} rrms_mean={r.rrms_mean:.6g} mass_drift={r.mass_drift:.2e}")
    bad = assertions.violations(records)
    for msg in bad:
        print(f"ASSERTION FAILED {msg}", file=sys.stderr)
    return 1 if bad else 0


def cmd_run(args) -> int:
    spec = _load(args.config, RunSpec)
    print(format_config(spec), end="")
    rec = run_scenario(spec, args.out)
    write_summary(Path(args.out) / "summary.csv", [rec])
    return _report([rec], spec.assertions)


def cmd_sweep(args) -> int:
    spec = _load(args.config, SweepSpec)
    records = run_sweep(spec, args.out, jobs=args.jobs)
    if not args.no_plot:
        emit_figures(Path(args.out) / "summary.csv")
    return _report(records, spec.assertions)


def cmd_linear(args) -> int:
    spec = _load(args.config, LinearSpec) if args.config else LinearSpec()
    overrides = {}
    if args.dim is not None:
        overrides["dim"] = args.dim
    if args.eps:
        overrides["eps"] = tuple(args.eps)
    if overrides:
        spec = LinearSpec(**{**spec.__dict__, **overrides})
    checks = run_linear(spec, args.out)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name:28s} {c.value:.6g} in [{c.lo:g}, {c.hi:g}]")
    return 0 if all(c.passed for c in checks) else 1


def cmd_reference(args) -> int:
    spec = _load(args.config, SweepSpec)
    scenarios = {}
    for dx, dt, seq in spec.triples():
        cfg = spec.scenario(dx, dt, seq)
        # the exact state depends only on dx and on whether chemistry/transport is active
        kind = seq if seq in (SplittingSequence.TRANSPORT_ONLY, SplittingSequence.CHEMISTRY_ONLY) else "coupled"
        scenarios.setdefault((dx, kind), cfg)
    out = Path(args.out) if args.out else None
    for (dx, kind), cfg in sorted(scenarios.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
        ref = analytic_for(cfg)
        if out is None:
            fh = sys.stdout
            if len(scenarios) > 1:
                print(f"# dx = {dx / 1e3:g} km, {kind}")
        else:
            out.mkdir(parents=True, exist_ok=True)
            name = f"reference_{kind}_dx{dx / 1e3:g}km.csv"
            fh = open(out / name, "w", newline="")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FIELD_COLUMNS)
        for x, row in zip(cfg.grid.centers / 1e3, ref.values):
            w.writerow([fmt(x), *map(fmt, row)])
        if out is not None:
            fh.close()
    return 0


def cmd_plot(args) -> int:
    paths = emit_figures(args.summary, args.out)
    for p in paths.values():
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="splitlab", description="Operator-splitting error laboratory")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("run", help="run one scenario")
    s.add_argument("config")
    s.add_argument("--out", default="out")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run a (dx, dt, sequence) sweep")
    s.add_argument("config")
    s.add_argument("--out", default="out")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--no-plot", action="store_true")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("linear", help="check linear splitting theory")
    s.add_argument("--config")
    s.add_argument("--dim", type=int)
    s.add_argument("--eps", type=float, nargs="+")
    s.add_argument("--out")
    s.set_defaults(func=cmd_linear)

    s = sub.add_parser("reference", help="write the analytic solution")
    s.add_argument("config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_reference)

    s = sub.add_parser("plot", help="draw figures from a summary.csv")
    s.add_argument("summary")
    s.add_argument("--out")
    s.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"splitlab: error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"splitlab: simulation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end: ``bmduality <suite> [options]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .pairings import pairing_table_csv
from .report import RunConfig, emit_report, parse_resolution, write_report
from .suites import run_suite

COMMANDS = {
    "harmonics": "harmonics",
    "reproduce": "reproduce",
    "cr-test": "cr",
    "jump": "jump",
    "pairing": "pairing",
    "ball-example": "ball-example",
    "dirichlet": "dirichlet",
    "density-probe": "density-probe",
    "all": "all",
}

HELP = {
    "harmonics": "dimension table and exact checks on the harmonic bases",
    "reproduce": "reproduction by the Bochner-Martinelli integral and surface-constant calibration",
    "cr-test": "exterior potential of CR and non-CR traces",
    "jump": "extrapolated jump of the potential across the sphere",
    "pairing": "contrast values, contour independence, sesquilinearity and the one-variable residue table",
    "ball-example": "annihilator table plus the energy identity on the ball",
    "dirichlet": "Dirichlet problems with the form h_D and its holomorphic projection",
    "density-probe": "dual functionals of admissible exterior data",
    "all": "every suite in sequence",
}


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("run configuration (flags override --config)")
    g.add_argument("--config", type=Path, help="flat key = value configuration file")
    g.add_argument("--n", type=int, help="complex dimension (default 2)")
    g.add_argument("--radius", type=float, dest="R", help="ball radius R (default 1)")
    g.add_argument("--rmax", type=int, dest="r_max", help="harmonic degree cap (default 6)")
    g.add_argument("--smax", type=int, dest="s_max", help="monomial degree cap for pairings (default 4)")
    g.add_argument("--qmax", type=int, dest="q_max", help="annihilator degree cap (default 3)")
    g.add_argument("--resolution", type=parse_resolution,
                   help="quadrature resolution, e.g. 32x32x24 (n=2), 64 (n=1), 12x10 (n>=3)")
    g.add_argument("--tol-reproduction", type=float, dest="tol_reproduction")
    g.add_argument("--tol-pairing", type=float, dest="tol_pairing")
    g.add_argument("--tol-jump", type=float, dest="tol_jump")
    g.add_argument("--seed", type=int)
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=("json", "csv", "human"), default="human")
    o.add_argument("--out", help="report path (default stdout)")
    o.add_argument("--table", help="write the pairing table CSV here (pairing, ball-example, all)")
    o.add_argument("--timing", action="store_true", help="include wall time in the report")
    o.add_argument("--strict", action="store_true", help="treat refusals as failures for the exit status")
    o.add_argument("--dump-config", action="store_true", help="print the effective configuration and exit")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bmduality", description="Verification suites for Bochner-Martinelli "
                                 "potentials and duality pairings on balls.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        _common(sub.add_parser(name, help=HELP[name], description=HELP[name]))
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base = RunConfig.load(args.config) if args.config else RunConfig()
    overrides = {k: getattr(args, k) for k in ("n", "R", "r_max", "s_max", "q_max", "resolution",
                                               "tol_reproduction", "tol_pairing", "tol_jump", "seed")}
    overrides["out"] = args.out
    return base.with_overrides(**overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValueError, OSError) as exc:
        print(f"bmduality: configuration error: {exc}", file=sys.stderr)
        return 2
    if args.dump_config:
        sys.stdout.write(cfg.to_text())
        return 0
    report = run_suite(COMMANDS[args.command], cfg)
    text = emit_report(report, args.format, timing=args.timing)
    try:
        write_report(text, cfg.out)
        if args.table:
            rows = [r for name in ("pairing", "ball-example") for r in report.tables.get(name, [])]
            Path(args.table).write_text(pairing_table_csv(rows))
    except OSError as exc:
        print(f"bmduality: cannot write output: {exc}", file=sys.stderr)
        return 2
    if cfg.out and args.format != "human":
        print(emit_report(report, "human", timing=args.timing).splitlines()[0], file=sys.stderr)
    return report.exit_code(args.strict)


if __name__ == "__main__":
    raise SystemExit(main())

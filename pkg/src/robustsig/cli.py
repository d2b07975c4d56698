"""Command line entry point: ``robustsig <command> [flags]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 resource error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from .bounds import BlockConfig, estimate_then_test, moving_block_bounds, subsample_bounds
from .errors import (
    ConfigurationError,
    DomainError,
    InsufficientDataError,
    ResourceError,
    ShapeError,
)
from .gnormal import TestKind, TestSpec, VarianceBand, critical_value, p1
from .mc import (
    CLASSICAL_TARGET,
    DEFAULT_N_GRID,
    ROBUST_TARGET,
    SimulationConfig,
    power_curve,
    run_table,
    scenario_config,
)
from .oracle import PDEGrid, dp_max_rejection, dp_policy_value, g_heat_solve
from .report import band_estimate_doc, dumps, power_csv, simulation_doc, test_report_doc, type1_csv
from .rules import decide

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def read_data(path: str, header: bool = False) -> list:
    """One finite number per line; blank lines are ignored."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    if header and lines:
        lines = lines[1:]
    out = []
    for lineno, line in enumerate(lines, start=2 if header else 1):
        s = line.strip()
        if not s:
            continue
        try:
            v = float(s)
        except ValueError:
            raise DataError(f"{path}:{lineno}: not a number: {s!r}") from None
        if not math.isfinite(v):
            raise DataError(f"{path}:{lineno}: non-finite value {s!r}")
        out.append(v)
    return out


def _band(args, required=True):
    lo, hi = args.sigma_lower, args.sigma_upper
    if lo is None and hi is None and not required:
        return None
    if lo is None or hi is None:
        raise UsageError("both --sigma-lower and --sigma-upper are required")
    try:
        return VarianceBand(lo, hi)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _spec(args):
    try:
        return TestSpec(args.kind, args.mu0, args.alpha)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


# -- commands ---------------------------------------------------------------


def cmd_critical_value(args, out):
    spec = _spec(args)
    band = _band(args)
    print(f"{critical_value(spec, band):.12g}", file=out)


def cmd_test(args, out):
    spec = _spec(args)
    band = _band(args, required=False)
    if band is not None and args.block_length is not None:
        raise UsageError("give either --sigma-lower/--sigma-upper or --block-length, not both")
    data = read_data(args.data, args.header)
    if band is not None:
        rep = decide(data, spec, band)
    else:
        cfg = BlockConfig(args.block_length) if args.block_length is not None else None
        if cfg is None:
            print("note: no band given; estimating with the default block length ceil(sqrt(n))",
                  file=sys.stderr)
        rep = estimate_then_test(data, cfg, spec)
    out.write(dumps(test_report_doc(rep)))


def cmd_estimate_bounds(args, out):
    if (args.block_length is None) == (args.subsamples is None):
        raise UsageError("give exactly one of --block-length or --subsamples")
    data = read_data(args.data, args.header)
    if args.block_length is not None:
        est = moving_block_bounds(data, BlockConfig(args.block_length))
    else:
        est = subsample_bounds(data, args.subsamples)
    out.write(dumps(band_estimate_doc(est, len(data))))


def _sim_config(args) -> SimulationConfig:
    common = dict(reps=args.reps, seed=args.seed)
    if args.n_list:
        common["n_list"] = tuple(args.n_list)
    if args.scenario in ("sim1", "sim2"):
        return scenario_config(args.scenario, **common)
    missing = [f for f, v in (("--sigma-lower", args.sigma_lower), ("--sigma-upper", args.sigma_upper),
                              ("--alpha", args.alpha), ("--mu0", args.mu0),
                              ("--adversary-c", args.adversary_c)) if v is None]
    if missing:
        raise UsageError("custom scenario requires " + ", ".join(missing))
    adv = args.adversary_c
    if adv not in (CLASSICAL_TARGET, ROBUST_TARGET):
        try:
            adv = float(adv)
        except ValueError:
            raise UsageError(f"--adversary-c must be a number, {CLASSICAL_TARGET} or {ROBUST_TARGET}") from None
    try:
        return SimulationConfig(scenario="custom", band=_band(args), mu0=args.mu0,
                                alpha=args.alpha, adversary_c=adv, **common)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args, out):
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    cfg = _sim_config(args)
    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create {outdir}: {exc.strerror or exc}") from None
    if not os.access(outdir, os.W_OK):
        raise DataError(f"output directory {outdir} is not writable")

    table = run_table(cfg, workers=args.workers)
    files = {"type1.csv": type1_csv(table), "report.json": dumps(simulation_doc(table))}
    if args.power:
        files["power_mu.csv"] = power_csv(power_curve(cfg, "mu", workers=args.workers), "mu")
        files["power_n.csv"] = power_csv(power_curve(cfg, "n", workers=args.workers), "n")
    for name, text in files.items():
        try:
            (outdir / name).write_text(text)
        except OSError as exc:
            raise DataError(f"cannot write {outdir / name}: {exc.strerror or exc}") from None

    print(f"scenario {cfg.scenario}: adversary c = {cfg.adversary_target:.6f}, "
          f"robust threshold c1 = {cfg.robust_threshold:.6f}, reps = {cfg.reps}", file=out)
    print(f"{'n':>6}  {'robust':>8}  {'classical':>9}", file=out)
    for c in table.cells:
        print(f"{c.n:>6}  {c.rate_robust:8.4f}  {c.rate_classical:9.4f}", file=out)


def cmd_oracle(args, out):
    band = _band(args)
    if args.oracle == "dp":
        kind = TestKind.parse(args.kind)
        best = dp_max_rejection(args.n, args.c, band, kind)
        pol = dp_policy_value(args.n, args.c, band, kind)
        print(f"dp_max_rejection  {best:.12g}", file=out)
        print(f"dp_policy_value   {pol:.12g}", file=out)
        print(f"optimality_gap    {best - pol:.6g}", file=out)
        if kind is TestKind.I:
            ref = p1(args.c, band)
            print(f"closed_form_p1    {ref:.12g}", file=out)
            print(f"abs_gap_to_p1     {abs(best - ref):.6g}", file=out)
    else:
        grid = PDEGrid.for_problem(args.c, band, dx=args.dx, t0=args.t0, cfl=args.cfl)
        val = g_heat_solve(args.c, band, grid)
        ref = p1(args.c, band)
        print(f"g_heat_solve      {val:.12g}", file=out)
        print(f"closed_form_p1    {ref:.12g}", file=out)
        print(f"abs_gap           {abs(val - ref):.6g}", file=out)


# -- parser -----------------------------------------------------------------


def _add_band(p, required=False):
    p.add_argument("--sigma-lower", type=float, required=required)
    p.add_argument("--sigma-upper", type=float, required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robustsig", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("critical-value", help="robust critical value")
    p.add_argument("--kind", required=True, choices=["I", "II", "III"])
    p.add_argument("--alpha", type=float, required=True)
    _add_band(p, required=True)
    p.set_defaults(func=cmd_critical_value, mu0=0.0)

    p = sub.add_parser("test", help="robust and classical test on a data file")
    p.add_argument("--kind", required=True, choices=["I", "II", "III"])
    p.add_argument("--mu0", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--header", action="store_true", help="skip the first line")
    _add_band(p)
    p.add_argument("--block-length", type=int)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("estimate-bounds", help="estimate the variance band")
    p.add_argument("--data", required=True)
    p.add_argument("--header", action="store_true")
    p.add_argument("--block-length", type=int)
    p.add_argument("--subsamples", type=int)
    p.set_defaults(func=cmd_estimate_bounds)

    p = sub.add_parser("simulate", help="type I error / power simulations")
    p.add_argument("--scenario", required=True, choices=["sim1", "sim2", "custom"])
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--power", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--n-list", type=int, nargs="+", metavar="N",
                   help=f"sample sizes (default {' '.join(map(str, DEFAULT_N_GRID))})")
    _add_band(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--mu0", type=float)
    p.add_argument("--adversary-c")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="numerical oracles vs closed form")
    osub = p.add_subparsers(dest="oracle", required=True, parser_class=_Parser)
    q = osub.add_parser("dp", help="exact dynamic programme (+-1 noise)")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--c", type=float, required=True)
    q.add_argument("--kind", default="I", choices=["I", "II", "III"])
    _add_band(q, required=True)
    q.set_defaults(func=cmd_oracle)
    q = osub.add_parser("pde", help="explicit G-heat solver")
    q.add_argument("--c", type=float, required=True)
    q.add_argument("--dx", type=float, default=0.01)
    q.add_argument("--t0", type=float, default=0.01)
    q.add_argument("--cfl", type=float, default=0.5)
    _add_band(q, required=True)
    q.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        args.func(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, InsufficientDataError, ShapeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ResourceError, ConfigurationError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

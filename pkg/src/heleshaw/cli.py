"""Command-line entry point.

Subcommands::

    heleshaw run --scenario four_ellipse --out runs/four [--n 128] [--dt 1e-3]
                 [--t-end 2.0] [--gmres-tol 1e-8]
    heleshaw convergence-space --scenario linear_validation --n-list 64,128,256,512
                 [--dt 5e-3] [--t-end 0.5] [--out table.csv]
    heleshaw convergence-time --scenario linear_validation
                 --dt-list 5e-3,2.5e-3,1.25e-3,6.25e-4 [--n 256] [--t-end 0.5]
                 [--out table.csv]
    heleshaw linear-compare --scenario linear_validation [--t-end 1.0]
                 [--n 512] [--dt 2e-3] [--out table.csv]
    heleshaw sigma
"""
from __future__ import annotations

import argparse
import sys

from . import runner
from .linear_analysis import compute_sigma
from .scenarios import ScenarioError, load_scenario


def _add_common(parser, with_gmres=True):
    parser.add_argument("--scenario", required=True,
                        help="preset name or config file path")
    parser.add_argument("--n", type=int, default=None, help="nodes per curve")
    parser.add_argument("--dt", type=float, default=None, help="time step")
    parser.add_argument("--t-end", type=float, default=None, help="final time")
    if with_gmres:
        parser.add_argument("--gmres-tol", type=float, default=None)


def _load(args):
    scenario = load_scenario(args.scenario)
    return scenario.with_overrides(
        n=args.n, dt=args.dt, t_end=getattr(args, "t_end", None),
        gmres_tol=getattr(args, "gmres_tol", None))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="heleshaw", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evolve a scenario and write outputs")
    _add_common(p_run)
    p_run.add_argument("--out", default=None, help="output directory")

    p_cs = sub.add_parser("convergence-space", help="node-count refinement study")
    _add_common(p_cs)
    p_cs.add_argument("--n-list", required=True,
                      help="comma-separated node counts; largest is the reference")
    p_cs.add_argument("--out", default=None, help="CSV file for the error table")

    p_ct = sub.add_parser("convergence-time", help="time-step refinement study")
    _add_common(p_ct)
    p_ct.add_argument("--dt-list", required=True,
                      help="comma-separated steps; smallest is the reference")
    p_ct.add_argument("--out", default=None, help="CSV file for the error table")

    p_lc = sub.add_parser("linear-compare",
                          help="nonlinear run against the mode-dynamics oracle")
    _add_common(p_lc)
    p_lc.add_argument("--out", default=None, help="CSV file for the joint table")

    sub.add_parser("sigma", help="print the computed surface-tension constant")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "sigma":
        print(f"{compute_sigma():.12f}")
        return 0

    scenario = _load(args)

    if args.command == "run":
        out = args.out or f"runs/{scenario.name}"
        report = runner.run(scenario, out)
        print(f"stop reason: {report.stop_reason}")
        print(f"t_final: {report.t_final:g}")
        if report.t_forced_zero is not None:
            print(f"flux forced to zero at t_c = {report.t_forced_zero:g}")
        print(f"steps: {report.steps}, wall time: {report.wall_time:.1f} s, "
              f"GMRES iterations: total {report.gmres_total} / max {report.gmres_max}")
        print(f"outputs in {report.out_dir}")
        return 0

    if args.command == "convergence-space":
        n_values = [int(v) for v in args.n_list.split(",")]
        table = runner.convergence_space(scenario, n_values,
                                         dt=scenario.dt, t_end=scenario.t_end)
        _emit_table(table, "n,max_deviation", args.out)
        return 0

    if args.command == "convergence-time":
        dt_values = [float(v) for v in args.dt_list.split(",")]
        table = runner.convergence_time(scenario, dt_values,
                                        n=scenario.n, t_end=scenario.t_end)
        _emit_table(table, "dt,max_deviation", args.out)
        return 0

    if args.command == "linear-compare":
        table = runner.linear_compare(scenario, t_end=scenario.t_end)
        _emit_table(table, "t,R_num,R_lin,delta_num,delta_lin", args.out)
        return 0

    raise AssertionError(f"unhandled command {args.command}")


def _emit_table(table, header: str, out: str | None) -> None:
    if out:
        runner.write_table(out, table, header)
        print(f"wrote {out}")
    else:
        print(header)
        for row in table:
            print(",".join(f"{v:.12g}" for v in row))


if __name__ == "__main__":
    sys.exit(main())

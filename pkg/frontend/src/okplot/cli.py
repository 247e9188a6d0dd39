"""okplot: render figures from simulation run directories.

Usage::

    okplot series <run_dir> --out series.png
    okplot snapshots <run_dir> --times 0,1,5,25 --out shapes.png
    okplot convergence <table.csv> --out convergence.png
"""
from __future__ import annotations

import argparse
import sys

from .artifacts import SchemaError
from .figures import render_convergence, render_series, render_snapshots


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="okplot", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_series = sub.add_parser("series", help="time-series panels from series.csv")
    p_series.add_argument("run_dir")
    p_series.add_argument("--out", required=True)

    p_snap = sub.add_parser("snapshots", help="overlaid interfaces at chosen times")
    p_snap.add_argument("run_dir")
    p_snap.add_argument("--times", required=True,
                        help="comma-separated times; nearest snapshots are used")
    p_snap.add_argument("--out", required=True)

    p_conv = sub.add_parser("convergence", help="refinement-error plot from a table")
    p_conv.add_argument("table")
    p_conv.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "series":
            out = render_series(args.run_dir, args.out)
        elif args.command == "snapshots":
            times = [float(v) for v in args.times.split(",")]
            out = render_snapshots(args.run_dir, times, args.out)
        else:
            out = render_convergence(args.table, args.out)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"okplot: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

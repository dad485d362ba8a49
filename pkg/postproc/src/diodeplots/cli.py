"""Command line: render the standard figure set or comparison curves."""

from __future__ import annotations

import argparse
import sys

from .figures import FigureSpec, render, render_standard_set
from .reader import MOMENT_COLUMNS, RunDirError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="diodeplots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_r = sub.add_parser("render", help="render the standard figure set")
    p_r.add_argument("run_dir")
    p_r.add_argument("--out", default="figures")

    p_c = sub.add_parser("compare", help="overlay moments from two runs")
    p_c.add_argument("run_a")
    p_c.add_argument("run_b")
    p_c.add_argument("--out", default="figures")
    p_c.add_argument("--moments", nargs="+",
                     default=list(MOMENT_COLUMNS) + ["potential"])

    args = parser.parse_args(argv)
    try:
        if args.command == "render":
            results = render_standard_set(args.run_dir, args.out)
            for res in results:
                note = f"  ({res.floored_count} cells floored)" if res.floored_count else ""
                print(f"wrote {res.path}{note}")
        else:
            for moment in args.moments:
                spec = FigureSpec(kind="comparison_curve", source=moment,
                                  out=f"{args.out}/compare_{moment}.png")
                res = render(args.run_a, spec, run_dir_b=args.run_b)
                print(f"wrote {res.path}  (separation/mean = {res.data_min:.2e})")
    except RunDirError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: jrr-plots render --kind K --in results.csv --out fig.png."""

import argparse
import sys

from jrr_plots.render import KINDS, FigureSpec, PlotError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jrr-plots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("render", help="render one figure from experiment CSV output")
    sp.add_argument("--kind", required=True, choices=KINDS)
    sp.add_argument("--in", dest="inputs", action="append", required=True,
                    metavar="CSV", help="input CSV (repeatable)")
    sp.add_argument("--out", required=True, help="output image path")
    sp.add_argument("--log-x", action="store_true")
    sp.add_argument("--log-y", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = render(
            FigureSpec(
                kind=args.kind,
                inputs=tuple(args.inputs),
                out=args.out,
                log_x=args.log_x,
                log_y=args.log_y,
            )
        )
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

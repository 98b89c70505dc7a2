"""Figure CLI: one subcommand per figure kind, consuming the documented
experiment CSV headers. Exit codes: 0 success, 1 input/schema error."""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .render import KINDS, FigureSpec, render

__all__ = ["main"]

_DESCRIPTIONS = {
    "evolution": "scaled entropy vs time from entropy/pt-compare CSVs",
    "husimi": "dual-scale Husimi panels (linear contour + log density)",
    "decay": "|D(t+tau, t)| vs tau per reference time, log-y by default",
    "rates": "production rate vs nonlinearity per initial condition",
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ktops-figures",
        description="Render static figures from kicked-top experiment CSV files.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=_DESCRIPTIONS[kind])
        p.add_argument(
            "--in", dest="inputs", nargs="+", required=True, metavar="CSV",
            help="input CSV file(s)",
        )
        p.add_argument("--out", required=True, help="output image (.png or .svg)")
        scale = p.add_mutually_exclusive_group()
        scale.add_argument(
            "--log-y", dest="log_y", action="store_true", default=None,
            help="force logarithmic y axis",
        )
        scale.add_argument(
            "--linear-y", dest="log_y", action="store_false",
            help="force linear y axis",
        )
    args = parser.parse_args(argv)
    spec = FigureSpec(
        kind=args.kind, inputs=tuple(args.inputs), output=args.out, log_y=args.log_y
    )
    try:
        render(spec)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

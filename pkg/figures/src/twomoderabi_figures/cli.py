"""Command line for rendering twomoderabi CSV tables into figures."""

from __future__ import annotations

import argparse
import sys

from .render import HEADERS, FigureSpec, HeaderContractError, render


def _limits(text):
    lo, hi = text.split(",")
    return float(lo), float(hi)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="twomoderabi-figures",
        description="Render twomoderabi CSV output into figures "
                    "(no physics is recomputed).",
    )
    parser.add_argument("csv", nargs="+", help="input CSV file(s)")
    parser.add_argument("--kind", required=True, choices=sorted(HEADERS))
    parser.add_argument("--out", required=True, help="output image path (.png, .pdf, ...)")
    parser.add_argument("--sz-shift", action="store_true",
                        help="plot sz + 1 so the vacuum region reads as zero")
    parser.add_argument("--xlim", type=_limits, help="x axis range lo,hi")
    parser.add_argument("--ylim", type=_limits, help="y axis range lo,hi")
    args = parser.parse_args(argv)

    spec = FigureSpec(csv_paths=args.csv, kind=args.kind, out_path=args.out,
                      sz_shift=args.sz_shift, xlim=args.xlim, ylim=args.ylim)
    try:
        path = render(spec)
    except (HeaderContractError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

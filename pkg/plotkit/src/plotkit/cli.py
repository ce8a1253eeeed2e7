"""render-figure: turn an aptomit CSV bundle into a figure image.

Exit codes: 0 success, 1 schema/bundle error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .render import render_figure

FIGURES = ("fig2", "fig3", "fig4")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render-figure",
        description="render an aptomit figure-data bundle to an image")
    parser.add_argument("figure", choices=FIGURES, help="figure id")
    parser.add_argument("bundle", help="bundle directory with manifest.json")
    parser.add_argument("-o", "--output", required=True,
                        help="output image path (.png or .svg)")
    parser.add_argument("--normalize", action="store_true",
                        help="scale line panels to unit peak")
    args = parser.parse_args(argv)

    try:
        render_figure(args.figure, args.bundle, args.output,
                      normalize=args.normalize)
    except SchemaError as exc:
        print(f"render-figure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

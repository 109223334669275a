"""Figure CLI:

    leoroute-plot --kind unstable-ratio --in unstable_ratio.csv --out fig3.png

Exits nonzero with a one-line message on schema mismatches or empty
inputs.
"""
from __future__ import annotations

import argparse
import sys

from .plots import KINDS, FigureSpec, plot
from .schemas import EmptyInputError, SchemaError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="leoroute-plot")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--in", dest="input_csv", required=True,
                   help="summary CSV produced by the experiment sweep")
    p.add_argument("--out", dest="output", required=True,
                   help="image file to write (format from extension)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(args.kind, args.input_csv, args.output)
    try:
        out = plot(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except EmptyInputError as exc:
        print(f"warning: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

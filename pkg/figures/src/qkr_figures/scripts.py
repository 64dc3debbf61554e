"""One console script per figure kind: <script> INPUT_CSV OUTPUT_IMAGE."""

from __future__ import annotations

import argparse
import sys

from .figures import FigureSpec, SchemaError, plot


def _build_parser(kind: str, doc: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=doc)
    parser.add_argument("csv_path", help="input CSV produced by the qkr CLI")
    parser.add_argument("output_path", help="image file to write (.png, .svg, .pdf)")
    parser.add_argument("--xlim", type=float, nargs=2, metavar=("LO", "HI"))
    parser.add_argument("--ylim", type=float, nargs=2, metavar=("LO", "HI"))
    return parser


def _main(kind: str, doc: str, argv=None) -> int:
    args = _build_parser(kind, doc).parse_args(argv)
    spec = FigureSpec(
        csv_path=args.csv_path,
        kind=kind,
        output_path=args.output_path,
        xlim=tuple(args.xlim) if args.xlim else None,
        ylim=tuple(args.ylim) if args.ylim else None,
    )
    try:
        plot(spec)
    except (SchemaError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


def distribution_main(argv=None) -> int:
    return _main("distribution", "Momentum distribution with a magnified p=0 inset", argv)


def p0_sequence_main(argv=None) -> int:
    return _main("p0_sequence", "Zero-momentum peak height against kick number", argv)


def fwhm_sweep_main(argv=None) -> int:
    return _main("fwhm_sweep", "Central-peak width against epsilon", argv)

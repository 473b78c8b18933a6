"""dccat-plot: render figures from a dccat run bundle.

    dccat-plot <bundle-dir> [--which fig1c|fig2|fig3|freqscan] [--out DIR]

Reads only; output defaults to <bundle-dir>/plots (PNG + SVG)."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bundle import BundleError, RunBundle
from .figures import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dccat-plot", description=__doc__)
    parser.add_argument("bundle", type=Path)
    parser.add_argument(
        "--which",
        default="auto",
        choices=("auto", "fig1c", "fig2", "fig3", "freqscan"),
    )
    parser.add_argument("--out", type=Path, default=None)
    args = parser.parse_args(argv)
    out = args.out if args.out is not None else args.bundle / "plots"
    try:
        bundle = RunBundle(args.bundle)
        paths = render(bundle, out, which=args.which)
    except BundleError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())

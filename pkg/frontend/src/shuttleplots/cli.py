"""Command line entry point: one figure per invocation.

    shuttleplot --kind controls        --in out/controls.csv      --out controls.png
    shuttleplot --kind density_contour --in out/density_t*.csv    --out contour.png
    shuttleplot --kind snapshots       --in out/density_t*.csv    --out snapshots.png
    shuttleplot --kind spin_traces     --in out/observables.csv   --out spins.png
    shuttleplot --kind sweep           --in out/sweep.csv         --out sweep.png
"""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_KINDS, FigureSpec, RenderError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="shuttleplot", description=__doc__)
    parser.add_argument("--kind", required=True, choices=sorted(FIGURE_KINDS))
    parser.add_argument("--in", dest="inputs", required=True, nargs="+",
                        help="input CSV file(s)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                          out=args.out, dpi=args.dpi)
        render(spec)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Plot strong-scaling curves from one or more threads,region,seconds CSVs.

    plot_scaling.py --input scaling.csv --out scaling.png
    plot_scaling.py --input baseline.csv --input optimized.csv --out both.png

Runtime versus thread count, both axes logarithmic, one line per
(input file, region).  Exits 0 iff an image was written.
"""

import argparse
import os
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from series import load_scaling_csv


def render(input_paths, out_path):
    fig, ax = plt.subplots(figsize=(7, 5))
    for path in input_paths:
        rows = load_scaling_csv(path)
        label_prefix = ""
        if len(input_paths) > 1:
            label_prefix = os.path.splitext(os.path.basename(path))[0] + ": "
        by_region = defaultdict(list)
        for threads, region, seconds in rows:
            by_region[region].append((threads, seconds))
        for region, points in by_region.items():
            points.sort()
            ax.plot(
                [t for t, _ in points],
                [s for _, s in points],
                marker="o",
                label=f"{label_prefix}{region}",
            )
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("threads")
    ax.set_ylabel("runtime [s]")
    ax.set_title("strong scaling")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small", ncols=2)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--input", action="append", required=True, help="scaling CSV (repeatable)"
    )
    parser.add_argument("--out", required=True, help="output image path (png/svg)")
    args = parser.parse_args(argv)
    try:
        render(args.input, args.out)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Render the mid-z x-y slice of a snapshot CSV as a quiver or streamline plot.

    plot_slice.py --input snapshot_0015.csv --kind stream --out vortex.png

Arrows or streamlines are colored by the in-plane speed; the title carries
the time-step index when the file follows the snapshot_NNNN.csv convention.
Exits 0 iff an image was written.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from series import load_snapshot, mid_z_slice, step_of


def render(input_path, kind, out_path):
    snap = load_snapshot(input_path)
    x, y, u, v = mid_z_slice(snap)
    speed = np.hypot(u, v)

    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    if kind == "quiver":
        q = ax.quiver(x, y, u, v, speed, cmap="viridis", angles="xy")
        fig.colorbar(q, ax=ax, label="speed")
    else:
        xs = x[0, :]
        ys = y[:, 0]
        strm = ax.streamplot(xs, ys, u, v, color=speed, cmap="viridis", density=1.2)
        fig.colorbar(strm.lines, ax=ax, label="speed")
    step = step_of(input_path)
    title = "mid-z slice" if step is None else f"mid-z slice, step {step}"
    ax.set_title(title)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--input", required=True, help="snapshot CSV to plot")
    parser.add_argument("--kind", choices=("quiver", "stream"), default="quiver")
    parser.add_argument("--out", required=True, help="output image path (png/svg)")
    args = parser.parse_args(argv)
    try:
        render(args.input, args.kind, args.out)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Snapshot CSV parsing and directory loading for the plot scripts.

This component talks to the solver exclusively through its file formats:
snapshot CSVs with the header ``x,y,z,u,v,w,p`` (one row per cell of an
n-by-n-by-n grid) and scaling CSVs with the header ``threads,region,seconds``.
"""

import os
import re
from dataclasses import dataclass

import numpy as np

SNAPSHOT_HEADER = "x,y,z,u,v,w,p"
SNAPSHOT_NAME_RE = re.compile(r"snapshot_(\d+)\.csv$")


@dataclass
class SnapshotTable:
    """Parsed snapshot: flat per-cell columns plus the inferred grid size."""

    n: int
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    p: np.ndarray


def load_snapshot(path) -> SnapshotTable:
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        if header != SNAPSHOT_HEADER:
            raise ValueError(
                f"{path}: line 1: expected columns {SNAPSHOT_HEADER!r}, got {header!r}"
            )
        rows = []
        for lineno, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != 7:
                raise ValueError(f"{path}: line {lineno}: expected 7 fields, got {len(fields)}")
            try:
                rows.append([float(s) for s in fields])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: unparsable number") from None
    count = len(rows)
    n = round(count ** (1.0 / 3.0))
    if n < 1 or n**3 != count:
        raise ValueError(f"{path}: row count {count} is not a cube")
    data = np.asarray(rows)
    return SnapshotTable(n, *(data[:, c] for c in range(7)))


def step_of(path) -> int | None:
    m = SNAPSHOT_NAME_RE.search(os.path.basename(str(path)))
    return int(m.group(1)) if m else None


@dataclass
class SnapshotSeries:
    """Snapshots of one run: (step, table) pairs with strictly increasing steps."""

    entries: list

    def __len__(self):
        return len(self.entries)

    @property
    def n(self) -> int:
        return self.entries[0][1].n


def load_series(directory) -> SnapshotSeries:
    names = sorted(f for f in os.listdir(directory) if SNAPSHOT_NAME_RE.search(f))
    if not names:
        raise ValueError(f"{directory}: no snapshot_*.csv files found")
    entries = []
    for name in names:
        step = step_of(name)
        table = load_snapshot(os.path.join(directory, name))
        if entries:
            if step <= entries[-1][0]:
                raise ValueError(f"{directory}: steps not strictly increasing at {name}")
            if table.n != entries[0][1].n:
                raise ValueError(
                    f"{directory}: {name} has grid size {table.n}, expected {entries[0][1].n}"
                )
        entries.append((step, table))
    return SnapshotSeries(entries)


def mid_z_slice(snap: SnapshotTable):
    """In-plane fields on the mid-z slice as (n, n) arrays indexed [j, i].

    Rows are selected by z value and reordered by (y, x), so the result does
    not depend on the file's row order.
    """
    zs = np.unique(snap.z)
    mask = snap.z == zs[len(zs) // 2]
    order = np.lexsort((snap.x[mask], snap.y[mask]))
    n = snap.n
    pick = lambda col: col[mask][order].reshape(n, n)
    return pick(snap.x), pick(snap.y), pick(snap.u), pick(snap.v)


def load_scaling_csv(path):
    """Rows of a ``threads,region,seconds`` CSV."""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        if header != "threads,region,seconds":
            raise ValueError(
                f"{path}: line 1: expected header 'threads,region,seconds', got {header!r}"
            )
        rows = []
        for lineno, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != 3:
                raise ValueError(f"{path}: line {lineno}: expected 3 fields, got {len(fields)}")
            try:
                rows.append((int(fields[0]), fields[1], float(fields[2])))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: unparsable row") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows

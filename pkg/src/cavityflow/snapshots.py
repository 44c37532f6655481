"""Snapshot CSV serialization, reading, and tolerance comparison.

A snapshot holds one row per cell in ``cell_index`` order: the cell-center
position, the cell-centered velocity (each component averaged from its two
bounding faces), and the pressure.  Files start with the exact header
``x,y,z,u,v,w,p``; numbers are written as the shortest decimal that round
trips to the same float64, so reading a written file reproduces every value
bit for bit and both writer modes produce byte-identical files.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec

SNAPSHOT_HEADER = "x,y,z,u,v,w,p"
COLUMNS = ("x", "y", "z", "u", "v", "w", "p")
WRITE_MODES = ("serial", "buffered_parallel")


def snapshot_filename(step: int) -> str:
    return f"snapshot_{step:04d}.csv"


@dataclass
class Snapshot:
    spec: GridSpec
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    p: np.ndarray

    def column(self, name: str) -> np.ndarray:
        return getattr(self, name)

    @property
    def num_rows(self) -> int:
        return len(self.p)


def snapshot_from_state(state) -> Snapshot:
    """Cell-centered view of a simulation state."""
    spec = state.vel.spec
    n, h = spec.n, spec.h
    centers = (np.arange(n) + 0.5) * h
    x, y, z = np.meshgrid(centers, centers, centers, indexing="ij")
    u, v, w = state.vel.components()
    uc = 0.5 * (u[:-1, :, :] + u[1:, :, :])
    vc = 0.5 * (v[:, :-1, :] + v[:, 1:, :])
    wc = 0.5 * (w[:, :, :-1] + w[:, :, 1:])
    flat = lambda a: a.flatten(order="F")
    return Snapshot(
        spec,
        flat(x), flat(y), flat(z),
        flat(uc), flat(vc), flat(wc),
        state.p.data.copy(),
    )


def format_value(v: float) -> str:
    """Shortest round-trip decimal; integral values lose the trailing '.0'."""
    s = repr(float(v))
    if s.endswith(".0"):
        s = s[:-2]
    return s


def _format_rows(snap: Snapshot, start: int, stop: int) -> str:
    cols = [snap.x, snap.y, snap.z, snap.u, snap.v, snap.w, snap.p]
    parts = []
    for r in range(start, stop):
        parts.append(",".join(format_value(c[r]) for c in cols))
        parts.append("\n")
    return "".join(parts)


def write_snapshot(state, path, mode: str = "serial", threads: int = 1):
    """Write a state (or prebuilt Snapshot) as CSV.

    ``buffered_parallel`` partitions rows into contiguous chunks, formats
    each chunk in a worker-local buffer and concatenates the buffers in
    chunk order before a single write, so both modes produce identical
    bytes regardless of scheduling.
    """
    if mode not in WRITE_MODES:
        raise ValueError(f"mode must be one of {WRITE_MODES}, got {mode!r}")
    snap = state if isinstance(state, Snapshot) else snapshot_from_state(state)
    nrows = snap.num_rows
    if mode == "serial":
        body = _format_rows(snap, 0, nrows)
    else:
        chunks = max(1, min(threads, nrows))
        bounds = np.linspace(0, nrows, chunks + 1).astype(np.int64)
        ranges = [(int(bounds[i]), int(bounds[i + 1])) for i in range(chunks)]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                buffers = list(ex.map(lambda se: _format_rows(snap, *se), ranges))
        else:
            buffers = [_format_rows(snap, *se) for se in ranges]
        body = "".join(buffers)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(SNAPSHOT_HEADER + "\n")
        f.write(body)


def read_snapshot(path) -> Snapshot:
    """Parse a snapshot CSV; the grid size is inferred from the row count."""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        if header != SNAPSHOT_HEADER:
            raise ValueError(
                f"{path}: line 1: expected header {SNAPSHOT_HEADER!r}, got {header!r}"
            )
        rows = []
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != 7:
                raise ValueError(f"{path}: line {lineno}: expected 7 fields, got {len(fields)}")
            try:
                rows.append([float(s) for s in fields])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
    count = len(rows)
    n = round(count ** (1.0 / 3.0))
    if n < 1 or n ** 3 != count:
        raise ValueError(f"{path}: row count {count} is not a cube")
    data = np.asarray(rows, dtype=np.float64)
    h = 2.0 * data[0, 0]  # first cell center sits at h/2
    spec = GridSpec(n, h)
    return Snapshot(spec, *(data[:, c].copy() for c in range(7)))


@dataclass
class SnapshotDiff:
    abs_tol: float
    max_abs_diff: dict
    passed: bool
    failing_columns: list

    def summary(self) -> str:
        worst = max(self.max_abs_diff.values(), default=0.0)
        status = "PASS" if self.passed else f"FAIL ({', '.join(self.failing_columns)})"
        per_col = "  ".join(f"{c}={d:.3e}" for c, d in self.max_abs_diff.items())
        return f"{status}: max |diff| {worst:.3e} at tol {self.abs_tol:.1e} [{per_col}]"


def compare_snapshots(a: Snapshot, b: Snapshot, abs_tol: float) -> SnapshotDiff:
    """Per-column max absolute differences; passes iff all are within tol."""
    if a.spec != b.spec:
        raise ValueError(f"snapshot specs differ: {a.spec} vs {b.spec}")
    diffs = {}
    failing = []
    for name in COLUMNS:
        d = float(np.abs(a.column(name) - b.column(name)).max())
        diffs[name] = d
        if d > abs_tol:
            failing.append(name)
    return SnapshotDiff(abs_tol, diffs, not failing, failing)

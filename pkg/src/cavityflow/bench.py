"""Region profiler and scaling-benchmark harness.

The profiler is a stack of explicitly instrumented regions driven by the
sequential part of the program: only the driver thread enters and exits
regions, and time spent in worker threads is charged to whatever region
encloses the dispatch.  Region identity is the (parent, name) pair, so a
``dot`` timed inside ``pcg`` stays distinct from a hypothetical ``dot``
elsewhere.  Timing uses the monotonic wall clock; there is no hardware
counter collection.
"""

import csv
import json
import time
from dataclasses import dataclass, replace as dc_replace

__all__ = [
    "RegionStats",
    "Profiler",
    "ProfileError",
    "NULL_PROFILER",
    "render_report",
    "save_report",
    "load_report",
    "compare_reports",
    "render_comparison",
    "scaling_sweep",
    "write_scaling_csv",
]


class ProfileError(RuntimeError):
    pass


@dataclass
class RegionStats:
    name: str
    parent: str | None
    calls: int
    inclusive_seconds: float
    fraction: float


class _Region:
    __slots__ = ("_prof", "_name")

    def __init__(self, prof, name):
        self._prof = prof
        self._name = name

    def __enter__(self):
        self._prof.enter(self._name)

    def __exit__(self, exc_type, exc, tb):
        self._prof.exit(self._name)
        return False


class Profiler:
    """Accumulates call counts and inclusive wall time per nested region."""

    def __init__(self):
        self._nodes = {}  # path tuple -> [calls, total_ns]
        self._path = []
        self._starts = []

    def enter(self, name: str):
        self._path.append(name)
        self._starts.append(time.perf_counter_ns())

    def exit(self, name: str):
        if not self._path or self._path[-1] != name:
            open_name = self._path[-1] if self._path else None
            raise ProfileError(
                f"unbalanced region exit: got {name!r} while {open_name!r} is open"
            )
        elapsed = time.perf_counter_ns() - self._starts.pop()
        key = tuple(self._path)
        self._path.pop()
        node = self._nodes.get(key)
        if node is None:
            self._nodes[key] = [1, elapsed]
        else:
            node[0] += 1
            node[1] += elapsed

    def region(self, name: str) -> _Region:
        return _Region(self, name)

    def reset(self):
        if self._path:
            raise ProfileError(f"cannot reset while region {self._path[-1]!r} is open")
        self._nodes.clear()

    def stats(self) -> list[RegionStats]:
        """Tree-ordered region records; fractions are relative to the root time."""
        if self._path:
            raise ProfileError(f"region {self._path[-1]!r} is still open")
        children = {}
        for path in self._nodes:
            children.setdefault(path[:-1], []).append(path)
        root_total = sum(self._nodes[p][1] for p in children.get((), []))
        out = []

        def visit(path):
            calls, ns = self._nodes[path]
            secs = ns * 1e-9
            if root_total > 0:
                frac = ns / root_total
            else:
                frac = 1.0 if len(path) == 1 else 0.0
            parent = path[-2] if len(path) > 1 else None
            out.append(RegionStats(path[-1], parent, calls, secs, frac))
            for child in children.get(path, []):
                visit(child)

        for top in children.get((), []):
            visit(top)
        return out


class _NullRegion:
    __slots__ = ()

    def __enter__(self):
        return None

    def __exit__(self, exc_type, exc, tb):
        return False


_NULL_REGION = _NullRegion()


class NullProfiler:
    """Drop-in no-op profiler."""

    def enter(self, name):
        pass

    def exit(self, name):
        pass

    def region(self, name):
        return _NULL_REGION

    def stats(self):
        return []


NULL_PROFILER = NullProfiler()


# ---------------------------------------------------------------------------
# reporting


def _tree_prefixes(stats: list[RegionStats]) -> list[str]:
    """Box-drawing prefixes matching the order produced by Profiler.stats()."""
    # depth of each record, recovered from the parent chain order
    depths = []
    stack = []  # names of open ancestors
    for rec in stats:
        while stack and stack[-1] != rec.parent:
            stack.pop()
        depths.append(len(stack))
        stack.append(rec.name)

    def is_last(idx):
        # last sibling iff no later record at the same depth before depth drops
        for later in range(idx + 1, len(stats)):
            if depths[later] < depths[idx]:
                break
            if depths[later] == depths[idx]:
                return False
        return True

    prefixes = []
    ancestors = []  # (depth, was_last) of open ancestors
    for idx in range(len(stats)):
        d = depths[idx]
        while ancestors and ancestors[-1][0] >= d:
            ancestors.pop()
        last = is_last(idx)
        if d == 0:
            prefixes.append("")
        else:
            trunk = "".join("   " if a_last else "│  " for _, a_last in ancestors[1:])
            prefixes.append(trunk + ("└─ " if last else "├─ "))
        ancestors.append((d, last))
    return prefixes


def render_report(stats: list[RegionStats]) -> str:
    """Human-readable hotspot table, tree ordered."""
    prefixes = _tree_prefixes(stats)
    names = [p + r.name for p, r in zip(prefixes, stats)]
    width = max((len(s) for s in names), default=4)
    width = max(width, len("Region"))
    lines = [f"{'Region':<{width}}  {'Calls':>8}  {'Incl. s':>10}  {'Rt. %':>7}"]
    for name, rec in zip(names, stats):
        lines.append(
            f"{name:<{width}}  {rec.calls:>8d}  {rec.inclusive_seconds:>10.3f}  "
            f"{100.0 * rec.fraction:>7.2f}"
        )
    return "\n".join(lines)


def save_report(stats: list[RegionStats], path):
    records = [
        {
            "name": r.name,
            "parent": r.parent,
            "calls": r.calls,
            "inclusive_seconds": r.inclusive_seconds,
            "fraction": r.fraction,
        }
        for r in stats
    ]
    with open(path, "w", encoding="utf-8") as f:
        json.dump(records, f, indent=2)
        f.write("\n")


def load_report(path) -> list[RegionStats]:
    with open(path, "r", encoding="utf-8") as f:
        records = json.load(f)
    return [
        RegionStats(r["name"], r["parent"], r["calls"], r["inclusive_seconds"], r["fraction"])
        for r in records
    ]


def compare_reports(a: list[RegionStats], b: list[RegionStats]) -> list[dict]:
    """Merge two reports by (parent, name) and add relative-change columns.

    ``total_change_pct`` compares inclusive times, ``per_call_change_pct``
    compares per-call times; regions present in only one report get None in
    the other report's columns.
    """
    index_a = {(r.parent, r.name): r for r in a}
    index_b = {(r.parent, r.name): r for r in b}
    keys = list(index_a)
    keys += [k for k in index_b if k not in index_a]
    rows = []
    for parent, name in keys:
        ra = index_a.get((parent, name))
        rb = index_b.get((parent, name))
        row = {
            "name": name,
            "parent": parent,
            "calls_a": ra.calls if ra else None,
            "seconds_a": ra.inclusive_seconds if ra else None,
            "calls_b": rb.calls if rb else None,
            "seconds_b": rb.inclusive_seconds if rb else None,
            "total_change_pct": None,
            "per_call_change_pct": None,
        }
        if ra and rb and ra.inclusive_seconds > 0:
            row["total_change_pct"] = (
                100.0 * (rb.inclusive_seconds - ra.inclusive_seconds) / ra.inclusive_seconds
            )
            pa = ra.inclusive_seconds / ra.calls
            pb = rb.inclusive_seconds / rb.calls
            row["per_call_change_pct"] = 100.0 * (pb - pa) / pa
        rows.append(row)
    return rows


def render_comparison(rows: list[dict]) -> str:
    def fmt(v, spec):
        return "-" if v is None else format(v, spec)

    width = max((len(r["name"]) for r in rows), default=6)
    width = max(width, len("Region"))
    lines = [
        f"{'Region':<{width}}  {'Calls A':>8} {'Secs A':>10}  {'Calls B':>8} {'Secs B':>10}"
        f"  {'Ttl %':>8} {'Per-call %':>10}"
    ]
    for r in rows:
        lines.append(
            f"{r['name']:<{width}}  {fmt(r['calls_a'], 'd'):>8} {fmt(r['seconds_a'], '.3f'):>10}"
            f"  {fmt(r['calls_b'], 'd'):>8} {fmt(r['seconds_b'], '.3f'):>10}"
            f"  {fmt(r['total_change_pct'], '+.2f'):>8} {fmt(r['per_call_change_pct'], '+.2f'):>10}"
        )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# strong scaling


def scaling_sweep(cfg, thread_counts) -> list[tuple[int, str, float]]:
    """Run the configured problem once per thread count.

    Returns one ``(threads, region, seconds)`` row per recorded region and
    thread count.  Snapshot output is disabled during the sweep so the rows
    reflect compute regions only.
    """
    from .sim import run  # local import to avoid a module cycle

    if not thread_counts:
        raise ValueError("at least one thread count is required")
    if any(t < 1 for t in thread_counts):
        raise ValueError(f"thread counts must be >= 1, got {list(thread_counts)}")
    # warm the jit kernels on a toy problem so the first row is not charged
    # for loading the compilation cache
    run(dc_replace(cfg, n=4, t_end=cfg.dt, threads=1, output_dir=None))
    rows = []
    for t in thread_counts:
        sweep_cfg = dc_replace(cfg, threads=int(t), output_dir=None)
        _, report = run(sweep_cfg)
        for rec in report.regions:
            rows.append((int(t), rec.name, rec.inclusive_seconds))
    return rows


def write_scaling_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["threads", "region", "seconds"])
        for threads, region, seconds in rows:
            writer.writerow([threads, region, repr(float(seconds))])

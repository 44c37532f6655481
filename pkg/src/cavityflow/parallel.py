"""Chunk-partitioned worker pool backing the thread-parallel kernels.

Kernels in this package are compiled with ``nogil=True`` and operate on a
contiguous index range ``[start, stop)``; the pool splits the full range into
one chunk per worker and dispatches them on plain threads.  With one thread
the chunks run inline, so single-threaded results are bitwise reproducible
and carry no pool overhead.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


class WorkerPool:
    """Fixed-size thread pool dispatching contiguous index chunks."""

    def __init__(self, threads: int = 1):
        if threads < 1:
            raise ValueError(f"thread count must be >= 1, got {threads}")
        self.threads = threads
        self._executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None

    def chunk_bounds(self, n_items: int) -> np.ndarray:
        chunks = max(1, min(self.threads, n_items)) if n_items > 0 else 1
        return np.linspace(0, n_items, chunks + 1).astype(np.int64)

    def run_chunks(self, fn, n_items: int, *args) -> list:
        """Call ``fn(*args, start, stop)`` once per chunk.

        Returns the per-chunk results in chunk order, so reductions over the
        returned list are deterministic for a fixed thread count.
        """
        bounds = self.chunk_bounds(n_items)
        if self._executor is None or len(bounds) <= 2:
            return [
                fn(*args, int(bounds[i]), int(bounds[i + 1]))
                for i in range(len(bounds) - 1)
            ]
        futures = [
            self._executor.submit(fn, *args, int(bounds[i]), int(bounds[i + 1]))
            for i in range(len(bounds) - 1)
        ]
        return [f.result() for f in futures]

    def close(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()
        return False

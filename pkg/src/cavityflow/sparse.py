"""Sparse matrix storage and the dense-vector kernels used by the solver.

Two storage forms are provided.  ``CsrMatrix`` is plain compressed-row
storage and is what the baseline code path assembles every time step.
``SymCsrMatrix`` keeps only the main diagonal and the strict upper triangle
of a symmetric matrix, roughly halving the stored values; the optimized code
path builds it once and reuses the pattern.

The vector kernels come in two flavours on purpose: ``add`` and ``scale``
allocate a fresh result (the baseline behaviour, deliberately wasteful)
while ``multiply_add_inplace`` fuses the multiply and the add into a single
in-place update.  All kernels run on float64 data.
"""

import numpy as np
from numba import njit

from .parallel import WorkerPool


def _as_f64(x) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.float64)


def _as_i64(x) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.int64)


class CsrMatrix:
    """Compressed-row sparse matrix (row_ptr / col_idx / values)."""

    def __init__(self, n_rows: int, n_cols: int, row_ptr, col_idx, values):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.row_ptr = _as_i64(row_ptr)
        self.col_idx = _as_i64(col_idx)
        self.values = _as_f64(values)
        _check_csr_structure(self.n_rows, self.n_cols, self.row_ptr, self.col_idx, self.values)

    @property
    def nnz(self) -> int:
        return len(self.values)

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @classmethod
    def from_dense(cls, a) -> "CsrMatrix":
        """Build from a dense array, keeping the exact nonzero entries."""
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got ndim={a.ndim}")
        rows, cols = np.nonzero(a)
        counts = np.bincount(rows, minlength=a.shape[0])
        row_ptr = np.concatenate(([0], np.cumsum(counts)))
        return cls(a.shape[0], a.shape[1], row_ptr, cols, a[rows, cols])

    def row_indices(self) -> np.ndarray:
        """Expanded row index of every stored entry."""
        return np.repeat(np.arange(self.n_rows, dtype=np.int64), np.diff(self.row_ptr))

    def diagonal(self) -> np.ndarray:
        """Main diagonal as a dense vector (absent entries count as 0)."""
        d = np.zeros(min(self.n_rows, self.n_cols))
        rows = self.row_indices()
        on_diag = rows == self.col_idx
        d[rows[on_diag]] = self.values[on_diag]
        return d


def _check_csr_structure(n_rows, n_cols, row_ptr, col_idx, values):
    if row_ptr.shape != (n_rows + 1,):
        raise ValueError(f"row_ptr must have length {n_rows + 1}, got {row_ptr.shape}")
    if row_ptr[0] != 0:
        raise ValueError(f"row_ptr[0] must be 0, got {row_ptr[0]}")
    if len(col_idx) != len(values):
        raise ValueError(f"col_idx and values lengths differ: {len(col_idx)} vs {len(values)}")
    if row_ptr[-1] != len(values):
        raise ValueError(f"row_ptr[-1]={row_ptr[-1]} must equal nnz={len(values)}")
    if np.any(np.diff(row_ptr) < 0):
        row = int(np.argmax(np.diff(row_ptr) < 0))
        raise ValueError(f"row_ptr decreases at row {row}")
    if len(col_idx) and (col_idx.min() < 0 or col_idx.max() >= n_cols):
        raise ValueError(f"column index out of range [0, {n_cols})")
    # strictly increasing columns within each row
    dif = np.diff(col_idx)
    if len(dif):
        interior = np.ones(len(dif), dtype=bool)
        bounds = row_ptr[1:-1]  # entry pairs straddling these positions span two rows
        bounds = bounds[(bounds > 0) & (bounds < len(col_idx))]
        interior[bounds - 1] = False
        if np.any(dif[interior] <= 0):
            bad = int(np.flatnonzero(interior & (dif <= 0))[0])
            row = int(np.searchsorted(row_ptr, bad, side="right")) - 1
            raise ValueError(f"column indices not strictly increasing in row {row}")


class SymCsrMatrix:
    """Symmetric matrix stored as main diagonal plus the strict upper triangle.

    Represents ``A = D + U + U^T``.  The transpose pattern of the upper
    triangle is cached at construction so both the matrix-vector product and
    triangular sweeps can walk the lower triangle without storing its values
    twice (``t_perm`` maps transpose entries back into ``values``).
    """

    def __init__(self, n: int, diag, row_ptr, col_idx, values):
        self.n = int(n)
        self.diag = _as_f64(diag)
        self.row_ptr = _as_i64(row_ptr)
        self.col_idx = _as_i64(col_idx)
        self.values = _as_f64(values)
        if self.diag.shape != (self.n,):
            raise ValueError(f"diag must have length {self.n}, got {self.diag.shape}")
        _check_csr_structure(self.n, self.n, self.row_ptr, self.col_idx, self.values)
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.row_ptr))
        if np.any(self.col_idx <= rows):
            bad = int(np.flatnonzero(self.col_idx <= rows)[0])
            raise ValueError(
                f"upper triangle holds entry ({rows[bad]}, {self.col_idx[bad]}) with col <= row"
            )
        # transpose (lower triangle) access pattern
        order = np.lexsort((rows, self.col_idx))
        self.t_row_ptr = np.concatenate(
            ([0], np.cumsum(np.bincount(self.col_idx, minlength=self.n)))
        ).astype(np.int64)
        self.t_col_idx = rows[order]
        self.t_perm = order.astype(np.int64)

    @property
    def nnz_stored(self) -> int:
        return self.n + len(self.values)

    def lower_values(self) -> np.ndarray:
        """Values of the strict lower triangle in t_row_ptr order (materialized)."""
        return self.values[self.t_perm]


def to_symmetric(a: CsrMatrix) -> SymCsrMatrix:
    """Convert a symmetric CSR matrix to diagonal + upper-triangle storage.

    Symmetry is verified exactly: every stored (i, j) must be mirrored by a
    stored (j, i) with a bitwise-equal value.  The pressure-system stencil
    assembles identical literals on both sides, so any tolerance here would
    only mask assembly bugs.
    """
    if a.n_rows != a.n_cols:
        raise ValueError(f"matrix must be square, got {a.shape}")
    rows = a.row_indices()
    upper = a.col_idx > rows
    lower = a.col_idx < rows
    on_diag = a.col_idx == rows
    diag = np.zeros(a.n_rows)
    diag[rows[on_diag]] = a.values[on_diag]

    ur, uc, uv = rows[upper], a.col_idx[upper], a.values[upper]
    lr, lc, lv = rows[lower], a.col_idx[lower], a.values[lower]
    # transpose of the upper triangle, ordered like the stored lower triangle
    order = np.lexsort((ur, uc))
    tur, tuc, tuv = uc[order], ur[order], uv[order]
    if len(lr) != len(ur):
        _report_asymmetry(ur, uc, uv, lr, lc, lv)
    pattern_ok = np.array_equal(tur, lr) and np.array_equal(tuc, lc)
    if not pattern_ok:
        _report_asymmetry(ur, uc, uv, lr, lc, lv)
    mism = tuv != lv
    if np.any(mism):
        p = int(np.flatnonzero(mism)[0])
        raise ValueError(
            f"matrix is not symmetric: A[{tuc[p]},{tur[p]}]={tuv[p]!r} "
            f"but A[{lr[p]},{lc[p]}]={lv[p]!r}"
        )

    counts = np.bincount(ur, minlength=a.n_rows)
    row_ptr = np.concatenate(([0], np.cumsum(counts)))
    return SymCsrMatrix(a.n_rows, diag, row_ptr, uc, uv)


def _report_asymmetry(ur, uc, uv, lr, lc, lv):
    upper_set = set(zip(ur.tolist(), uc.tolist()))
    lower_set = set((j, i) for i, j in zip(lr.tolist(), lc.tolist()))
    missing = sorted(upper_set.symmetric_difference(lower_set))[0]
    i, j = missing
    raise ValueError(
        f"matrix is not symmetric: entry ({i},{j}) has no stored mirror ({j},{i})"
    )


# ---------------------------------------------------------------------------
# kernels


@njit(cache=True, nogil=True)
def _spmv_range(row_ptr, col_idx, values, x, out, start, stop):
    for i in range(start, stop):
        s = 0.0
        for p in range(row_ptr[i], row_ptr[i + 1]):
            s += values[p] * x[col_idx[p]]
        out[i] = s
    return 0


@njit(cache=True, nogil=True)
def _spmv_sym_range(diag, row_ptr, col_idx, values, t_row_ptr, t_col_idx, t_perm, x, out, start, stop):
    for i in range(start, stop):
        s = diag[i] * x[i]
        for p in range(row_ptr[i], row_ptr[i + 1]):
            s += values[p] * x[col_idx[p]]
        for p in range(t_row_ptr[i], t_row_ptr[i + 1]):
            s += values[t_perm[p]] * x[t_col_idx[p]]
        out[i] = s
    return 0


@njit(cache=True, nogil=True)
def _dot_range(x, y, start, stop):
    s = 0.0
    for i in range(start, stop):
        s += x[i] * y[i]
    return s


@njit(cache=True, nogil=True)
def _maxpy_range(y, alpha, x, start, stop):
    for i in range(start, stop):
        y[i] += alpha * x[i]
    return 0


def _check_same_length(x, y):
    if len(x) != len(y):
        raise ValueError(f"vector lengths differ: {len(x)} vs {len(y)}")


def spmv(a: CsrMatrix, x: np.ndarray, out=None, pool: WorkerPool | None = None) -> np.ndarray:
    """y = A @ x for full CSR storage."""
    x = _as_f64(x)
    if len(x) != a.n_cols:
        raise ValueError(f"matrix has {a.n_cols} columns but x has length {len(x)}")
    if out is None:
        out = np.empty(a.n_rows)
    if pool is None:
        _spmv_range(a.row_ptr, a.col_idx, a.values, x, out, 0, a.n_rows)
    else:
        pool.run_chunks(_spmv_range, a.n_rows, a.row_ptr, a.col_idx, a.values, x, out)
    return out


def spmv_sym(s: SymCsrMatrix, x: np.ndarray, out=None, pool: WorkerPool | None = None) -> np.ndarray:
    """y = A @ x for diagonal + upper-triangle storage.

    Each stored upper entry (i, j) contributes to both y[i] (with x[j]) and
    y[j] (with x[i]); the second contribution is gathered through the cached
    transpose pattern, so rows partition the output and threads never race.
    """
    x = _as_f64(x)
    if len(x) != s.n:
        raise ValueError(f"matrix has dimension {s.n} but x has length {len(x)}")
    if out is None:
        out = np.empty(s.n)
    args = (s.diag, s.row_ptr, s.col_idx, s.values, s.t_row_ptr, s.t_col_idx, s.t_perm, x, out)
    if pool is None:
        _spmv_sym_range(*args, 0, s.n)
    else:
        pool.run_chunks(_spmv_sym_range, s.n, *args)
    return out


def dot(x: np.ndarray, y: np.ndarray, pool: WorkerPool | None = None) -> float:
    """Dot product.

    Without a pool this is a straight serial reduction; with a pool the
    per-chunk partial sums are combined in chunk order.  The association
    therefore differs across thread counts, so comparisons must use
    tolerances rather than bitwise equality.
    """
    _check_same_length(x, y)
    if pool is None or pool.threads == 1:
        return float(_dot_range(x, y, 0, len(x)))
    return float(sum(pool.run_chunks(_dot_range, len(x), x, y)))


def multiply_add_inplace(y: np.ndarray, alpha: float, x: np.ndarray, pool: WorkerPool | None = None) -> None:
    """y += alpha * x, in place, no allocation."""
    _check_same_length(x, y)
    if pool is None:
        _maxpy_range(y, alpha, x, 0, len(y))
    else:
        pool.run_chunks(_maxpy_range, len(y), y, alpha, x)


def add(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Element-wise sum in a freshly allocated vector (baseline code path)."""
    _check_same_length(x, y)
    return x + y


def scale(alpha: float, x: np.ndarray) -> np.ndarray:
    """alpha * x in a freshly allocated vector (baseline code path)."""
    return alpha * np.asarray(x, dtype=np.float64)

"""Preconditioners for the pressure solver.

Two kinds are supported.  The Jacobi preconditioner scales the residual by
the reciprocal diagonal; every entry is independent, so it parallelizes
trivially.  The simplified diagonal-based incomplete Cholesky (DIC)
preconditioner keeps the matrix's off-diagonal entries and replaces the
diagonal by a modified one computed over the existing sparsity pattern
(no fill-in):

    d[i] = A[i,i] - sum_{j < i, A[i,j] != 0} A[i,j]^2 / d[j]

and applies M = (L + D) D^-1 (D + L^T) through one forward and one backward
triangular sweep.  Both sweeps carry loop-to-loop dependencies and run
strictly sequentially by design; that is the entire point of offering the
Jacobi alternative.
"""

import numpy as np
from numba import njit

from .sparse import CsrMatrix, SymCsrMatrix, _as_f64, _as_i64


@njit(cache=True, nogil=True)
def _dic_modified_diag(lower_ptr, lower_col, lower_val, diag, out):
    for i in range(len(diag)):
        s = diag[i]
        for p in range(lower_ptr[i], lower_ptr[i + 1]):
            v = lower_val[p]
            s -= v * v / out[lower_col[p]]
        out[i] = s
        if s <= 0.0:
            return i
    return -1


@njit(cache=True, nogil=True)
def _dic_forward(lower_ptr, lower_col, lower_val, d, r, w):
    # (L + D) w = r
    for i in range(len(d)):
        s = r[i]
        for p in range(lower_ptr[i], lower_ptr[i + 1]):
            s -= lower_val[p] * w[lower_col[p]]
        w[i] = s / d[i]


@njit(cache=True, nogil=True)
def _dic_backward(upper_ptr, upper_col, upper_val, d, w, z):
    # (D + L^T) z = D w
    for i in range(len(d) - 1, -1, -1):
        s = 0.0
        for p in range(upper_ptr[i], upper_ptr[i + 1]):
            s += upper_val[p] * z[upper_col[p]]
        z[i] = w[i] - s / d[i]


def _triangles(a):
    """Strict lower and upper triangles plus diagonal, each triangle in CSR form."""
    if isinstance(a, SymCsrMatrix):
        upper = (a.row_ptr, a.col_idx, a.values)
        lower = (a.t_row_ptr, a.t_col_idx, a.lower_values())
        return lower, a.diag.copy(), upper, a.n
    if isinstance(a, CsrMatrix):
        if a.n_rows != a.n_cols:
            raise ValueError(f"matrix must be square, got {a.shape}")
        rows = a.row_indices()
        diag = a.diagonal()
        parts = []
        for mask in (a.col_idx < rows, a.col_idx > rows):
            counts = np.bincount(rows[mask], minlength=a.n_rows)
            ptr = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
            parts.append((ptr, _as_i64(a.col_idx[mask]), _as_f64(a.values[mask])))
        return parts[0], diag, parts[1], a.n_rows
    raise TypeError(f"unsupported matrix type {type(a).__name__}")


class JacobiPreconditioner:
    """Reciprocal-diagonal scaling; fully data-parallel."""

    kind = "jacobi"

    def __init__(self, inv_diag: np.ndarray):
        self.inv_diag = _as_f64(inv_diag)

    @property
    def n(self) -> int:
        return len(self.inv_diag)

    def apply(self, r: np.ndarray, out=None) -> np.ndarray:
        if len(r) != self.n:
            raise ValueError(f"preconditioner has dimension {self.n}, vector {len(r)}")
        if out is None:
            out = np.empty(self.n)
        np.multiply(r, self.inv_diag, out=out)
        return out


class DicPreconditioner:
    """Simplified diagonal-based incomplete Cholesky over the fixed pattern.

    Construction and application are sequential by contract; the triangular
    sweeps cannot be split across threads without changing the recurrence.
    """

    kind = "dic"

    def __init__(self, modified_diag, lower, upper):
        self.modified_diag = _as_f64(modified_diag)
        self._lower = lower  # (row_ptr, col_idx, values), strict lower triangle
        self._upper = upper

    @property
    def n(self) -> int:
        return len(self.modified_diag)

    def apply(self, r: np.ndarray, out=None) -> np.ndarray:
        if len(r) != self.n:
            raise ValueError(f"preconditioner has dimension {self.n}, vector {len(r)}")
        if out is None:
            out = np.empty(self.n)
        w = np.empty(self.n)
        _dic_forward(*self._lower, self.modified_diag, r, w)
        _dic_backward(*self._upper, self.modified_diag, w, out)
        return out


def jacobi_from(a) -> JacobiPreconditioner:
    """Jacobi preconditioner from a CsrMatrix or SymCsrMatrix."""
    if isinstance(a, SymCsrMatrix):
        diag = a.diag
    elif isinstance(a, CsrMatrix):
        diag = a.diagonal()
    else:
        raise TypeError(f"unsupported matrix type {type(a).__name__}")
    zero = np.flatnonzero(diag == 0.0)
    if len(zero):
        raise ValueError(f"zero diagonal entry at row {zero[0]}")
    return JacobiPreconditioner(1.0 / diag)


def dic_from(a) -> DicPreconditioner:
    """Simplified DIC preconditioner; the input must be SPD in exact arithmetic."""
    lower, diag, upper, n = _triangles(a)
    d = np.empty(n)
    bad = _dic_modified_diag(*lower, diag, d)
    if bad >= 0:
        raise ValueError(
            f"DIC breakdown at row {bad}: modified diagonal {d[bad]!r} <= 0 "
            "(matrix not SPD or pattern pathological)"
        )
    return DicPreconditioner(d, lower, upper)


def apply(p, r: np.ndarray, out: np.ndarray) -> np.ndarray:
    """Apply a preconditioner: out = M^-1 r."""
    return p.apply(r, out=out)

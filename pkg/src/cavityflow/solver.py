"""Preconditioned conjugate gradient over an abstract SPD operator.

The solver exists in the same two flavours as the vector kernels.  The
baseline variant allocates a fresh vector for every update (`add`/`scale`),
which is exactly how a first straightforward implementation tends to look.
The optimized variant works on preallocated buffers with fused in-place
updates and swaps the search-direction buffers instead of copying.

Both variants use the same recurrence and stopping rule: the recurrence
residual's 2-norm relative to ``||b||``, checked every iteration.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bench import NULL_PROFILER
from .sparse import add, dot, multiply_add_inplace, scale


class BreakdownError(RuntimeError):
    """p^T A p <= 0: the operator is not positive definite."""


@dataclass
class SolveStats:
    iterations: int
    final_residual_rel: float
    converged: bool


def pcg(
    apply_a,
    b: np.ndarray,
    x0: np.ndarray | None = None,
    precond=None,
    tol: float = 1e-6,
    max_iter: int = 1000,
    variant: str = "baseline",
    pool=None,
    profiler=None,
):
    """Solve A x = b for an SPD operator given as ``apply_a(x, out=None)``.

    ``apply_a`` may reuse ``out`` when given; the returned array is only read
    before the next call.  Returns ``(x, SolveStats)``; hitting ``max_iter``
    reports ``converged=False`` rather than raising, the caller decides.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    if variant not in ("baseline", "optimized"):
        raise ValueError(f"unknown variant {variant!r}")
    prof = profiler if profiler is not None else NULL_PROFILER
    b = np.asarray(b, dtype=np.float64)
    n = len(b)

    with prof.region("dot"):
        norm_b = math.sqrt(dot(b, b, pool))
    if norm_b == 0.0:
        # the exact solution of A x = 0
        return np.zeros(n), SolveStats(0, 0.0, True)

    if variant == "baseline":
        return _pcg_baseline(apply_a, b, x0, precond, tol, max_iter, norm_b, prof)
    return _pcg_optimized(apply_a, b, x0, precond, tol, max_iter, norm_b, pool, prof)


def _apply_precond(precond, r, out, prof):
    if precond is None:
        if out is None:
            return r.copy()
        out[:] = r
        return out
    with prof.region("precondition"):
        return precond.apply(r, out=out)


def _pcg_baseline(apply_a, b, x0, precond, tol, max_iter, norm_b, prof):
    if x0 is None:
        x = np.zeros(len(b))
        r = b.copy()
    else:
        x = np.array(x0, dtype=np.float64)
        with prof.region("spmv"):
            ax = apply_a(x)
        r = add(b, scale(-1.0, ax))

    z = _apply_precond(precond, r, None, prof)
    p = z.copy()
    rz = _timed_dot(r, z, None, prof)
    res_rel = math.inf
    iterations = 0
    converged = False
    while iterations < max_iter:
        with prof.region("spmv"):
            ap = apply_a(p)
        pap = _timed_dot(p, ap, None, prof)
        if pap <= 0.0:
            raise BreakdownError(f"p^T A p = {pap!r} at iteration {iterations + 1}")
        alpha = rz / pap
        with prof.region("operator*"):
            step_x = scale(alpha, p)
        with prof.region("operator+"):
            x = add(x, step_x)
        with prof.region("operator*"):
            step_r = scale(-alpha, ap)
        with prof.region("operator+"):
            r = add(r, step_r)
        iterations += 1
        res_rel = math.sqrt(_timed_dot(r, r, None, prof)) / norm_b
        if res_rel <= tol:
            converged = True
            break
        z = _apply_precond(precond, r, None, prof)
        rz_new = _timed_dot(r, z, None, prof)
        beta = rz_new / rz
        rz = rz_new
        with prof.region("operator*"):
            step_p = scale(beta, p)
        with prof.region("operator+"):
            p = add(z, step_p)
    return x, SolveStats(iterations, res_rel, converged)


def _pcg_optimized(apply_a, b, x0, precond, tol, max_iter, norm_b, pool, prof):
    n = len(b)
    r = b.copy()
    ap = np.empty(n)
    if x0 is None:
        x = np.zeros(n)
    else:
        x = np.array(x0, dtype=np.float64)
        with prof.region("spmv"):
            ap = apply_a(x, out=ap)
        with prof.region("multiply_add_inplace"):
            multiply_add_inplace(r, -1.0, ap, pool)

    z = _apply_precond(precond, r, np.empty(n), prof)
    p = z.copy()
    rz = _timed_dot(r, z, pool, prof)
    res_rel = math.inf
    iterations = 0
    converged = False
    while iterations < max_iter:
        with prof.region("spmv"):
            ap = apply_a(p, out=ap)
        pap = _timed_dot(p, ap, pool, prof)
        if pap <= 0.0:
            raise BreakdownError(f"p^T A p = {pap!r} at iteration {iterations + 1}")
        alpha = rz / pap
        with prof.region("multiply_add_inplace"):
            multiply_add_inplace(x, alpha, p, pool)
        with prof.region("multiply_add_inplace"):
            multiply_add_inplace(r, -alpha, ap, pool)
        iterations += 1
        res_rel = math.sqrt(_timed_dot(r, r, pool, prof)) / norm_b
        if res_rel <= tol:
            converged = True
            break
        z = _apply_precond(precond, r, z, prof)
        rz_new = _timed_dot(r, z, pool, prof)
        beta = rz_new / rz
        rz = rz_new
        # p <- z + beta p without allocating: update z in place, then swap
        with prof.region("multiply_add_inplace"):
            multiply_add_inplace(z, beta, p, pool)
        p, z = z, p
    return x, SolveStats(iterations, res_rel, converged)


def _timed_dot(x, y, pool, prof):
    with prof.region("dot"):
        return dot(x, y, pool)

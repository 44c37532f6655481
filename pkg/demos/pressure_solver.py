"""Use the sparse toolbox directly: solve one pressure system both ways.

Assembles the cavity's Poisson operator (full CSR and the symmetric
diagonal+triangle form), builds both preconditioners, and runs the
conjugate-gradient solver against a manufactured right-hand side.  The
point to notice: DIC buys roughly 3x fewer iterations, Jacobi buys a
trivially parallel per-iteration cost.
"""

import numpy as np

from cavityflow import dic_from, jacobi_from, pcg, spmv, spmv_sym, to_symmetric
from cavityflow.sim import poisson_full_csr, poisson_symmetric

n = 16
full = poisson_full_csr(n, 1.0)
sym = poisson_symmetric(n, 1.0)
print(f"operator: {full.n_rows} x {full.n_cols}, nnz {full.nnz} "
      f"(symmetric form stores {sym.nnz_stored})")

rng = np.random.default_rng(7)
b = rng.standard_normal(n**3)

x_ref = None
for name, matrix, op in (("full CSR", full, spmv), ("diag+triangle", sym, spmv_sym)):
    for precond_name, factory in (("dic", dic_from), ("jacobi", jacobi_from)):
        x, stats = pcg(
            lambda v, out=None, m=matrix, o=op: o(m, v, out=out),
            b,
            precond=factory(matrix),
            tol=1e-8,
        )
        if x_ref is None:
            x_ref = x
        drift = np.linalg.norm(x - x_ref) / np.linalg.norm(x_ref)
        print(f"{name:>14} + {precond_name:<6}: {stats.iterations:>3} iterations, "
              f"residual {stats.final_residual_rel:.2e}, drift vs first solve {drift:.1e}")

check = to_symmetric(full)
print("\nsymmetry check on the assembled operator passed "
      f"(upper triangle holds {len(check.values)} entries)")

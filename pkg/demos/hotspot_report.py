"""Profile the baseline and optimized variants and diff their hotspot tables.

Every run records nested regions (forcing, advection, pressure solve, the
solver kernels inside it, snapshot writes).  Comparing two reports adds the
relative total and per-call change columns; negative percentages mean the
optimized variant spends less.  The preconditioners differ on purpose --
the baseline default is the sequential DIC, the optimized variant swaps in
the parallel-friendly Jacobi and accepts more, cheaper iterations.
"""

from cavityflow import SimConfig, run
from cavityflow.bench import compare_reports, render_comparison, render_report, save_report

common = dict(n=32, dt=0.4, t_end=2.0, threads=1, output_dir=None)

print("== baseline (full CSR rebuilt per step, allocating kernels, DIC) ==")
_, base = run(SimConfig(variant="baseline", preconditioner="dic", **common))
print(render_report(base.regions))

print("\n== optimized (cached symmetric pattern, fused in-place kernels, Jacobi) ==")
_, opt = run(SimConfig(variant="optimized", preconditioner="jacobi", **common))
print(render_report(opt.regions))

print("\n== change (A = baseline, B = optimized) ==")
print(render_comparison(compare_reports(base.regions, opt.regions)))

save_report(base.regions, "report_baseline.json")
save_report(opt.regions, "report_optimized.json")
print("\nsaved report_baseline.json and report_optimized.json")

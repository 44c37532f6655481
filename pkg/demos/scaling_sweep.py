"""Strong-scaling sweep: run a fixed-size problem once per thread count.

Emits one (threads, region, seconds) row per region and thread count into
scaling.csv, the input format of viz/plot_scaling.py.  Worth knowing before
reading the numbers: the sequential DIC preconditioner is *expected* to stay
flat as threads grow, and on machines with few hardware cores everything
stays flat -- strong-scaling data only means something on the machine that
produced it.
"""

import os

from cavityflow import SimConfig, scaling_sweep
from cavityflow.bench import write_scaling_csv

cfg = SimConfig(n=32, dt=0.4, t_end=1.2, variant="optimized", preconditioner="jacobi")
thread_counts = [1, 2, 4]

rows = scaling_sweep(cfg, thread_counts)
write_scaling_csv(rows, "scaling.csv")

print(f"hardware cpus: {os.cpu_count()}")
print(f"{'threads':>7} {'region':<24} {'seconds':>9}")
for threads, region, seconds in rows:
    print(f"{threads:>7} {region:<24} {seconds:>9.4f}")
print("\nwrote scaling.csv (threads,region,seconds)")

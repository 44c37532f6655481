"""cavityflow: a compact lid-driven-cavity flow solver for performance experiments.

The package simulates incompressible flow in a closed cubic cavity whose top
wall drags the fluid sideways, forming a vortex.  It ships two code paths --
a deliberately naive ``baseline`` variant and an ``optimized`` variant -- plus
a region profiler and a strong-scaling harness so the difference between the
two can be measured rather than taken on faith.
"""

from .grid import GridSpec, VelocityField, ScalarField, cell_index, sample_velocity, divergence
from .sparse import (
    CsrMatrix,
    SymCsrMatrix,
    to_symmetric,
    spmv,
    spmv_sym,
    dot,
    multiply_add_inplace,
    add,
    scale,
)
from .precond import JacobiPreconditioner, DicPreconditioner, jacobi_from, dic_from
from .solver import pcg, SolveStats, BreakdownError
from .sim import SimConfig, SimState, initial_state, step, run, RunReport
from .snapshots import (
    Snapshot,
    snapshot_from_state,
    write_snapshot,
    read_snapshot,
    compare_snapshots,
)
from .bench import Profiler, RegionStats, render_report, scaling_sweep
from .parallel import WorkerPool

__version__ = "0.1.0"

__all__ = [
    "GridSpec",
    "VelocityField",
    "ScalarField",
    "cell_index",
    "sample_velocity",
    "divergence",
    "CsrMatrix",
    "SymCsrMatrix",
    "to_symmetric",
    "spmv",
    "spmv_sym",
    "dot",
    "multiply_add_inplace",
    "add",
    "scale",
    "JacobiPreconditioner",
    "DicPreconditioner",
    "jacobi_from",
    "dic_from",
    "pcg",
    "SolveStats",
    "BreakdownError",
    "SimConfig",
    "SimState",
    "initial_state",
    "step",
    "run",
    "RunReport",
    "Snapshot",
    "snapshot_from_state",
    "write_snapshot",
    "read_snapshot",
    "compare_snapshots",
    "Profiler",
    "RegionStats",
    "render_report",
    "scaling_sweep",
    "WorkerPool",
]

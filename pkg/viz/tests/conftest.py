import os
import sys

import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
VIZ_DIR = os.path.dirname(HERE)
for path in (VIZ_DIR, HERE):
    if path not in sys.path:
        sys.path.insert(0, path)

from drivers import run_solver  # noqa: E402


@pytest.fixture(scope="session")
def snapshot_dir(tmp_path_factory):
    """Snapshots of the small integration-scale run (n=8, 3 steps)."""
    out = tmp_path_factory.mktemp("snapshots")
    proc = run_solver(
        ["--size", "8", "--dt", "0.4", "--end-time", "1.2", "--output-dir", str(out)],
        cwd=str(out),
    )
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def scaling_csv(tmp_path_factory):
    """A three-thread-count sweep CSV produced by the solver CLI."""
    out = tmp_path_factory.mktemp("scaling")
    csv_path = out / "scaling.csv"
    proc = run_solver(
        [
            "--size", "6", "--dt", "0.4", "--end-time", "0.8", "--no-output",
            "--scaling-sweep", "1,2,3", "--scaling-out", str(csv_path),
        ],
        cwd=str(out),
    )
    assert proc.returncode == 0, proc.stderr
    return csv_path

import numpy as np
import pytest

from drivers import run_script
from series import SNAPSHOT_HEADER, load_scaling_csv, load_series, load_snapshot, mid_z_slice, step_of


class TestSeriesLoading:
    def test_load_snapshot_columns(self, snapshot_dir):
        snap = load_snapshot(snapshot_dir / "snapshot_0003.csv")
        assert snap.n == 8
        assert len(snap.p) == 512

    def test_series_is_ordered_and_consistent(self, snapshot_dir):
        series = load_series(snapshot_dir)
        assert len(series) == 4
        steps = [s for s, _ in series.entries]
        assert steps == sorted(steps)
        assert series.n == 8

    def test_step_parsing(self):
        assert step_of("snapshot_0015.csv") == 15
        assert step_of("whatever.csv") is None

    def test_mixed_grid_sizes_rejected(self, tmp_path):
        tiny = SNAPSHOT_HEADER + "\n" + "0.5,0.5,0.5,0,0,0,1\n"
        (tmp_path / "snapshot_0000.csv").write_text(tiny)
        (tmp_path / "snapshot_0001.csv").write_text(SNAPSHOT_HEADER + "\n" + "0.5,0.5,0.5,0,0,0,1\n" * 8)
        with pytest.raises(ValueError, match="grid size"):
            load_series(tmp_path)

    def test_bad_header_names_line(self, tmp_path):
        path = tmp_path / "snapshot_0000.csv"
        path.write_text("x,y,z\n")
        with pytest.raises(ValueError, match="line 1"):
            load_snapshot(path)

    def test_bad_number_names_line(self, tmp_path):
        path = tmp_path / "snapshot_0000.csv"
        path.write_text(SNAPSHOT_HEADER + "\n0.5,0.5,0.5,0,oops,0,1\n")
        with pytest.raises(ValueError, match="line 2"):
            load_snapshot(path)

    def test_mid_z_slice_shape(self, snapshot_dir):
        snap = load_snapshot(snapshot_dir / "snapshot_0003.csv")
        x, y, u, v = mid_z_slice(snap)
        assert x.shape == (8, 8)
        # x varies along columns, y along rows
        assert np.all(np.diff(x[0, :]) > 0)
        assert np.all(np.diff(y[:, 0]) > 0)


class TestPlotSlice:
    @pytest.mark.parametrize("kind", ["quiver", "stream"])
    def test_renders_final_snapshot(self, snapshot_dir, tmp_path, kind):
        out = tmp_path / f"{kind}.png"
        proc = run_script(
            "plot_slice.py",
            ["--input", str(snapshot_dir / "snapshot_0003.csv"), "--kind", kind, "--out", str(out)],
            cwd=str(tmp_path),
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists() and out.stat().st_size > 0

    def test_rest_state_renders_zero_arrows(self, snapshot_dir, tmp_path):
        out = tmp_path / "rest.png"
        proc = run_script(
            "plot_slice.py",
            ["--input", str(snapshot_dir / "snapshot_0000.csv"), "--out", str(out)],
            cwd=str(tmp_path),
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists() and out.stat().st_size > 0

    def test_invalid_csv_fails_naming_line(self, tmp_path):
        bad = tmp_path / "broken.csv"
        bad.write_text(SNAPSHOT_HEADER + "\n1,2,3\n")
        out = tmp_path / "x.png"
        proc = run_script(
            "plot_slice.py", ["--input", str(bad), "--out", str(out)], cwd=str(tmp_path)
        )
        assert proc.returncode == 1
        assert "line 2" in proc.stderr
        assert not out.exists()

    def test_missing_columns_fail(self, tmp_path):
        bad = tmp_path / "cols.csv"
        bad.write_text("a,b\n1,2\n")
        proc = run_script(
            "plot_slice.py",
            ["--input", str(bad), "--out", str(tmp_path / "y.png")],
            cwd=str(tmp_path),
        )
        assert proc.returncode == 1
        assert "expected columns" in proc.stderr

    def test_does_not_mutate_input(self, snapshot_dir, tmp_path):
        src = snapshot_dir / "snapshot_0001.csv"
        before = src.read_bytes()
        run_script(
            "plot_slice.py",
            ["--input", str(src), "--kind", "stream", "--out", str(tmp_path / "s.png")],
            cwd=str(tmp_path),
        )
        assert src.read_bytes() == before


class TestPlotScaling:
    def test_renders_sweep(self, scaling_csv, tmp_path):
        out = tmp_path / "scaling.png"
        proc = run_script(
            "plot_scaling.py", ["--input", str(scaling_csv), "--out", str(out)], cwd=str(tmp_path)
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists() and out.stat().st_size > 0
        rows = load_scaling_csv(scaling_csv)
        assert {t for t, _, _ in rows} == {1, 2, 3}

    def test_single_row_csv(self, tmp_path):
        csv = tmp_path / "one.csv"
        csv.write_text("threads,region,seconds\n1,pcg,0.5\n")
        out = tmp_path / "one.png"
        proc = run_script(
            "plot_scaling.py", ["--input", str(csv), "--out", str(out)], cwd=str(tmp_path)
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists() and out.stat().st_size > 0

    def test_two_inputs_overlaid(self, scaling_csv, tmp_path):
        other = tmp_path / "variant2.csv"
        other.write_text(scaling_csv.read_text())
        out = tmp_path / "both.png"
        proc = run_script(
            "plot_scaling.py",
            ["--input", str(scaling_csv), "--input", str(other), "--out", str(out)],
            cwd=str(tmp_path),
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists() and out.stat().st_size > 0

    def test_malformed_csv_fails(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("threads,region\n1,pcg\n")
        out = tmp_path / "no.png"
        proc = run_script(
            "plot_scaling.py", ["--input", str(bad), "--out", str(out)], cwd=str(tmp_path)
        )
        assert proc.returncode == 1
        assert not out.exists()

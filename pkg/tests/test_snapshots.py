import numpy as np
import pytest

from cavityflow.grid import GridSpec
from cavityflow.sim import SimConfig, initial_state
from cavityflow.snapshots import (
    SNAPSHOT_HEADER,
    Snapshot,
    compare_snapshots,
    format_value,
    read_snapshot,
    snapshot_filename,
    snapshot_from_state,
    write_snapshot,
)


def random_state(rng, n=4):
    cfg = SimConfig(n=n, output_dir=None)
    state = initial_state(cfg)
    state.vel.u[:] = rng.standard_normal(state.vel.u.shape)
    state.vel.v[:] = rng.standard_normal(state.vel.v.shape)
    state.vel.w[:] = rng.standard_normal(state.vel.w.shape)
    state.p.data[:] = rng.standard_normal(state.p.data.shape)
    return state


class TestFormatting:
    @pytest.mark.parametrize(
        "value,text",
        [
            (0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (-0.0, "-0"),
            (-2.25, "-2.25"),
            (1e22, "1e+22"),
            (123456789012345.0, "123456789012345"),
        ],
    )
    def test_known_values(self, value, text):
        assert format_value(value) == text

    def test_round_trips_exactly(self, rng):
        for v in rng.standard_normal(200) * 10.0 ** rng.integers(-12, 12, 200):
            assert float(format_value(v)) == v

    def test_filename_convention(self):
        assert snapshot_filename(0) == "snapshot_0000.csv"
        assert snapshot_filename(15) == "snapshot_0015.csv"


class TestWrite:
    def test_single_cell_rest_state_exact_bytes(self, tmp_path):
        # n=1 is below the simulation minimum but exercises the writer spec
        spec = GridSpec(1)
        snap = Snapshot(
            spec,
            *(np.array([c]) for c in (0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 1.0)),
        )
        path = tmp_path / "snap.csv"
        write_snapshot(snap, path)
        assert path.read_bytes() == b"x,y,z,u,v,w,p\n0.5,0.5,0.5,0,0,0,1\n"

    def test_rows_in_cell_index_order(self, tmp_path):
        cfg = SimConfig(n=2, output_dir=None)
        state = initial_state(cfg)
        path = tmp_path / "s.csv"
        write_snapshot(state, path)
        lines = path.read_text().splitlines()
        assert lines[0] == SNAPSHOT_HEADER
        assert len(lines) == 9
        # first row is cell (0,0,0), second is (1,0,0): x advances fastest
        assert lines[1].startswith("0.5,0.5,0.5,")
        assert lines[2].startswith("1.5,0.5,0.5,")

    @pytest.mark.parametrize("threads", [1, 3])
    def test_writer_modes_byte_identical(self, tmp_path, rng, threads):
        state = random_state(rng, n=8)
        serial = tmp_path / "serial.csv"
        parallel = tmp_path / "parallel.csv"
        write_snapshot(state, serial, mode="serial")
        write_snapshot(state, parallel, mode="buffered_parallel", threads=threads)
        assert serial.read_bytes() == parallel.read_bytes()

    def test_unknown_mode_rejected(self, tmp_path, rng):
        with pytest.raises(ValueError, match="mode"):
            write_snapshot(random_state(rng), tmp_path / "x.csv", mode="mmap")

    def test_write_failure_names_path(self, rng):
        with pytest.raises(OSError, match="no/such/dir"):
            write_snapshot(random_state(rng), "no/such/dir/snap.csv")


class TestRead:
    def test_round_trip_exact(self, tmp_path, rng):
        state = random_state(rng, n=3)
        path = tmp_path / "s.csv"
        write_snapshot(state, path)
        snap = read_snapshot(path)
        want = snapshot_from_state(state)
        assert snap.spec == want.spec
        for col in ("x", "y", "z", "u", "v", "w", "p"):
            assert np.array_equal(snap.column(col), want.column(col))

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y,z\n")
        with pytest.raises(ValueError, match="line 1"):
            read_snapshot(path)

    def test_non_cubic_row_count(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(SNAPSHOT_HEADER + "\n" + "0.5,0.5,0.5,0,0,0,1\n" * 7)
        with pytest.raises(ValueError, match="not a cube"):
            read_snapshot(path)

    def test_unparsable_number_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(SNAPSHOT_HEADER + "\n0.5,0.5,0.5,0,zero,0,1\n")
        with pytest.raises(ValueError, match="line 2"):
            read_snapshot(path)

    def test_wrong_field_count_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(SNAPSHOT_HEADER + "\n0.5,0.5,0.5,0,0,1\n")
        with pytest.raises(ValueError, match="line 2"):
            read_snapshot(path)

    def test_infers_cell_size(self, tmp_path, rng):
        cfg = SimConfig(n=2, h=0.25, output_dir=None)
        state = initial_state(cfg)
        path = tmp_path / "s.csv"
        write_snapshot(state, path)
        assert read_snapshot(path).spec == GridSpec(2, 0.25)


class TestCompare:
    def test_identical_pass(self, rng):
        a = snapshot_from_state(random_state(rng))
        diff = compare_snapshots(a, a, abs_tol=0.0)
        assert diff.passed
        assert max(diff.max_abs_diff.values()) == 0.0

    def test_perturbation_fails_naming_column(self, rng):
        state = random_state(rng)
        a = snapshot_from_state(state)
        b = snapshot_from_state(state)
        b.v[5] += 1e-3
        diff = compare_snapshots(a, b, abs_tol=1e-6)
        assert not diff.passed
        assert diff.failing_columns == ["v"]
        assert "v" in diff.summary()

    def test_within_tolerance_passes(self, rng):
        state = random_state(rng)
        a = snapshot_from_state(state)
        b = snapshot_from_state(state)
        b.p += 1e-9
        assert compare_snapshots(a, b, abs_tol=1e-6).passed

    def test_spec_mismatch_rejected(self, rng):
        a = snapshot_from_state(random_state(rng, n=2))
        b = snapshot_from_state(random_state(rng, n=3))
        with pytest.raises(ValueError, match="specs differ"):
            compare_snapshots(a, b, abs_tol=1.0)


class TestRandomStatesProperty:
    def test_writer_mode_equivalence_random_states(self, tmp_path, rng):
        for trial in range(5):
            n = int(rng.integers(2, 8))
            state = random_state(rng, n=n)
            f1 = tmp_path / f"a{trial}.csv"
            f2 = tmp_path / f"b{trial}.csv"
            write_snapshot(state, f1, mode="serial")
            write_snapshot(state, f2, mode="buffered_parallel", threads=4)
            assert f1.read_bytes() == f2.read_bytes()

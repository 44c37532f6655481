import os

import pytest

from cavityflow.cli import THREADS_ENV_VAR, main, parse_args


class TestParsing:
    def test_defaults_reproduce_reference_run(self):
        args = parse_args([])
        assert args.size == 100
        assert args.dt == 0.4
        assert args.end_time == 6.0
        assert args.variant == "baseline"
        assert args.preconditioner == "dic"
        assert args.threads == 1

    def test_step_arithmetic_from_flags(self):
        from cavityflow.cli import _config_from_args

        cfg = _config_from_args(parse_args(["--size", "16", "--dt", "0.1", "--end-time", "1"]))
        assert cfg.num_steps == 10

    def test_unknown_preconditioner_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            parse_args(["--preconditioner", "foo"])
        assert exc.value.code == 2

    def test_unknown_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["--frobnicate"])
        assert exc.value.code == 2

    def test_nonpositive_dt_is_usage_error(self):
        for bad in ("0", "-0.4", "nan?"):
            with pytest.raises(SystemExit) as exc:
                parse_args(["--dt", bad])
            assert exc.value.code == 2

    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            parse_args(["--help"])
        assert exc.value.code == 0
        assert "--preconditioner" in capsys.readouterr().out

    def test_env_var_sets_threads(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "3")
        assert parse_args([]).threads == 3

    def test_flag_wins_over_env_var(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "3")
        assert parse_args(["--threads", "2"]).threads == 2

    def test_bad_env_var_is_usage_error(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "zero")
        with pytest.raises(SystemExit) as exc:
            parse_args([])
        assert exc.value.code == 2


class TestMain:
    def test_small_run_exits_zero(self, capsys):
        rc = main(["--size", "8", "--end-time", "0.8", "--dt", "0.4", "--no-output"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "2 steps" in out

    def test_run_writes_snapshots(self, tmp_path, capsys):
        out_dir = tmp_path / "snaps"
        rc = main(
            ["--size", "4", "--end-time", "0.4", "--dt", "0.4", "--output-dir", str(out_dir)]
        )
        assert rc == 0
        assert (out_dir / "snapshot_0000.csv").exists()
        assert (out_dir / "snapshot_0001.csv").exists()

    def test_invalid_output_dir_fails_naming_path(self, tmp_path, capsys, caplog):
        blocker = tmp_path / "file"
        blocker.write_text("not a directory")
        bad = blocker / "sub"
        rc = main(["--size", "4", "--end-time", "0.4", "--output-dir", str(bad)])
        assert rc == 1
        assert str(blocker) in caplog.text

    def test_profile_prints_hotspot_rows(self, capsys):
        rc = main(["--size", "6", "--end-time", "0.8", "--dt", "0.4", "--no-output", "--profile"])
        assert rc == 0
        out = capsys.readouterr().out
        for region in ("pcg", "precondition", "spmv", "dot"):
            assert region in out

    def test_profile_out_saves_json(self, tmp_path, capsys):
        report = tmp_path / "report.json"
        rc = main(
            [
                "--size", "4", "--end-time", "0.4", "--no-output",
                "--profile-out", str(report),
            ]
        )
        assert rc == 0
        assert report.exists()
        from cavityflow.bench import load_report

        names = {r.name for r in load_report(report)}
        assert "solveAdvection" in names

    def test_scaling_sweep_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "scaling.csv"
        rc = main(
            [
                "--size", "4", "--end-time", "0.4", "--no-output",
                "--scaling-sweep", "1,2", "--scaling-out", str(out),
            ]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "threads,region,seconds"
        assert len(lines) > 2

    def test_console_entry_point_installed(self):
        import shutil

        exe = shutil.which("cavityflow")
        assert exe is not None

"""Command-line entry point wiring config, simulation, profiling, benchmarking.

Exit status: 0 on success, 2 on usage errors, 1 on runtime failures.
The worker count comes from ``--threads`` when given, else from the
``CFDSCOPE_THREADS`` environment variable, else 1.
"""

import argparse
import logging
import os
import sys

from . import bench, sim

log = logging.getLogger("cavityflow")

THREADS_ENV_VAR = "CFDSCOPE_THREADS"


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _nonnegative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _thread_list(text: str) -> list[int]:
    try:
        counts = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated integer list")
    if not counts or any(t < 1 for t in counts):
        raise argparse.ArgumentTypeError(f"thread counts must be >= 1, got {text!r}")
    return counts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityflow",
        description="Lid-driven cavity flow solver with baseline and optimized code paths.",
    )
    parser.add_argument("--size", type=_positive_int, default=100, metavar="N",
                        help="cells per side (default: 100)")
    parser.add_argument("--dt", type=_positive_float, default=0.4, metavar="SECONDS",
                        help="time step (default: 0.4)")
    parser.add_argument("--end-time", type=_nonnegative_float, default=6.0, metavar="SECONDS",
                        help="total simulated time (default: 6)")
    parser.add_argument("--lid-accel", type=_float, default=1.0, metavar="A",
                        help="lid acceleration along +x (default: 1.0)")
    parser.add_argument("--density", type=_positive_float, default=1.0, metavar="RHO",
                        help="fluid density (default: 1.0)")
    parser.add_argument("--tol", type=_positive_float, default=1e-6, metavar="TOL",
                        help="solver relative residual threshold (default: 1e-6)")
    parser.add_argument("--max-iters", type=_positive_int, default=1000, metavar="N",
                        help="solver iteration cap (default: 1000)")
    parser.add_argument("--preconditioner", choices=sim.PRECONDITIONERS, default="dic",
                        help="pressure-solver preconditioner (default: dic)")
    parser.add_argument("--variant", choices=sim.VARIANTS, default="baseline",
                        help="code path to run (default: baseline)")
    parser.add_argument("--threads", type=_positive_int, default=None, metavar="N",
                        help=f"worker threads (default: ${THREADS_ENV_VAR} or 1)")
    parser.add_argument("--output-dir", default="snapshots", metavar="DIR",
                        help="snapshot directory (default: snapshots)")
    parser.add_argument("--no-output", action="store_true",
                        help="disable snapshot writing")
    parser.add_argument("--advect-block", type=_positive_int, default=8, metavar="B",
                        help="advection tile edge for the optimized variant (default: 8)")
    parser.add_argument("--warm-start", action="store_true",
                        help="start each pressure solve from the previous step's pressure")
    parser.add_argument("--profile", action="store_true",
                        help="print the hotspot report after the run")
    parser.add_argument("--profile-out", default=None, metavar="PATH",
                        help="also save the hotspot report as JSON")
    parser.add_argument("--scaling-sweep", type=_thread_list, default=None, metavar="T1,T2,...",
                        help="run once per thread count and emit a scaling CSV instead")
    parser.add_argument("--scaling-out", default="scaling.csv", metavar="PATH",
                        help="scaling CSV path (default: scaling.csv)")
    parser.add_argument("--log-level", choices=("debug", "info", "warning", "error"),
                        default="info", help="stderr log level (default: info)")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        env = os.environ.get(THREADS_ENV_VAR)
        if env is not None:
            try:
                args.threads = _positive_int(env)
            except argparse.ArgumentTypeError as exc:
                parser.error(f"{THREADS_ENV_VAR}: {exc}")
        else:
            args.threads = 1
    return args


def _config_from_args(args) -> sim.SimConfig:
    return sim.SimConfig(
        n=args.size,
        dt=args.dt,
        t_end=args.end_time,
        lid_accel=args.lid_accel,
        density=args.density,
        tol=args.tol,
        max_iter=args.max_iters,
        preconditioner=args.preconditioner,
        variant=args.variant,
        output_dir=None if args.no_output else args.output_dir,
        threads=args.threads,
        advect_block=args.advect_block,
        warm_start=args.warm_start,
    )


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, args.log_level.upper()),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.scaling_sweep is not None:
        try:
            rows = bench.scaling_sweep(cfg, args.scaling_sweep)
            bench.write_scaling_csv(rows, args.scaling_out)
        except OSError as exc:
            log.error("scaling sweep failed: %s", exc)
            return 1
        print(f"wrote {len(rows)} scaling rows to {args.scaling_out}")
        return 0

    try:
        state, report = sim.run(cfg)
    except OSError as exc:
        log.error("run failed: %s", exc)
        return 1

    iters = [s.solve.iterations for s in report.steps]
    print(
        f"completed {len(report.steps)} steps (t = {state.t:g}) in "
        f"{report.wall_seconds:.3f} s [{cfg.variant}, {cfg.preconditioner}, "
        f"{cfg.threads} thread(s)]"
    )
    if iters:
        print(
            f"pressure solves: {sum(iters)} iterations total "
            f"(min {min(iters)}, max {max(iters)}), "
            f"final projection residual {report.steps[-1].div_post:.3e}"
        )
    if report.snapshot_paths:
        print(f"wrote {len(report.snapshot_paths)} snapshots to {cfg.output_dir}")
    if args.profile:
        print(bench.render_report(report.regions))
    if args.profile_out:
        try:
            bench.save_report(report.regions, args.profile_out)
        except OSError as exc:
            log.error("could not save profile report: %s", exc)
            return 1
        print(f"wrote profile report to {args.profile_out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

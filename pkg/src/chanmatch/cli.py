"""Command-line driver.

Exit codes: 0 converged, 1 configuration error, 2 stopped at max_iters.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .baselines import compare, extract_threshold_1d
from .classifier import (
    CmConfig,
    IterationTrace,
    init_horizontal,
    init_random,
    init_threshold_1d,
    init_vertical,
    run_cm,
)
from .config import ConfigError, load_config
from .errors import ChanMatchError, MultiBoundaryError
from .generators import example1_setup, example2_setup
from .outputs import (
    atomic_write,
    fmt,
    render_partition,
    write_compare,
    write_partition,
    write_trace,
)

EXIT_OK, EXIT_CONFIG, EXIT_NOT_CONVERGED = 0, 1, 2
DEFAULT_OUT = Path("cm_output")


def write_run_outputs(trace: IterationTrace, out_dir: Path, render: bool) -> dict:
    """Write the trace, every partition and a key/value report; return the report."""
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trace(trace, out_dir / "trace.csv")
    for k, part in enumerate(trace.partitions):
        write_partition(part, out_dir / f"partition_iter_{k}.csv")
        if render:
            render_partition(part, out_dir / f"partition_iter_{k}.ppm")
    report = {
        "converged": str(trace.converged).lower(),
        "stop_reason": trace.stop_reason,
        "iterations": len(trace.records),
        "initial_mi_bits": fmt(trace.initial_mi_bits),
        "final_mi_bits": fmt(trace.final_mi_bits),
    }
    final = trace.final_partition
    if final.grid.ndim == 1:
        try:
            report["threshold"] = fmt(extract_threshold_1d(final))
        except MultiBoundaryError as exc:
            report["threshold"] = ""
            report["boundaries"] = " ".join(fmt(c) for c in exc.crossings)
    atomic_write(out_dir / "report.txt", "".join(f"{k} = {v}\n" for k, v in report.items()))
    return report


def _cm_config(base: CmConfig, args) -> CmConfig:
    kw = {}
    if args.max_iters is not None:
        kw["max_iters"] = args.max_iters
    if args.mi_tol is not None:
        kw["mi_tol"] = args.mi_tol
    return dataclasses.replace(base, **kw) if kw else base


def _exit_for(trace: IterationTrace) -> int:
    return EXIT_OK if trace.converged else EXIT_NOT_CONVERGED


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    setup = cfg.build_setup()
    init = cfg.build_init(setup)
    trace = run_cm(setup, init, _cm_config(cfg.cm, args))
    out_dir = Path(args.out_dir) if args.out_dir else (cfg.out_dir or DEFAULT_OUT)
    render = (args.render or cfg.render) and setup.grid.ndim == 2
    if (args.render or cfg.render) and not render:
        print("note: --render ignored for a 1D grid", file=sys.stderr)
    report = write_run_outputs(trace, out_dir, render)
    line = f"MI={report['final_mi_bits']} bits iterations={report['iterations']} stop={trace.stop_reason}"
    if "threshold" in report:
        line += f" z*={report['threshold']}"
    print(line)
    return _exit_for(trace)


def cmd_example1(args) -> int:
    setup = example1_setup()
    trace = run_cm(setup, init_threshold_1d(setup.grid, 50), _cm_config(CmConfig(), args))
    out_dir = Path(args.out_dir) if args.out_dir else DEFAULT_OUT / "example1"
    if args.render:
        print("note: --render ignored for a 1D grid", file=sys.stderr)
    report = write_run_outputs(trace, out_dir, render=False)
    print(
        f"example1: MI={report['final_mi_bits']} bits iterations={report['iterations']}"
        f" z*={report.get('threshold', '')} converged={report['converged']}"
    )
    return _exit_for(trace)


def _example2_init(kind: str, seed: int | None, grid):
    if kind.startswith("random"):
        if ":" in kind:
            tail = kind.partition(":")[2]
            try:
                seed = int(tail)
            except ValueError:
                raise ConfigError(f"--init: bad seed in {kind!r}") from None
        return init_random(grid, 3, 0 if seed is None else seed)
    if kind == "vertical":
        return init_vertical(grid, 3)
    if kind == "horizontal":
        return init_horizontal(grid, 3)
    raise ConfigError(f"--init: unknown init kind {kind!r} (vertical, horizontal, random[:seed])")


def cmd_example2(args) -> int:
    setup = example2_setup()
    init = _example2_init(args.init, args.seed, setup.grid)
    trace = run_cm(setup, init, _cm_config(CmConfig(), args))
    out_dir = Path(args.out_dir) if args.out_dir else DEFAULT_OUT / "example2"
    report = write_run_outputs(trace, out_dir, args.render)
    ratio = trace.mi_after(2) / trace.final_mi_bits if trace.final_mi_bits > 0 else float("nan")
    print(
        f"example2[{args.init}]: MI={report['final_mi_bits']} bits"
        f" iterations={report['iterations']} mi_ratio_after_2={fmt(ratio)}"
        f" converged={report['converged']}"
    )
    return _exit_for(trace)


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    setup = cfg.build_setup()
    init = cfg.build_init(setup)
    if init.n_labels != setup.n_classes:
        raise ConfigError("init.n_labels: comparison needs one label per class")
    report = compare(setup, _cm_config(cfg.cm, args), init)
    out_dir = Path(args.out_dir) if args.out_dir else (cfg.out_dir or DEFAULT_OUT)
    write_compare(report, out_dir / "compare.csv")
    print(
        f"compare: MMI MI={fmt(report.mmi_partition_mi)} err={fmt(report.mmi_error_rate)}"
        f" threshold={fmt(report.mmi_threshold)} | MPP MI={fmt(report.mpp_partition_mi)}"
        f" err={fmt(report.mpp_error_rate)} threshold={fmt(report.mpp_threshold)}"
        f" | {'equivalent' if report.equivalent else 'different'}"
    )
    for v in report.violations:
        print(f"warning: {v}", file=sys.stderr)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", help="directory for output files")
    common.add_argument("--max-iters", type=int, help="iteration cap")
    common.add_argument("--mi-tol", type=float, help="stop when the MI gain falls below this (bits)")
    common.add_argument("--render", action="store_true", help="write a PPM per iteration (2D only)")

    parser = argparse.ArgumentParser(
        prog="chanmatch", description="Channels-matching MMI classification on discretized feature grids"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="run CM on a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("example1", parents=[common], help="1D two-class preset")
    p.set_defaults(func=cmd_example1)
    p = sub.add_parser("example2", parents=[common], help="2D three-class preset")
    p.add_argument("--init", default="vertical", help="vertical | horizontal | random[:seed]")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_example2)
    p = sub.add_parser("compare", parents=[common], help="CM versus maximum-posterior baseline")
    p.add_argument("config")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.max_iters is not None and args.max_iters < 1:
            raise ConfigError("--max-iters: must be at least 1")
        if args.mi_tol is not None and args.mi_tol < 0:
            raise ConfigError("--mi-tol: must be nonnegative")
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ChanMatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

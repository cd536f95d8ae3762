"""Time the compiled kernels against the numpy fallback on the 2D example.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from chanmatch import (
    _kernels_py,
    example2_setup,
    init_horizontal,
    matching_one,
    shannon_channel,
)

try:
    from chanmatch import _kernels as compiled
except ImportError:
    compiled = None


def _best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def kernel_times(repeat: int):
    setup = example2_setup()
    part = init_horizontal(setup.grid, 3)
    cond = np.ascontiguousarray(setup.conditionals)
    sem = matching_one(shannon_channel(part, setup), setup.priors, 1e-12)
    args = (
        np.ascontiguousarray(setup.posterior().T),
        np.ascontiguousarray(sem.log_ratio()),
        sem.active.astype(np.uint8),
        part.labels,
        (setup.cell_mass() > 0).astype(np.uint8),
    )
    impls = {"python": _kernels_py}
    if compiled is not None:
        impls["cython"] = compiled
    rows = {}
    for name, impl in impls.items():
        rows[name] = (
            _best(lambda: impl.channel_from_labels(cond, part.labels, 3), repeat, 20),
            _best(lambda: impl.reclassify(*args), repeat, 20),
        )
    return rows


def full_run_time(pure: bool, repeat: int) -> float:
    # backend choice happens at import, so each one gets a fresh interpreter
    code = (
        "import timeit;"
        "from chanmatch import example2_setup, init_vertical, run_cm;"
        "s = example2_setup(); i = init_vertical(s.grid, 3);"
        f"print(min(timeit.repeat(lambda: run_cm(s, i), repeat={repeat}, number=3)) / 3)"
    )
    env = dict(os.environ, CHANMATCH_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, check=True, capture_output=True, text=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    rows = kernel_times(args.repeat)
    print(f"{'kernel':<22}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for k, label in enumerate(("channel_from_labels", "reclassify")):
        py = rows["python"][k] * 1e3
        cy = rows["cython"][k] * 1e3 if "cython" in rows else float("nan")
        print(f"{label:<22}{py:>12.3f}{cy:>12.3f}{py / cy:>10.2f}")

    py = full_run_time(True, args.repeat) * 1e3
    cy = full_run_time(False, args.repeat) * 1e3 if compiled is not None else float("nan")
    print(f"{'run_cm (example 2)':<22}{py:>12.3f}{cy:>12.3f}{py / cy:>10.2f}")


if __name__ == "__main__":
    main()

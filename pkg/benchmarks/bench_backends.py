#!/usr/bin/env python3
"""Benchmark the compiled rational core against the pure-Python fallback.

Exact fraction arithmetic is the hot primitive of the event loop, so the
same sweep is timed in two subprocesses: one with the compiled backend (if
built) and one with ``SKIPSIM_PURE_PYTHON=1``.

    python benchmarks/bench_backends.py [--runs 10] [--n-max 10]
"""

import argparse
import os
import subprocess
import sys
import time

_WORK = """
import time, sys, warnings
sys.path.insert(0, {src!r})
warnings.simplefilter("ignore")
from skipsim.rational import RAT_BACKEND
from skipsim.experiment import ExperimentPlan, run_sweep

plan = ExperimentPlan(
    n_min=2, n_max={n_max}, runs_per_point={runs},
    modes=("none", "dvs+dpd"), base_seed=2024,
)
t0 = time.perf_counter()
result = run_sweep(plan)
elapsed = time.perf_counter() - t0
print(f"{{RAT_BACKEND}} {{elapsed:.3f}} {{len(result.rows)}}")
"""

_MICRO = """
import time, sys
sys.path.insert(0, {src!r})
from skipsim.rational import RAT_BACKEND, make_rat

vals = [make_rat(n, d) for n in range(1, 40) for d in range(2, 17)]
t0 = time.perf_counter()
acc = 0
for _ in range({reps}):
    for v in vals:
        acc = acc + v * 3 - v
        if acc > 10_000:
            acc = acc / 7
elapsed = time.perf_counter() - t0
ops = {reps} * len(vals) * 3
print(f"{{RAT_BACKEND}} {{elapsed:.3f}} {{ops}}")
"""


def run_backend(code: str, pure: bool):
    env = dict(os.environ)
    if pure:
        env["SKIPSIM_PURE_PYTHON"] = "1"
    else:
        env.pop("SKIPSIM_PURE_PYTHON", None)
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True
    )
    backend, elapsed, count = out.stdout.split()
    return backend, float(elapsed), int(count)


def compare(label, code, unit, repeat):
    results = {}
    for pure in (False, True):
        best = None
        count = 0
        for _ in range(repeat):
            backend, elapsed, count = run_backend(code, pure)
            if best is None or elapsed < best:
                best = elapsed
        results[backend] = (best, count)
    print(f"-- {label}")
    print(f"{'backend':<10} {'best time':>10} {unit:>10}")
    for backend, (elapsed, count) in results.items():
        print(f"{backend:<10} {elapsed:>9.3f}s {count:>10}")
    if "compiled" in results and "python" in results:
        speedup = results["python"][0] / results["compiled"][0]
        print(f"speedup (python/compiled): {speedup:.2f}x")
    elif "compiled" not in results:
        print("compiled backend not built; only the fallback was timed")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=10, help="runs per point")
    parser.add_argument("--n-max", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=3, help="best-of repetitions")
    parser.add_argument("--reps", type=int, default=400, help="microbenchmark repetitions")
    args = parser.parse_args()

    src = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
    compare(
        "full sweep (end to end)",
        _WORK.format(src=src, runs=args.runs, n_max=args.n_max),
        "rows",
        args.repeat,
    )
    compare(
        "rational kernel (mixed ops)",
        _MICRO.format(src=src, reps=args.reps),
        "ops",
        args.repeat,
    )


if __name__ == "__main__":
    main()

"""Compiled vs numpy kernels: timings for the float64 hot loops.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each case is run on both backends with identical inputs; the table reports
the best-of-N wall time and the speed-up. End-to-end solver timings run in
subprocesses so THETA_ATLAS_PURE selects the backend for the whole pipeline.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from theta_atlas import kernels
from theta_atlas.complexzeros import default_seeds


def cases():
    rng = np.random.default_rng(7)
    pts = 50 * np.sqrt(rng.uniform(size=20000)) * np.exp(2j * np.pi * rng.uniform(size=20000))
    out = []
    for q in (0.5, 0.9):
        out.append((f"theta_scaled q={q} (20k points)", lambda m, q=q: m.theta_scaled(q, pts)))
    for q in (0.8, 0.95):
        n = kernels.winding_count(q, 50)
        z0 = default_seeds(q, n + 4)
        out.append((f"aberth q={q} ({n + 4} roots)",
                    lambda m, q=q, z0=z0: m.aberth(q, z0.copy(), 500, 1e-14, 1e6)))
    circle = 50 * np.exp(1j * np.linspace(0, np.pi, 4097))
    out.append(("theta_scaled q=0.9 (4k circle)", lambda m: m.theta_scaled(0.9, circle)))
    return out


SOLVER = ("import time; from theta_atlas.complexzeros import find_all_zeros;"
          "t = time.perf_counter();"
          "[find_all_zeros(q, 55) for q in (0.5, 0.7, 0.8, 0.9, 0.95)];"
          "print(time.perf_counter() - t)")


def solver_time(pure: bool) -> float:
    env = dict(os.environ, THETA_ATLAS_PURE="1" if pure else "")
    p = subprocess.run([sys.executable, "-c", SOLVER], capture_output=True, text=True, check=True, env=env)
    return float(p.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the results here")
    ap.add_argument("--skip-solver", action="store_true", help="skip the end-to-end runs")
    a = ap.parse_args()

    fast = kernels.compiled()
    if fast is None:
        sys.exit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
    rows = []
    for name, fn in cases():
        t_fast = min(timeit.repeat(lambda: fn(fast), number=1, repeat=a.repeat))
        t_py = min(timeit.repeat(lambda: fn(kernels.fallback), number=1, repeat=a.repeat))
        rows.append({"case": name, "compiled_s": t_fast, "numpy_s": t_py, "speedup": t_py / t_fast})
    if not a.skip_solver:
        t_fast, t_py = solver_time(False), solver_time(True)
        rows.append({"case": "find_all_zeros, 5 q values, radius 55", "compiled_s": t_fast,
                     "numpy_s": t_py, "speedup": t_py / t_fast})

    w = max(len(r["case"]) for r in rows)
    print(f"{'case':<{w}}  {'compiled':>10}  {'numpy':>10}  {'speed-up':>8}")
    for r in rows:
        print(f"{r['case']:<{w}}  {r['compiled_s'] * 1e3:8.2f}ms  {r['numpy_s'] * 1e3:8.2f}ms  {r['speedup']:7.1f}x")
    if a.json:
        with open(a.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()

"""Compare the compiled and numpy pricing kernels, alone and inside full LP solves.

    python3 benchmarks/bench_pricing.py [--repeat 20]

The numpy backend is loaded by re-importing the package in a subprocess with
DIMERMAGIC_PURE_PYTHON=1.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

CHILD = r"""
import json, sys, time
import numpy as np
from dimermagic import kernels
from dimermagic.dimer import DimerParams, ground_state, thermal_state
from dimermagic.magic import robustness_solution
from dimermagic.stabilizers import load_catalog
from dimermagic.l1 import L1Problem

repeat = int(sys.argv[1])
cat = load_catalog(4)
prob = L1Problem(cat.a_matrix, np.zeros(256))
rows, vals, _ = prob._ell
y = np.random.default_rng(0).normal(size=256)

t0 = time.perf_counter()
for _ in range(repeat * 20):
    kernels.column_dots(rows, vals, y)
dots = (time.perf_counter() - t0) / (repeat * 20)

states = [ground_state(DimerParams(U=u)) for u in (0.5, 4.0, 100.0)]
states += [thermal_state(DimerParams(U=4.0, T=T)) for T in (0.5, 2.0)]
t0 = time.perf_counter()
iters = 0
for _ in range(repeat):
    for s in states:
        iters += robustness_solution(s, cat).iterations
solve = (time.perf_counter() - t0) / (repeat * len(states))
print(json.dumps({"backend": kernels.BACKEND, "column_dots_ms": dots * 1e3, "solve_ms": solve * 1e3,
                  "pivots_per_solve": iters / (repeat * len(states))}))
"""


def run(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    if pure:
        env["DIMERMAGIC_PURE_PYTHON"] = "1"
    else:
        env.pop("DIMERMAGIC_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", CHILD, str(repeat)], env=env, check=True, capture_output=True, text=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    results = [run(False, args.repeat), run(True, args.repeat)]
    print(f"{'backend':<8} {'column_dots [ms]':>17} {'N=4 solve [ms]':>15} {'pivots':>7}")
    for r in results:
        print(f"{r['backend']:<8} {r['column_dots_ms']:>17.3f} {r['solve_ms']:>15.1f} {r['pivots_per_solve']:>7.1f}")
    if results[0]["backend"] == results[1]["backend"]:
        print("compiled extension not built; both runs used the numpy fallback")
    else:
        print(f"kernel speedup {results[1]['column_dots_ms'] / results[0]['column_dots_ms']:.1f}x, "
              f"solve speedup {results[1]['solve_ms'] / results[0]['solve_ms']:.1f}x")


if __name__ == "__main__":
    main()

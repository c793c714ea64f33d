"""Compare the compiled kernels with their pure-Python implementations.

Usage::

    python benchmarks/bench_kernels.py [--repeat N] [--skip-subprocess]

Times the Riccati integrator, the dense-output evaluator and the Numerov
sweep under numba and as plain Python (``py_func``), checks that both give
the same numbers, and times one warm end-to-end solve in a subprocess with
``QHJ_BACKEND=numpy``.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from qhj import kernels
from qhj._jit import BACKEND, python_impl

END_TO_END = (
    "import time, qhj;"
    "m = qhj.PotentialModel.harmonic();"
    "s = qhj.find_turning_points(m, 1.0, m.default_window(1.0));"
    "qhj.solve_q_selfconsistent(m, s);"
    "t = time.perf_counter(); q = qhj.solve_q_selfconsistent(m, s);"
    "print(qhj.BACKEND, time.perf_counter() - t, abs(q(0.5)))"
)


def best_of(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases():
    ucoef = np.array([0.0, 0.0, 1.0])  # U = x^2, k = 1
    x0, x_end = 0.0, 3.5
    P0 = 1.0 + 0.0j

    def riccati(impl):
        return lambda: impl(ucoef, 1.0, 1.0, x0, P0, 0j, x_end, 1e-12, 1e-14, 1e-3, 2_000_000)

    n, xs, ys, dense, _ = kernels.dopri5_riccati(ucoef, 1.0, 1.0, x0, P0, 0j, x_end,
                                                 1e-12, 1e-14, 1e-3, 2_000_000)
    xs, dense = xs[: n + 1], dense[:n]
    xq = np.linspace(x0, x_end, 20001)
    grid = np.linspace(-8.0, 8.0, 16001)
    g = 1.0 - grid**2
    h = grid[1] - grid[0]
    return [
        ("dopri5_riccati", riccati(kernels.dopri5_riccati),
         riccati(python_impl(kernels.dopri5_riccati)), lambda r: r[2][r[0]]),
        ("dense_eval", lambda: kernels.dense_eval(xs, dense, xq),
         lambda: python_impl(kernels.dense_eval)(xs, dense, xq), lambda r: r[0]),
        ("numerov_sweep", lambda: kernels.numerov_sweep(g, h, 0.0, 1e-30),
         lambda: python_impl(kernels.numerov_sweep)(g, h, 0.0, 1e-30), lambda r: r),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-subprocess", action="store_true")
    args = ap.parse_args(argv)
    print(f"in-process backend: {BACKEND}")
    print(f"{'kernel':<16}{'compiled [s]':>14}{'python [s]':>14}{'speedup':>10}{'max diff':>12}")
    for name, fast, slow, pick in cases():
        fast()  # compile / load cache
        tf, rf = best_of(fast, args.repeat)
        ts, rs = best_of(slow, 1)
        a, b = np.asarray(pick(rf)), np.asarray(pick(rs))
        diff = float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))
        print(f"{name:<16}{tf:>14.4g}{ts:>14.4g}{ts / tf:>10.1f}{diff:>12.2e}")
    if not args.skip_subprocess:
        for backend in ("numba", "numpy"):
            env = dict(os.environ, QHJ_BACKEND=backend)
            out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, check=True,
                                 capture_output=True, text=True).stdout.split()
            print(f"end-to-end HO k=1 solve, QHJ_BACKEND={backend}: backend={out[0]} "
                  f"time={float(out[1]):.4g} s |Q(0.5)|={float(out[2]):.12f}")


if __name__ == "__main__":
    main()

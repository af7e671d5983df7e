"""Compiled vs pure-Python kernels on resolvent pairings.

    python benchmarks/bench_kernels.py [--dims 4 8 16] [--points 200]
"""

import argparse
import time

import numpy as np

from pickmoments import _purepy
from pickmoments.gallery import random_rep
from pickmoments.numkernel import PIVOT_RTOL

try:
    from pickmoments import _kernels
except ImportError:
    _kernels = None


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(dims, points, repeat, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for dim in dims:
        rep = random_rep(dim, seed=seed + dim)
        A, Y, alpha = rep.A_dense, rep.Y_dense, rep.alpha
        z1 = rng.normal(size=points) + 1j * rng.uniform(0.1, 5, points)
        z2 = rng.normal(size=points) + 1j * rng.uniform(0.1, 5, points)
        t_py = _time(lambda: _purepy.pairings(A, Y, alpha, z1, z2, PIVOT_RTOL), repeat)
        row = {"kernel": "pairings", "dim": dim, "python_s": t_py, "cython_s": None}
        if _kernels is not None:
            row["cython_s"] = _time(lambda: _kernels.pairings(A, Y, alpha, z1, z2, PIVOT_RTOL), repeat)
            a, b = _purepy.pairings(A, Y, alpha, z1, z2, PIVOT_RTOL)[0], \
                _kernels.pairings(A, Y, alpha, z1, z2, PIVOT_RTOL)[0]
            row["max_diff"] = float(np.max(np.abs(a - b)))
        rows.append(row)

        a_d = rng.normal(size=dim * 32)
        y_d = rng.uniform(size=dim * 32)
        w = rng.uniform(size=dim * 32)
        t_py = _time(lambda: _purepy.diagonal_pairings(a_d, y_d, w, z1, z2), repeat)
        row = {"kernel": "diagonal", "dim": dim * 32, "python_s": t_py, "cython_s": None}
        if _kernels is not None:
            row["cython_s"] = _time(lambda: _kernels.diagonal_pairings(a_d, y_d, w, z1, z2), repeat)
        rows.append(row)
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8, 16])
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if _kernels is None:
        print("compiled extension not built; showing pure-Python timings only")
    print(f"{'kernel':<10}{'dim':>6}{'python [s]':>14}{'cython [s]':>14}{'speedup':>10}")
    for r in bench(args.dims, args.points, args.repeat):
        cy = r["cython_s"]
        speed = f"{r['python_s'] / cy:9.1f}x" if cy else "      n/a"
        cy_s = f"{cy:14.5f}" if cy else f"{'n/a':>14}"
        print(f"{r['kernel']:<10}{r['dim']:>6}{r['python_s']:14.5f}{cy_s}{speed}")


if __name__ == "__main__":
    main()

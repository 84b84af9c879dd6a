"""Time the numba and numpy kernels on the same inputs and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from shiftlab import _kernels
from shiftlab.boundary import classify, random_functional
from shiftlab.multiindex import enumerate_basis
from shiftlab.parrott import parrott_polynomial
from shiftlab.vncheck import random_polynomial
from shiftlab.weights import random_contractive_family


def best_of(fn, repeat):
    fn()  # warm-up, also triggers JIT compilation
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def grid_cases(rng):
    yield "parrott 3x3, 64^3", parrott_polynomial(), 64
    yield "scalar d=2 deg 3, 256^2", random_polynomial(2, 1, 3, rng), 256
    yield "2x2 d=3 deg 3, 48^3", random_polynomial(3, 2, 3, rng), 48


def circle_cases(rng):
    for d, N, n in [(2, 4, 1), (3, 3, 2), (3, 4, 1)]:
        W = random_contractive_family(d, N, seed=rng, p_flat=0.0)
        p = random_polynomial(d, n, 3, rng)
        yield f"d={d} N={N} n={n}, 720 samples", W, random_functional(d, N, p, rng)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    rows = []

    for label, p, m in grid_cases(rng):
        C, E = p.coeff_array(), p.exponent_array()
        t_np, a = best_of(lambda: _kernels.grid_norms(C, E, m, backend="numpy"), args.repeat)
        t_nb, b = best_of(lambda: _kernels.grid_norms(C, E, m, backend="numba"), args.repeat)
        rows.append(("grid_norms", label, t_np, t_nb, np.abs(a - b).max()))

    for label, W, f in circle_cases(rng):
        S = classify(W)
        ts = S.r * np.exp(2j * np.pi * np.arange(720) / 720)
        succ = enumerate_basis(W.d, W.N + 1).successors[: W.basis.size]
        args_ = (W.w, S.scalable_mask, ts, succ, f.p.coeff_array(), f.p.exponent_array(), f.g, f.h)
        t_np, a = best_of(lambda: _kernels.circle_functional(*args_, backend="numpy"), args.repeat)
        t_nb, b = best_of(lambda: _kernels.circle_functional(*args_, backend="numba"), args.repeat)
        rows.append(("circle_functional", label, t_np, t_nb, np.abs(a - b).max()))

    print(f"{'kernel':<18} {'case':<30} {'numpy s':>9} {'numba s':>9} {'speedup':>8} {'max diff':>9}")
    for kernel, label, t_np, t_nb, diff in rows:
        print(f"{kernel:<18} {label:<30} {t_np:9.4f} {t_nb:9.4f} {t_np / t_nb:7.1f}x {diff:9.1e}")


if __name__ == "__main__":
    main()

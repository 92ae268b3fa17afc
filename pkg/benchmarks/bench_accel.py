"""Benchmark the numba and numpy backends of the hot kernels.

Times the two accelerated loops (series translation by binomial
resummation and batch grid evaluation) under both implementations in
``weylcalc.accel.IMPLEMENTATIONS`` and prints a speedup table.

Run with::

    python benchmarks/bench_accel.py [--orders 64,128,256] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from weylcalc.accel import IMPLEMENTATIONS


def _bench(fn, repeats):
    """Best-of-``repeats`` wall time of ``fn`` in seconds."""
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _workloads(order, n_points, seed=0):
    rng = np.random.default_rng(seed)
    # Gaussian-like coefficient decay |c_n| ~ 0.7^n / sqrt(n!) so the
    # binomial resummation converges, as it does for entire functions
    decay = np.cumprod(np.r_[1.0, 0.7 / np.sqrt(np.arange(1.0, order))])
    coeffs = (
        rng.standard_normal(order) + 1j * rng.standard_normal(order)
    ) * decay
    lam = 1.5 + 0.25j
    points = np.exp(2j * np.pi * rng.random(n_points))
    return coeffs, lam, points


def run(orders, n_points, repeats):
    if "numba" not in IMPLEMENTATIONS:
        print("numba backend unavailable; nothing to compare")
        return
    header = f"{'kernel':<12} {'order':>6} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for order in orders:
        coeffs, lam, points = _workloads(order, n_points)
        out = np.empty_like(coeffs)
        mags = np.empty(order)
        grid_out = np.empty(n_points, dtype=np.complex128)
        times = {}
        for name, (trans, evalg) in IMPLEMENTATIONS.items():
            # warm-up triggers JIT compilation outside the timed region
            trans(coeffs, lam, out, mags)
            evalg(coeffs, points, grid_out)
            times[name] = (
                _bench(lambda t=trans: t(coeffs, lam, out, mags), repeats),
                _bench(lambda e=evalg: e(coeffs, points, grid_out), repeats),
            )
        for i, kernel in enumerate(("translate", "eval_grid")):
            t_np, t_nb = times["numpy"][i], times["numba"][i]
            print(
                f"{kernel:<12} {order:>6} {t_np * 1e3:>12.3f} "
                f"{t_nb * 1e3:>12.3f} {t_np / t_nb:>8.1f}x"
            )
    # agreement check: the two backends must tell the same story numerically
    coeffs, lam, points = _workloads(max(orders), n_points)
    results = {}
    for name, (trans, evalg) in IMPLEMENTATIONS.items():
        out = np.empty_like(coeffs)
        mags = np.empty(coeffs.size)
        grid_out = np.empty(n_points, dtype=np.complex128)
        trans(coeffs, lam, out, mags)
        evalg(coeffs, points, grid_out)
        results[name] = (out, grid_out)
    def rel(x, y):
        scale = np.abs(y).max()
        return np.abs(x - y).max() / scale if scale else 0.0

    dt = rel(results["numba"][0], results["numpy"][0])
    de = rel(results["numba"][1], results["numpy"][1])
    print(f"\nbackend relative agreement: translate {dt:.3e}, eval_grid {de:.3e}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--orders", default="64,128,256,512")
    parser.add_argument("--points", type=int, default=256)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)
    orders = [int(v) for v in args.orders.split(",")]
    run(orders, args.points, args.repeats)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

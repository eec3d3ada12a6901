#!/usr/bin/env python3
"""Benchmark the compiled core against the pure NumPy backend.

Times the four hot kernels on representative desk-scale problems and prints
a comparison table.  Run after building the extension:

    python benchmarks/benchmark_backends.py
"""

from __future__ import annotations

import time

import numpy as np

from ustatclust import _purepy

try:
    from ustatclust import _core
except ImportError:
    _core = None


def _phi(n: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 50))
    d = ((x[:, None, :] - x[None, :, :]) ** 2).mean(axis=2)
    np.fill_diagonal(d, 0.0)
    return d


def _time(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    rng = np.random.default_rng(42)
    cases = []

    phi = _phi(50)
    groups = np.zeros((2000, 50))
    for row in groups:
        row[rng.permutation(50)[:25]] = 1.0
    cases.append(("bn_batch        n=50, 2000 draws", lambda be: be.bn_batch(phi, groups)))

    inv_sd = np.ones(51)
    inv_sd[0] = inv_sd[50] = 0.0
    start_r = np.zeros(50, dtype=np.uint8)
    start_r[rng.permutation(50)[:10]] = 1
    cases.append((
        "relocate_search n=50",
        lambda be: be.relocate_search(phi, start_r, inv_sd, 1_000_000),
    ))

    phi70 = _phi(70, seed=1)
    start_s = np.zeros(70, dtype=np.uint8)
    start_s[rng.permutation(70)[:35]] = 1
    cases.append((
        "swap_search     n=70",
        lambda be: be.swap_search(phi70, start_s, 1_000_000),
    ))

    phi18 = _phi(18, seed=2)
    cases.append(("exhaustive_scan n=18 (131071 partitions)", lambda be: be.exhaustive_scan(phi18)))

    print(f"{'kernel':<42}{'numpy':>12}{'compiled':>12}{'speedup':>10}")
    for name, fn in cases:
        t_py = _time(lambda: fn(_purepy))
        if _core is not None:
            t_c = _time(lambda: fn(_core))
            print(f"{name:<42}{t_py:>11.4f}s{t_c:>11.4f}s{t_py / t_c:>9.1f}x")
        else:
            print(f"{name:<42}{t_py:>11.4f}s{'n/a':>12}{'':>10}")
    if _core is None:
        print("\ncompiled core not built; only the NumPy backend was timed")


if __name__ == "__main__":
    main()

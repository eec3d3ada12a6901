"""Independent oracles shared across the test suite.

Everything here recomputes statistics from their definitions with plain
loops and itertools, deliberately sharing no code with the package, so that
agreement is evidence and not tautology.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from ustatclust import DataMatrix, KernelMatrix, build_kernel_matrix


def brute_bn(phi: np.ndarray, group1) -> float:
    """Between-group statistic straight from the definitional formulas."""
    n = phi.shape[0]
    g1 = sorted(group1)
    g2 = sorted(set(range(n)) - set(g1))
    n1, n2 = len(g1), len(g2)
    u12 = sum(phi[i, j] for i in g1 for j in g2) / (n1 * n2)
    if n1 >= 2 and n2 >= 2:
        u1 = sum(phi[i, j] for i, j in itertools.combinations(g1, 2)) / math.comb(n1, 2)
        u2 = sum(phi[i, j] for i, j in itertools.combinations(g2, 2)) / math.comb(n2, 2)
        return n1 * n2 / (n * (n - 1)) * (2 * u12 - u1 - u2)
    if n1 == 1:
        u2 = sum(phi[i, j] for i, j in itertools.combinations(g2, 2)) / math.comb(n2, 2)
        return (u12 - u2) / n
    u1 = sum(phi[i, j] for i, j in itertools.combinations(g1, 2)) / math.comb(n1, 2)
    return (u12 - u1) / n


def brute_un(phi: np.ndarray) -> float:
    """Pooled mean kernel value over all unordered pairs."""
    n = phi.shape[0]
    return sum(phi[i, j] for i, j in itertools.combinations(range(n), 2)) / math.comb(n, 2)


def all_group1_sets(n: int, include_singletons: bool = True):
    """Every unordered two-group split, as the side containing sample 0."""
    rest = list(range(1, n))
    for r in range(0, n - 1):
        for extra in itertools.combinations(rest, r):
            g1 = (0, *extra)
            if not include_singletons and (len(g1) == 1 or len(g1) == n - 1):
                continue
            yield g1


def brute_best_per_size(phi: np.ndarray) -> dict[int, float]:
    """Exact per-canonical-size maxima of the statistic, by full enumeration."""
    n = phi.shape[0]
    best: dict[int, float] = {}
    for g1 in all_group1_sets(n):
        size = min(len(g1), n - len(g1))
        value = brute_bn(phi, g1)
        if size not in best or value > best[size]:
            best[size] = value
    return best


def brute_ari(a, b) -> float:
    """Adjusted Rand index by direct enumeration of sample pairs."""
    a = list(a)
    b = list(b)
    n = len(a)
    both = same_a = same_b = 0
    for i, j in itertools.combinations(range(n), 2):
        ia = a[i] == a[j]
        ib = b[i] == b[j]
        both += ia and ib
        same_a += ia
        same_b += ib
    total = math.comb(n, 2)
    expected = same_a * same_b / total
    maximum = 0.5 * (same_a + same_b)
    if maximum == expected:
        return 1.0
    return (both - expected) / (maximum - expected)


def normal_kernel(n: int, L: int, seed: int, shift: float = 0.0, n1: int = 0) -> KernelMatrix:
    """Kernel matrix of i.i.d. normal data, optionally with the first n1 rows shifted."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, L))
    if n1:
        x[:n1] += shift
    return build_kernel_matrix(DataMatrix(x))


def planted_kernel(n: int, k: int, cross: float = 10.0, within: float = 1.0,
                   noise: float = 0.0, seed: int = 0) -> KernelMatrix:
    """Synthetic kernel matrix with a planted size-k subgroup.

    Cross pairs between the planted subgroup {0..k-1} and the rest carry value
    ``cross``; all other pairs carry ``within``; optional small symmetric
    noise breaks ties.
    """
    rng = np.random.default_rng(seed)
    phi = np.full((n, n), within, dtype=np.float64)
    phi[:k, k:] = cross
    phi[k:, :k] = cross
    if noise:
        jitter = rng.uniform(0, noise, size=(n, n))
        jitter = np.triu(jitter, 1)
        phi = phi + jitter + jitter.T
    np.fill_diagonal(phi, 0.0)
    return KernelMatrix(phi)

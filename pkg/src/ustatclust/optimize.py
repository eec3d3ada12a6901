"""Search for Bn-optimal partitions.

Three strategies, all built on the backend's steepest-ascent kernels:

* ``optimize_standardized`` maximizes the standardized statistic across all
  subgroup sizes with multi-restart single-element relocation (size changes
  by one per move, scored with the size-appropriate variance).
* ``optimize_bn_at_size`` maximizes the raw statistic at a fixed subgroup
  size with multi-restart pairwise exchange; size 1 is solved exactly by
  enumeration.
* ``exhaustive_best`` enumerates every partition (n <= 20) as the oracle the
  local searches are validated against.

Restarts mix random initial partitions with one spectral warm start (the
sign, or top-k, of the leading principal direction of the double-centered
kernel matrix).  Results are deterministic given the seed; exact ties break
toward the lexicographically smallest canonical assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DomainError, ValidationError
from .kernels import KernelMatrix
from .ustat import BnResult, Partition, bn
from .variance import VarianceTable


@dataclass(frozen=True)
class SearchConfig:
    """Restart count (None = max(10, n)), move cap, seed, and an optional
    restriction of the searched subgroup sizes."""

    restarts: int | None = None
    max_iterations: int = 1_000_000
    seed: int = 0
    size_set: frozenset[int] | None = None

    def restarts_for(self, n: int) -> int:
        return self.restarts if self.restarts is not None else max(10, n)


@dataclass(frozen=True)
class SizeBestTable:
    """Best partition found at each subgroup size, plus scan bookkeeping."""

    per_size: dict[int, tuple[Partition, float]]
    standardized_by_size: dict[int, float] | None
    partitions_scanned: int

    def best_overall(self, standardized: bool = False) -> tuple[Partition, float]:
        if standardized:
            if self.standardized_by_size is None:
                raise ValidationError("table was built without standardized values")
            scores = self.standardized_by_size
        else:
            scores = {s: v for s, (_, v) in self.per_size.items()}
        best_size = max(
            scores, key=lambda s: (scores[s], _lex_rank(self.per_size[s][0]))
        )
        return self.per_size[best_size][0], scores[best_size]


def _lex_rank(partition: Partition) -> bytes:
    # byte-complemented so that max() prefers the lexicographically smallest
    return bytes(255 - b for b in partition.sort_key())


def singleton_values(kernel: KernelMatrix) -> np.ndarray:
    """Raw Bn of each singleton split {i} vs rest, exactly, in O(n^2)."""
    phi = kernel.phi
    n = kernel.n
    if n < 3:
        raise DomainError(f"singleton splits need n >= 3, got {n}")
    rowsum = phi.sum(axis=1)
    total = 0.5 * float(phi.sum())
    u12 = rowsum / (n - 1)
    u2 = (total - rowsum) / ((n - 1) * (n - 2) / 2.0)
    return (u12 - u2) / n


def _spectral_direction(phi: np.ndarray) -> np.ndarray:
    """Leading principal direction of the double-centered kernel matrix."""
    n = phi.shape[0]
    row = phi.mean(axis=1, keepdims=True)
    col = phi.mean(axis=0, keepdims=True)
    b = -0.5 * (phi - row - col + phi.mean())
    w, v = np.linalg.eigh(b)
    direction = v[:, int(np.argmax(w))].copy()
    pivot = int(np.argmax(np.abs(direction)))
    if direction[pivot] < 0:
        direction = -direction
    return direction


def _spectral_sign_group(phi: np.ndarray) -> np.ndarray:
    d = _spectral_direction(phi)
    g = (d > np.median(d)).astype(np.uint8)
    if g.sum() in (0, phi.shape[0]):  # constant direction; arbitrary valid split
        g[:] = 0
        g[0] = 1
    return g


def _spectral_topk_groups(phi: np.ndarray, k: int) -> list[np.ndarray]:
    d = _spectral_direction(phi)
    n = phi.shape[0]
    out = []
    for vec in (d, -d):
        g = np.zeros(n, dtype=np.uint8)
        g[np.argsort(-vec, kind="stable")[:k]] = 1
        out.append(g)
    return out


def _random_group(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    g = np.zeros(n, dtype=np.uint8)
    g[rng.permutation(n)[:k]] = 1
    return g


def _better(obj: float, part: Partition, best_obj: float, best_part: Partition | None) -> bool:
    if best_part is None or obj > best_obj:
        return True
    return obj == best_obj and part.sort_key() < best_part.sort_key()


def optimize_standardized(
    kernel: KernelMatrix, table: VarianceTable, config: SearchConfig | None = None
) -> tuple[Partition, BnResult]:
    """Best partition by standardized Bn over all subgroup sizes.

    Multi-restart relocation search, one spectral start, plus the exact best
    singleton as an extra candidate.  With ``config.size_set`` given, runs
    the per-size exchange search on exactly those sizes instead.
    """
    config = config or SearchConfig()
    n = kernel.n
    phi = kernel.phi
    inv_sd = table.inv_sd()

    if config.size_set is not None:
        sizes = sorted(config.size_set)
        if not sizes or min(sizes) < 1 or max(sizes) > n // 2:
            raise DomainError(f"size_set must lie within 1..{n // 2}")
        best_part: Partition | None = None
        best_obj = -np.inf
        for size in sizes:
            part, raw = optimize_bn_at_size(kernel, size, config)
            obj = raw * inv_sd[size]
            if _better(obj, part, best_obj, best_part):
                best_part, best_obj = part, obj
        assert best_part is not None
        result = bn(best_part, kernel).with_variance(table.variance(best_part.n1))
        return best_part, result

    ss = np.random.SeedSequence(entropy=config.seed, spawn_key=(0,))
    rng = np.random.Generator(np.random.PCG64(ss))
    starts = [_spectral_sign_group(phi)]
    for _ in range(config.restarts_for(n)):
        k = int(rng.integers(1, n // 2 + 1))
        starts.append(_random_group(rng, n, k))

    best_part = None
    best_obj = -np.inf
    for g0 in starts:
        g, obj = _backend.relocate_search(phi, g0, inv_sd, config.max_iterations)
        part = Partition(np.where(g.astype(bool), 1, 2))
        if _better(obj, part, best_obj, best_part):
            best_part, best_obj = part, obj

    # exact singleton candidate: cheap, and guards the n1=1 corner
    vals = singleton_values(kernel)
    i = int(np.argmax(vals))
    obj = float(vals[i]) * inv_sd[1]
    part = Partition.from_group1(n, [i])
    if _better(obj, part, best_obj, best_part):
        best_part, best_obj = part, obj

    assert best_part is not None
    result = bn(best_part, kernel).with_variance(table.variance(best_part.n1))
    return best_part, result


def optimize_bn_at_size(
    kernel: KernelMatrix, n1: int, config: SearchConfig | None = None
) -> tuple[Partition, float]:
    """Best partition of exactly subgroup size ``n1`` by raw Bn.

    Size 1 is enumerated exactly; larger sizes use multi-restart pairwise
    exchange from random subsets and two spectral top-k starts.  At a fixed
    size the variance is constant, so the raw argmax is also the
    standardized argmax.
    """
    config = config or SearchConfig()
    n = kernel.n
    if not 1 <= n1 <= n // 2:
        raise DomainError(f"subgroup size must lie in 1..{n // 2}, got {n1}")
    if n1 == 1:
        vals = singleton_values(kernel)
        i = int(np.argmax(vals))
        return Partition.from_group1(n, [i]), float(vals[i])

    phi = kernel.phi
    ss = np.random.SeedSequence(entropy=config.seed, spawn_key=(1, n1))
    rng = np.random.Generator(np.random.PCG64(ss))
    starts = _spectral_topk_groups(phi, n1)
    for _ in range(config.restarts_for(n)):
        starts.append(_random_group(rng, n, n1))

    best_part: Partition | None = None
    best_val = -np.inf
    for g0 in starts:
        g, val = _backend.swap_search(phi, g0, config.max_iterations)
        part = Partition(np.where(g.astype(bool), 1, 2))
        if _better(val, part, best_val, best_part):
            best_part, best_val = part, val
    assert best_part is not None
    return best_part, float(best_val)


_EXHAUSTIVE_CAP = 20


def exhaustive_best(
    kernel: KernelMatrix, table: VarianceTable | None = None, standardized: bool = False
) -> SizeBestTable:
    """Exact per-size best partitions by full enumeration (n <= 20).

    With ``standardized=True`` a variance table is required and standardized
    values are attached per size.
    """
    n = kernel.n
    if n > _EXHAUSTIVE_CAP:
        raise DomainError(
            f"exhaustive enumeration is capped at n <= {_EXHAUSTIVE_CAP}, got n={n}"
        )
    if standardized and table is None:
        raise ValidationError("standardized=True requires a variance table")
    best_bn, best_key, scanned = _backend.exhaustive_scan(kernel.phi)
    per_size: dict[int, tuple[Partition, float]] = {}
    std: dict[int, float] | None = {} if standardized else None
    for size in range(1, n // 2 + 1):
        if not np.isfinite(best_bn[size]):
            continue
        g = _backend.group_from_key(int(best_key[size]), n)
        part = Partition(np.where(g.astype(bool), 1, 2))
        value = float(best_bn[size])
        per_size[size] = (part, value)
        if std is not None:
            assert table is not None
            var = table.variance(size)
            std[size] = value / np.sqrt(var) if var > 0 else 0.0
    return SizeBestTable(per_size=per_size, standardized_by_size=std, partitions_scanned=int(scanned))

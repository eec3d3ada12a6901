"""Simulation harness: planted-cluster generators, size/power studies, ARI.

Scenarios plant K groups of i.i.d. coordinates whose group means follow one
of three layouts: a two-group shift (group 2's mean vector has every entry
equal to the shift), K equidistant means (a regular simplex with edge length
d embedded in the first K-1 coordinates), or K means in a line spaced d
apart along the first coordinate.  Noise is standard normal by default;
chi-squared and gamma noise are centered and scaled to unit variance so the
shift parameters stay comparable across noise laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.linalg import helmert

from .config import Settings
from .errors import DimensionError, DomainError, ValidationError
from .hierarchy import ClusterLabeling, extract_clusters, uhclust
from .kernels import DataMatrix, KernelSpec, build_kernel_matrix
from .optimize import SearchConfig, optimize_standardized
from .significance import gumbel_pvalue, max_test_pvalue, n_star
from .variance import build_variance_table

LAYOUT_TWO_GROUP = "two-group-shift"
LAYOUT_EQUIDISTANT = "equidistant"
LAYOUT_INLINE = "inline"

NOISE_NORMAL = "normal"
NOISE_CHI_SQUARED = "chi-squared"
NOISE_GAMMA = "gamma"

# fixed shape parameters for the skewed noise laws, standardized below
_CHI2_DF = 1.0
_GAMMA_SHAPE = 2.0


@dataclass(frozen=True)
class SimScenario:
    """One simulation design: sizes, dimension, layout, shift, noise, seed."""

    n: int
    L: int
    k: int
    group_sizes: tuple[int, ...]
    mean_layout: str = LAYOUT_TWO_GROUP
    shift: float = 0.0
    noise: str = NOISE_NORMAL
    replications: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.group_sizes)
        if len(sizes) != self.k:
            raise ValidationError(f"{len(sizes)} group sizes for k={self.k}")
        if sum(sizes) != self.n:
            raise ValidationError(f"group sizes {sizes} do not sum to n={self.n}")
        if any(s < 1 for s in sizes):
            raise ValidationError("every group must have at least one member")
        if self.shift < 0:
            raise DomainError("shift must be non-negative")
        if self.replications < 1:
            raise DomainError("need at least one replication")
        if self.mean_layout not in (LAYOUT_TWO_GROUP, LAYOUT_EQUIDISTANT, LAYOUT_INLINE):
            raise ValidationError(f"unknown mean layout: {self.mean_layout!r}")
        if self.noise not in (NOISE_NORMAL, NOISE_CHI_SQUARED, NOISE_GAMMA):
            raise ValidationError(f"unknown noise law: {self.noise!r}")
        object.__setattr__(self, "group_sizes", sizes)

    @classmethod
    def two_group(cls, n: int, L: int, m2: float, replications: int = 1, seed: int = 0,
                  noise: str = NOISE_NORMAL) -> "SimScenario":
        """Balanced two-group design with group 2 shifted by m2 in every coordinate."""
        if n % 2:
            raise DomainError(f"two-group design needs even n, got {n}")
        return cls(n=n, L=L, k=2, group_sizes=(n // 2, n // 2), mean_layout=LAYOUT_TWO_GROUP,
                   shift=m2, noise=noise, replications=replications, seed=seed)

    @classmethod
    def clusters(cls, k: int, n1: int, L: int, d: float, layout: str = LAYOUT_EQUIDISTANT,
                 replications: int = 1, seed: int = 0, noise: str = NOISE_NORMAL) -> "SimScenario":
        """K equal clusters of size n1 with separation d in the given layout."""
        return cls(n=k * n1, L=L, k=k, group_sizes=(n1,) * k, mean_layout=layout,
                   shift=d, noise=noise, replications=replications, seed=seed)

    def planted_labels(self) -> ClusterLabeling:
        labels = np.repeat(np.arange(self.k, dtype=np.int64), self.group_sizes)
        return ClusterLabeling(labels=labels, k_hat=self.k)


def _mean_vectors(scenario: SimScenario) -> np.ndarray:
    """Cluster mean vectors; ``shift`` is in per-coordinate units.

    The two-group layout gives group 2 a mean with every entry equal to the
    shift, so the full mean-vector distance is shift * sqrt(L).  The
    equidistant and inline layouts keep the same convention: cluster means at
    pairwise (respectively neighbor) distance shift * sqrt(L), which keeps
    detection difficulty comparable across layouts and dimensions.
    """
    k, L, d = scenario.k, scenario.L, scenario.shift
    scale = d * math.sqrt(L)
    means = np.zeros((k, L), dtype=np.float64)
    if scenario.mean_layout == LAYOUT_TWO_GROUP:
        if k != 2:
            raise ValidationError("two-group-shift layout needs k=2")
        means[1, :] = d
    elif scenario.mean_layout == LAYOUT_EQUIDISTANT:
        if k - 1 > L:
            raise DomainError(
                f"equidistant layout needs L >= k-1 coordinates, got L={L}, k={k}"
            )
        if k > 1:
            # columns of the Helmert basis are k simplex vertices with edge
            # sqrt(2); rescale so every pairwise distance is exactly scale
            vertices = helmert(k).T * (scale / math.sqrt(2.0))
            means[:, : k - 1] = vertices
    else:  # inline
        means[:, 0] = scale * np.arange(k)
    return means


def _noise(rng: np.random.Generator, shape: tuple[int, int], law: str) -> np.ndarray:
    if law == NOISE_NORMAL:
        return rng.standard_normal(shape)
    if law == NOISE_CHI_SQUARED:
        raw = rng.chisquare(_CHI2_DF, size=shape)
        return (raw - _CHI2_DF) / math.sqrt(2.0 * _CHI2_DF)
    raw = rng.standard_gamma(_GAMMA_SHAPE, size=shape)
    return (raw - _GAMMA_SHAPE) / math.sqrt(_GAMMA_SHAPE)


def generate(scenario: SimScenario, replication: int) -> DataMatrix:
    """Draw one dataset for the scenario; deterministic per (seed, replication)."""
    if not 0 <= replication:
        raise DomainError("replication index must be non-negative")
    ss = np.random.SeedSequence(entropy=scenario.seed, spawn_key=(replication,))
    rng = np.random.Generator(np.random.PCG64(ss))
    means = _mean_vectors(scenario)
    values = _noise(rng, (scenario.n, scenario.L), scenario.noise)
    values += np.repeat(means, scenario.group_sizes, axis=0)
    return DataMatrix(values, [f"s{i}" for i in range(scenario.n)])


@dataclass(frozen=True)
class SimReport:
    """Aggregated study output plus one record per replication."""

    scenario: SimScenario
    rejection_rate: dict[str, float] | None = None
    mean_ari: float | None = None
    mean_k_hat: float | None = None
    per_replication: list[dict[str, Any]] = field(default_factory=list)

    def standard_error(self, rate: float) -> float:
        """Binomial standard error sqrt(p(1-p)/Re) for a reported rate."""
        re = max(len(self.per_replication), 1)
        return math.sqrt(max(rate * (1.0 - rate), 0.0) / re)


def run_homogeneity_study(
    scenario: SimScenario, alpha: float = 0.05, settings: Settings | None = None
) -> SimReport:
    """Rejection rate of the homogeneity test under both corrections.

    Each replication finds the maximum standardized statistic once and
    derives the exact-max and the Gumbel-corrected p-values from it.
    """
    if scenario.mean_layout != LAYOUT_TWO_GROUP:
        raise ValidationError("homogeneity study expects the two-group-shift layout")
    settings = settings or Settings(restarts=10)
    records: list[dict[str, Any]] = []
    rej_max = 0
    rej_gum = 0
    for rep in range(scenario.replications):
        data = generate(scenario, rep)
        kernel = build_kernel_matrix(data, KernelSpec())
        rep_seed = int(np.random.SeedSequence(entropy=scenario.seed, spawn_key=(rep, 1)).generate_state(1)[0])
        table = build_variance_table(
            kernel, iterations=settings.mc_iterations, seed=rep_seed,
            robust_threshold_n=settings.robust_threshold_n,
        )
        config = SearchConfig(restarts=settings.restarts_for(scenario.n),
                              max_iterations=settings.max_iterations, seed=rep_seed)
        _, result = optimize_standardized(kernel, table, config)
        z = result.standardized
        m = n_star(scenario.n, settings.allow_singletons)
        p_max = max_test_pvalue(z, m)
        p_gum = gumbel_pvalue(z, m)
        rej_max += p_max < alpha
        rej_gum += p_gum < alpha
        records.append({
            "replication": rep,
            "statistic": float(z),
            "p_max": float(p_max),
            "p_gumbel": float(p_gum),
            "reject_max": bool(p_max < alpha),
            "reject_gumbel": bool(p_gum < alpha),
        })
    re = scenario.replications
    return SimReport(
        scenario=scenario,
        rejection_rate={"max": rej_max / re, "gumbel": rej_gum / re},
        per_replication=records,
    )


def adjusted_rand_index(a: ClusterLabeling | np.ndarray, b: ClusterLabeling | np.ndarray) -> float:
    """Chance-corrected pair-counting agreement between two labelings.

    1.0 for identical partitions (up to label renaming), about 0 for
    independent ones.
    """
    la = np.asarray(a.labels if isinstance(a, ClusterLabeling) else a)
    lb = np.asarray(b.labels if isinstance(b, ClusterLabeling) else b)
    if la.shape != lb.shape or la.ndim != 1:
        raise DimensionError(f"labelings must be equal-length vectors, got {la.shape} and {lb.shape}")
    n = la.size
    if n < 2:
        raise DimensionError("ARI needs at least two samples")
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    contingency = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(contingency, (ia, ib), 1)

    def comb2(x: np.ndarray) -> np.ndarray:
        return x * (x - 1) // 2

    sum_cells = int(comb2(contingency).sum())
    sum_rows = int(comb2(contingency.sum(axis=1)).sum())
    sum_cols = int(comb2(contingency.sum(axis=0)).sum())
    total = int(comb2(np.array([n]))[0])
    expected = sum_rows * sum_cols / total
    max_index = 0.5 * (sum_rows + sum_cols)
    if max_index == expected:
        # both partitions trivial (all singletons or one block): identical
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


def run_hierarchy_study(
    scenario: SimScenario, alpha: float = 0.05, tau: int = 3, settings: Settings | None = None
) -> SimReport:
    """Mean ARI against the planted labels and mean cluster count over replications."""
    if scenario.k < 2:
        raise ValidationError("hierarchy study needs k >= 2 planted clusters")
    if scenario.mean_layout not in (LAYOUT_EQUIDISTANT, LAYOUT_INLINE):
        raise ValidationError("hierarchy study expects the equidistant or inline layout")
    settings = settings or Settings(restarts=10)
    planted = scenario.planted_labels()
    records: list[dict[str, Any]] = []
    aris: list[float] = []
    k_hats: list[int] = []
    for rep in range(scenario.replications):
        data = generate(scenario, rep)
        kernel = build_kernel_matrix(data, KernelSpec())
        rep_seed = int(np.random.SeedSequence(entropy=scenario.seed, spawn_key=(rep, 1)).generate_state(1)[0])
        root = uhclust(kernel, alpha=alpha, tau=tau, settings=settings.with_seed(rep_seed))
        labeling = extract_clusters(root)
        ari = adjusted_rand_index(labeling, planted)
        aris.append(ari)
        k_hats.append(labeling.k_hat)
        records.append({
            "replication": rep,
            "ari": float(ari),
            "k_hat": int(labeling.k_hat),
            "labels": [int(x) for x in labeling.labels],
        })
    return SimReport(
        scenario=scenario,
        mean_ari=float(np.mean(aris)),
        mean_k_hat=float(np.mean(k_hats)),
        per_replication=records,
    )

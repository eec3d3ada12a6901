"""Significance clustering: the best split among all significant partitions.

The homogeneity test's maximizer (largest standardized Bn) is the right
certificate for *whether* any split is significant, but a poor choice of
*which* split to report: the null variance of Bn dips at subgroup sizes 1 and
n/2, so the standardized criterion drifts toward those sizes regardless of
the data (with extreme separation it essentially always picks a singleton).
Raw Bn is size-unbiased, so uclust returns the raw-Bn maximum over the
universe of significant partitions: one exchange search per subgroup size,
each candidate tested with the same multiplicity correction as the
homogeneity test, then an argmax of raw Bn over the significant ones.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .config import Settings
from .errors import SearchConsistencyWarning, TooSmallError
from .kernels import KernelMatrix
from .optimize import SearchConfig, optimize_bn_at_size
from .significance import TestResult, _corrected_pvalue, homogeneity_test, n_star
from .ustat import Partition
from .variance import build_variance_table

VERDICT_HOMOGENEOUS = "homogeneous"
VERDICT_SPLIT = "split"


@dataclass(frozen=True)
class SizeCandidate:
    """Best partition found at one subgroup size, with its test outcome."""

    n1: int
    bn: float
    standardized: float
    p_value: float
    significant: bool


@dataclass(frozen=True)
class UclustResult:
    verdict: str
    partition: Partition | None
    per_size_candidates: list[SizeCandidate]
    homogeneity: TestResult
    alpha: float

    @property
    def p_value(self) -> float:
        """p-value of the returned split (the homogeneity p when homogeneous)."""
        if self.verdict == VERDICT_HOMOGENEOUS or self.partition is None:
            return self.homogeneity.p_value
        size = min(self.partition.n1, self.partition.n - self.partition.n1)
        for cand in self.per_size_candidates:
            if cand.n1 == size:
                return cand.p_value
        return self.homogeneity.p_value


def uclust(kernel: KernelMatrix, alpha: float = 0.05, settings: Settings | None = None) -> UclustResult:
    """Split the sample or declare it homogeneous, at level ``alpha``.

    Runs the homogeneity test first; when it rejects, searches the best
    partition at every subgroup size, marks each significant or not under
    the multiplicity-corrected rule, and returns the significant one with
    maximum raw Bn.
    """
    settings = settings or Settings()
    n = kernel.n
    if n < 3:
        raise TooSmallError(f"uclust needs n >= 3, got {n}")
    table = build_variance_table(
        kernel,
        iterations=settings.mc_iterations,
        seed=settings.seed,
        robust_threshold_n=settings.robust_threshold_n,
    )
    hom = homogeneity_test(kernel, alpha=alpha, settings=settings, table=table)
    if not hom.reject:
        return UclustResult(
            verdict=VERDICT_HOMOGENEOUS,
            partition=None,
            per_size_candidates=[],
            homogeneity=hom,
            alpha=alpha,
        )

    m = n_star(n, settings.allow_singletons)
    inv_sd = table.inv_sd()
    config = SearchConfig(
        restarts=settings.restarts_for(n),
        max_iterations=settings.max_iterations,
        seed=settings.seed,
    )
    min_size = 1 if settings.allow_singletons else 2
    candidates: list[SizeCandidate] = []
    best: Partition | None = None
    best_bn = float("-inf")
    for size in range(min_size, n // 2 + 1):
        part, raw = optimize_bn_at_size(kernel, size, config)
        z = raw * inv_sd[size]
        p, _ = _corrected_pvalue(z, n, m, "auto", settings.gumbel_threshold_n)
        significant = p < alpha
        candidates.append(
            SizeCandidate(n1=size, bn=raw, standardized=float(z), p_value=p, significant=significant)
        )
        if significant and (
            raw > best_bn
            or (raw == best_bn and best is not None and part.sort_key() < best.sort_key())
        ):
            best, best_bn = part, raw

    if best is None:
        # the homogeneity rejection certificate is itself a significant
        # partition, so this can only be a search failure
        warnings.warn(
            "homogeneity rejected but no per-size candidate was significant; "
            "returning the homogeneity maximizer",
            SearchConsistencyWarning,
            stacklevel=2,
        )
        best = hom.best_partition
    return UclustResult(
        verdict=VERDICT_SPLIT,
        partition=best,
        per_size_candidates=candidates,
        homogeneity=hom,
        alpha=alpha,
    )

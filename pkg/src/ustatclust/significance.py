"""Significance machinery for the maximum standardized between-group statistic.

Testing homogeneity by searching all two-group partitions is an implicit
multiple-testing problem over n* = 2^(n-1) - 1 candidate splits (or
2^(n-1) - n - 1 when singletons are excluded).  Treating the standardized
statistics as independent normals, the maximum has distribution Phi(x)^n*,
evaluated in log space because n* reaches 5e14 around n = 50.  For n >= 30
the extreme-value (Gumbel) approximation

    P(a_m^{-1} (M_m - b_m) <= y) = exp(-exp(-y))

replaces the exact power, with location b_m matching the exact median and
scale a_m the exact interquartile range of the maximum:

    a_m = log(4 log^2(2) / log^2(4/3)) / (2 sqrt(2 log m))
    b_m = sqrt(2 log m) - [log log m + log(4 pi log^2 2)] / (2 sqrt(2 log m)).

Because these constants are not rescaled by the Gumbel's own quantile spread,
the correction is deliberately conservative: its p-values are never more than
0.02 below the exact ones but can sit far above them near the center of the
null distribution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.special import log_ndtr

from .config import Settings
from .errors import DegenerateDataWarning, DomainError, LowDimensionWarning, TooSmallError
from .kernels import KernelMatrix
from .ustat import Partition, bn
from .variance import VarianceTable, build_variance_table

METHOD_SINGLE = "single"
METHOD_EXACT_MAX = "exact-max"
METHOD_GUMBEL = "gumbel"


def n_star(n: int, allow_singletons: bool = True) -> int:
    """Number of distinct two-group splits of n samples.

    2^(n-1) - 1 with singleton subgroups allowed, 2^(n-1) - n - 1 without.
    Exact at any n (Python integers do not overflow).
    """
    if allow_singletons:
        if n < 3:
            raise TooSmallError(f"need n >= 3 for singleton splits, got {n}")
        return 2 ** (n - 1) - 1
    if n < 4:
        raise TooSmallError(f"need n >= 4 without singleton splits, got {n}")
    return 2 ** (n - 1) - n - 1


def max_test_pvalue(z: float, n_star: int) -> float:
    """P(max of ``n_star`` independent standard normals > z) = 1 - Phi(z)^n*.

    Computed as -expm1(n* log Phi(z)); for n* too large to hold in a float
    the product is formed in log space, saturating at 1.
    """
    if n_star < 1:
        raise DomainError(f"n_star must be >= 1, got {n_star}")
    log_phi = float(log_ndtr(z))
    if log_phi == 0.0:
        return 0.0
    try:
        t = n_star * log_phi
    except OverflowError:
        t = -math.inf
    if t < -700.0:
        return 1.0
    return -math.expm1(t)


@dataclass(frozen=True)
class GumbelParams:
    """Normalization constants for the maximum of m independent normals."""

    a_m: float
    b_m: float
    m: int


def gumbel_params(m: int) -> GumbelParams:
    """Location/scale constants (natural logs throughout); requires m >= 2."""
    if m < 2:
        raise DomainError(f"Gumbel constants need m >= 2, got {m}")
    s = math.sqrt(2.0 * math.log(m))
    a_m = math.log((4.0 * math.log(2.0) ** 2) / (math.log(4.0 / 3.0) ** 2)) / (2.0 * s)
    b_m = s - (math.log(math.log(m)) + math.log(4.0 * math.pi * math.log(2.0) ** 2)) / (2.0 * s)
    return GumbelParams(a_m=a_m, b_m=b_m, m=m)


def gumbel_pvalue(z: float, m: int) -> float:
    """Upper-tail p-value of the Gumbel approximation to the max of m normals."""
    params = gumbel_params(m)
    y = (z - params.b_m) / params.a_m
    if y < -700.0:
        return 1.0
    return -math.expm1(-math.exp(-y))


@dataclass(frozen=True)
class TestResult:
    """Outcome of a (max-corrected) test of one standardized statistic."""

    statistic: float
    n_star: int
    p_value: float
    method: str
    alpha: float
    reject: bool
    best_partition: Partition | None = None


def _corrected_pvalue(z: float, n: int, m: int, multiplicity: str, gumbel_threshold_n: int) -> tuple[float, str]:
    if multiplicity == METHOD_SINGLE:
        return max_test_pvalue(z, 1), METHOD_SINGLE
    if multiplicity == "max" or (multiplicity == "auto" and n < gumbel_threshold_n):
        return max_test_pvalue(z, m), METHOD_EXACT_MAX
    if multiplicity in ("auto", METHOD_GUMBEL):
        return gumbel_pvalue(z, m), METHOD_GUMBEL
    raise DomainError(f"unknown multiplicity rule: {multiplicity!r}")


def u_test(
    partition: Partition,
    kernel: KernelMatrix,
    table: VarianceTable,
    alpha: float = 0.05,
    multiplicity: str = "auto",
    settings: Settings | None = None,
) -> TestResult:
    """Standardize Bn of ``partition`` by its size's null variance and test it.

    ``multiplicity`` selects the reference distribution: "single" for a
    plain one-sided normal test of an a-priori partition, "max" for the exact
    maximum over all splits, "auto" to switch from exact-max to the Gumbel
    correction at n >= 30 (configurable through ``settings``).
    """
    settings = settings or Settings()
    n = kernel.n
    result = bn(partition, kernel)
    var = table.variance(partition.n1)
    m = n_star(n, settings.allow_singletons)
    if var <= 0.0:
        warnings.warn(
            "null variance is zero; data carry no pairwise variation",
            DegenerateDataWarning,
            stacklevel=2,
        )
        return TestResult(
            statistic=0.0,
            n_star=m,
            p_value=1.0,
            method=METHOD_EXACT_MAX,
            alpha=alpha,
            reject=False,
            best_partition=partition,
        )
    z = result.bn / math.sqrt(var)
    p, method = _corrected_pvalue(z, n, m, multiplicity, settings.gumbel_threshold_n)
    return TestResult(
        statistic=z,
        n_star=m,
        p_value=p,
        method=method,
        alpha=alpha,
        reject=p < alpha,
        best_partition=partition,
    )


def homogeneity_test(
    kernel: KernelMatrix,
    alpha: float = 0.05,
    settings: Settings | None = None,
    table: VarianceTable | None = None,
) -> TestResult:
    """Test whether any two-group split of the sample is significant.

    Finds the partition maximizing the standardized statistic over all
    subgroup sizes, then applies the multiplicity-corrected test ("auto"
    rule).  Not rejecting certifies every other partition non-significant as
    well.  Pass a prebuilt variance ``table`` to share it across calls.
    """
    from .optimize import SearchConfig, optimize_standardized

    settings = settings or Settings()
    n = kernel.n
    if n < 3:
        raise TooSmallError(f"homogeneity test needs n >= 3, got {n}")
    if kernel.n_features is not None and kernel.n_features < settings.low_dim_warning_threshold:
        warnings.warn(
            f"feature dimension {kernel.n_features} is small; the normal "
            "approximation behind the test may be unreliable",
            LowDimensionWarning,
            stacklevel=2,
        )
    if table is None:
        table = build_variance_table(
            kernel,
            iterations=settings.mc_iterations,
            seed=settings.seed,
            robust_threshold_n=settings.robust_threshold_n,
        )
    if table.degenerate:
        warnings.warn("degenerate data: no split can be significant", DegenerateDataWarning, stacklevel=2)
        trivial = Partition.from_group1(n, [0])
        m = n_star(n, settings.allow_singletons)
        return TestResult(
            statistic=0.0,
            n_star=m,
            p_value=1.0,
            method=METHOD_EXACT_MAX,
            alpha=alpha,
            reject=False,
            best_partition=trivial,
        )
    size_set = None if settings.allow_singletons else frozenset(range(2, n // 2 + 1))
    config = SearchConfig(
        restarts=settings.restarts_for(n),
        max_iterations=settings.max_iterations,
        seed=settings.seed,
        size_set=size_set,
    )
    best, _ = optimize_standardized(kernel, table, config)
    return u_test(best, kernel, table, alpha=alpha, multiplicity="auto", settings=settings)

"""Shared run settings for the test and clustering pipelines."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ValidationError


@dataclass(frozen=True)
class Settings:
    """Knobs shared by the homogeneity test, uclust and uhclust.

    mc_iterations / seed drive the permutation variance estimates;
    restarts (None = max(10, n)) and max_iterations bound the local searches;
    gumbel_threshold_n is the sample size from which the extreme-value
    correction replaces the exact max distribution; robust_threshold_n is the
    largest n whose anchor variance run uses the robust scale;
    allow_singletons admits subgroup size 1 (and sets the implicit test count
    to 2^(n-1) - 1); low_dim_warning_threshold flags feature counts for which
    the normal approximation is doubtful.
    """

    mc_iterations: int = 1000
    seed: int = 0
    restarts: int | None = None
    max_iterations: int = 1_000_000
    gumbel_threshold_n: int = 30
    robust_threshold_n: int = 5
    allow_singletons: bool = True
    low_dim_warning_threshold: int = 50

    def __post_init__(self) -> None:
        if self.mc_iterations < 100:
            raise ValidationError("mc_iterations must be at least 100")
        if self.restarts is not None and self.restarts < 1:
            raise ValidationError("restarts must be at least 1")

    def restarts_for(self, n: int) -> int:
        return self.restarts if self.restarts is not None else max(10, n)

    def with_seed(self, seed: int) -> "Settings":
        return replace(self, seed=int(seed))

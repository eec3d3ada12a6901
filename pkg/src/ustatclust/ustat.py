"""Within-group, between-group and combined U-statistics, and the Bn statistic.

For a partition of n samples into groups of sizes (n1, n2), the pooled
pairwise mean Un splits exactly into a weighted within-group part Wn and the
between-minus-within part Bn.  Bn is zero in expectation when the two groups
are exchangeable and positive when cross-pair kernel values dominate, which
makes it the score every search and test in this package maximizes.  Groups
of size one are supported through the extended definition, where the
singleton's (undefined) within term drops out and the coefficient collapses
to 1/n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from ._backend import bn_from_sums
from .errors import InvalidMoveError, UndefinedStatisticError, ValidationError
from .kernels import KernelMatrix


@dataclass(frozen=True)
class Partition:
    """Two-group assignment in canonical orientation.

    ``assignment`` holds labels 1/2 per sample.  Canonical orientation means
    group 1 is the smaller group (on a size tie, the group containing sample
    0); Bn is label-symmetric, so nothing is lost.
    """

    assignment: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.assignment, dtype=np.int8)
        if a.ndim != 1 or a.size < 2:
            raise ValidationError("assignment must be a vector of length >= 2")
        if not np.isin(a, (1, 2)).all():
            raise ValidationError("assignment labels must be 1 or 2")
        n1 = int(np.sum(a == 1))
        n2 = a.size - n1
        if n1 == 0 or n2 == 0:
            raise ValidationError("both groups must be non-empty")
        if n1 > n2 or (n1 == n2 and a[0] == 2):
            a = np.where(a == 1, 2, 1).astype(np.int8)
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)

    @classmethod
    def from_group1(cls, n: int, group1: Iterable[int]) -> "Partition":
        a = np.full(n, 2, dtype=np.int8)
        a[np.asarray(list(group1), dtype=np.intp)] = 1
        return cls(a)

    @property
    def n(self) -> int:
        return self.assignment.size

    @property
    def n1(self) -> int:
        return int(np.sum(self.assignment == 1))

    @property
    def n2(self) -> int:
        return self.n - self.n1

    def group1_indices(self) -> np.ndarray:
        return np.flatnonzero(self.assignment == 1)

    def group2_indices(self) -> np.ndarray:
        return np.flatnonzero(self.assignment == 2)

    def indicator(self) -> np.ndarray:
        """Group-1 membership as a float 0/1 vector."""
        return (self.assignment == 1).astype(np.float64)

    def swapped(self) -> "Partition":
        """Label-swapped copy; canonicalizes back to an equal partition."""
        return Partition(np.where(self.assignment == 1, 2, 1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return bool(np.array_equal(self.assignment, other.assignment))

    def __hash__(self) -> int:
        return hash(self.assignment.tobytes())

    def sort_key(self) -> bytes:
        """Lexicographic key of the canonical assignment vector."""
        return self.assignment.tobytes()


@dataclass(frozen=True)
class GroupSums:
    """Kernel-value sums over unordered within-group pairs and cross pairs.

    These three numbers are the sufficient statistics for every U-statistic
    here; local search mutates them instead of rescanning the matrix.
    """

    within1: float
    within2: float
    between: float

    @property
    def total(self) -> float:
        return self.within1 + self.within2 + self.between


@dataclass(frozen=True)
class BnResult:
    """Bn value for one partition, with its null variance once estimated."""

    bn: float
    n1: int
    variance: float = 0.0

    @property
    def standardized(self) -> float:
        if self.variance > 0.0:
            return self.bn / math.sqrt(self.variance)
        return float("nan")

    def with_variance(self, variance: float) -> "BnResult":
        return replace(self, variance=float(variance))


def group_sums(partition: Partition, kernel: KernelMatrix) -> GroupSums:
    """Accumulate the three pair sums for ``partition`` over ``kernel``."""
    z = partition.indicator()
    phi = kernel.phi
    g = phi @ z
    within1 = 0.5 * float(g @ z)
    between = float(g @ (1.0 - z))
    within2 = kernel.pair_total() - within1 - between
    return GroupSums(within1, within2, between)


def u_within(sums: GroupSums, g: int, n_g: int) -> float:
    """Mean kernel value over the unordered pairs inside group ``g`` (1 or 2)."""
    if n_g < 2:
        raise UndefinedStatisticError(f"within-group statistic needs n_g >= 2, got {n_g}")
    if g not in (1, 2):
        raise ValidationError(f"group index must be 1 or 2, got {g}")
    s = sums.within1 if g == 1 else sums.within2
    return s / (n_g * (n_g - 1) / 2.0)


def u_between(sums: GroupSums, n1: int, n2: int) -> float:
    """Mean kernel value over the n1*n2 cross pairs."""
    if n1 < 1 or n2 < 1:
        raise UndefinedStatisticError("between-group statistic needs both groups non-empty")
    return sums.between / (n1 * n2)


def _check_sizes(n: int, n1: int) -> None:
    small = min(n1, n - n1)
    if small == 1 and n < 3:
        raise UndefinedStatisticError(f"singleton split needs n >= 3, got n={n}")
    if small >= 2 and n < 4:
        raise UndefinedStatisticError(f"non-singleton split needs n >= 4, got n={n}")


def bn(partition: Partition, kernel: KernelMatrix) -> BnResult:
    """Between-group statistic Bn for ``partition``.

    The variance field is left at 0 here; it is filled from a variance table
    by the test layer.
    """
    if kernel.n != partition.n:
        raise ValidationError(f"partition over {partition.n} samples, kernel over {kernel.n}")
    _check_sizes(partition.n, partition.n1)
    sums = group_sums(partition, kernel)
    value = bn_from_sums(
        sums.within1, sums.within2, sums.between, partition.n1, partition.n2, partition.n
    )
    return BnResult(bn=float(value), n1=partition.n1)


def un_decomposition(partition: Partition, kernel: KernelMatrix) -> tuple[float, float, float]:
    """Split the pooled pairwise mean: returns ``(un, wn, bn)`` with un = wn + bn.

    ``wn`` is computed from its own weighted form (not as un - bn), so the
    returned identity is a genuine arithmetic check.  For a singleton group 1
    the weighted form is ((n-1)/n) * U2 + (1/n) * U12.
    """
    n, n1, n2 = partition.n, partition.n1, partition.n2
    _check_sizes(n, n1)
    sums = group_sums(partition, kernel)
    un = sums.total / (n * (n - 1) / 2.0)
    u12 = u_between(sums, n1, n2)
    if n1 >= 2 and n2 >= 2:
        wn = (n1 / n) * u_within(sums, 1, n1) + (n2 / n) * u_within(sums, 2, n2)
    else:
        # singleton group (canonical orientation puts it in group 1)
        u_big = u_within(sums, 2, n2)
        wn = ((n - 1) / n) * u_big + (1.0 / n) * u12
    value = bn_from_sums(sums.within1, sums.within2, sums.between, n1, n2, n)
    return float(un), float(wn), float(value)


def bn_delta_move(
    partition: Partition, sums: GroupSums, element: int, kernel: KernelMatrix
) -> tuple[float, GroupSums]:
    """Bn after moving ``element`` to the other group, by O(n) sum adjustment.

    Returns the new Bn and the adjusted :class:`GroupSums`; agrees with a
    from-scratch recomputation on the moved partition.
    """
    n = partition.n
    a = partition.assignment
    if not 0 <= element < n:
        raise ValidationError(f"element index {element} out of range")
    src = int(a[element])
    if (src == 1 and partition.n1 == 1) or (src == 2 and partition.n2 == 1):
        raise InvalidMoveError(f"moving element {element} would empty group {src}")
    row = kernel.phi[element]
    to_g1 = float(row @ (a == 1))
    to_g2 = float(row @ (a == 2))
    if src == 1:
        new = GroupSums(
            within1=sums.within1 - to_g1,
            within2=sums.within2 + to_g2,
            between=sums.between - to_g2 + to_g1,
        )
        n1 = partition.n1 - 1
    else:
        new = GroupSums(
            within1=sums.within1 + to_g1,
            within2=sums.within2 - to_g2,
            between=sums.between - to_g1 + to_g2,
        )
        n1 = partition.n1 + 1
    value = bn_from_sums(new.within1, new.within2, new.between, n1, n - n1, n)
    return float(value), new

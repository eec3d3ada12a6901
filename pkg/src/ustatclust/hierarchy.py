"""Divisive hierarchical significance clustering with family-wise error control.

The whole sample is tested at level alpha; whenever a group is declared
non-homogeneous it is split by uclust and the two children are tested in
turn.  A descendant group of size n_i is tested at the reduced level

    alpha_i = alpha * (n_i - 1) / (n - 1)

(with n the root sample size), which keeps the probability of any false
split across the whole tree at alpha.  Recursion stops at homogeneous
verdicts or at groups of tau or fewer members, which are never tested.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .cluster import VERDICT_SPLIT, uclust
from .config import Settings
from .errors import DomainError, NonMonotoneHeightWarning, TooSmallError
from .kernels import KernelMatrix
from .ustat import bn as bn_statistic

DECISION_SPLIT = "split"
DECISION_HOMOGENEOUS = "homogeneous"
DECISION_TOO_SMALL = "too-small"


@dataclass(frozen=True)
class DendrogramNode:
    """One tested (or size-exempt) group in the significance dendrogram.

    ``members`` are global sample indices (ascending).  ``height`` is the raw
    Bn of the split for split nodes and 0 for leaves; Bn is the natural
    separation scale here, though the resulting heights are not guaranteed
    monotone along the tree (violations are warned about, not corrected).
    """

    members: tuple[int, ...]
    alpha_i: float
    p_value: float | None
    decision: str
    children: tuple["DendrogramNode", ...] = ()
    height: float = 0.0

    @property
    def n(self) -> int:
        return len(self.members)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list["DendrogramNode"]:
        if self.is_leaf:
            return [self]
        out: list[DendrogramNode] = []
        for child in self.children:
            out.extend(child.leaves())
        return out


@dataclass(frozen=True)
class ClusterLabeling:
    """Flat cluster ids (0..k_hat-1), one per sample, from dendrogram leaves."""

    labels: np.ndarray
    k_hat: int

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)


def _node_seed(base_seed: int, path: tuple[int, ...]) -> int:
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(2, *path))
    return int(ss.generate_state(1)[0])


def uhclust(
    kernel: KernelMatrix,
    alpha: float = 0.05,
    tau: int = 3,
    settings: Settings | None = None,
) -> DendrogramNode:
    """Grow the significance dendrogram for the full sample.

    Each node rebuilds its own permutation variance table from its kernel
    submatrix and is tested at its FWER-adjusted level; per-node random
    streams are derived from the node's position in the tree, so results are
    reproducible for a fixed seed.
    """
    settings = settings or Settings()
    n_root = kernel.n
    if n_root < 4:
        raise TooSmallError(f"uhclust needs n >= 4, got {n_root}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if tau < 2:
        raise DomainError(f"tau must be >= 2, got {tau}")

    non_monotone = 0

    def recurse(members: np.ndarray, path: tuple[int, ...]) -> DendrogramNode:
        nonlocal non_monotone
        n_i = members.size
        alpha_i = alpha * (n_i - 1) / (n_root - 1)
        if n_i <= tau:
            return DendrogramNode(
                members=tuple(int(i) for i in members),
                alpha_i=alpha_i,
                p_value=None,
                decision=DECISION_TOO_SMALL,
            )
        sub = kernel.submatrix(members)
        node_settings = settings.with_seed(_node_seed(settings.seed, path))
        result = uclust(sub, alpha=alpha_i, settings=node_settings)
        if result.verdict != VERDICT_SPLIT or result.partition is None:
            return DendrogramNode(
                members=tuple(int(i) for i in members),
                alpha_i=alpha_i,
                p_value=result.homogeneity.p_value,
                decision=DECISION_HOMOGENEOUS,
            )
        part = result.partition
        side_a = members[part.group1_indices()]
        side_b = members[part.group2_indices()]
        if side_b.min() < side_a.min():
            side_a, side_b = side_b, side_a
        height = bn_statistic(part, sub).bn
        children = (
            recurse(side_a, path + (0,)),
            recurse(side_b, path + (1,)),
        )
        for child in children:
            if child.decision == DECISION_SPLIT and child.height > height:
                non_monotone += 1
        return DendrogramNode(
            members=tuple(int(i) for i in members),
            alpha_i=alpha_i,
            p_value=result.p_value,
            decision=DECISION_SPLIT,
            children=children,
            height=float(height),
        )

    root = recurse(np.arange(n_root, dtype=np.intp), ())
    if non_monotone:
        warnings.warn(
            f"{non_monotone} split height(s) exceed their parent's; the "
            "dendrogram is not height-monotone",
            NonMonotoneHeightWarning,
            stacklevel=2,
        )
    return root


def extract_clusters(root: DendrogramNode) -> ClusterLabeling:
    """One cluster per dendrogram leaf; ids assigned by smallest member index."""
    leaves = sorted(root.leaves(), key=lambda node: min(node.members))
    labels = np.empty(root.n, dtype=np.int64)
    position = {sample: i for i, sample in enumerate(sorted(root.members))}
    for cluster_id, leaf in enumerate(leaves):
        for sample in leaf.members:
            labels[position[sample]] = cluster_id
    return ClusterLabeling(labels=labels, k_hat=len(leaves))

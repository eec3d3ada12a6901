"""Divisive hierarchy, the FWER level schedule and cluster extraction."""

import numpy as np
import pytest

from helpers import normal_kernel
from ustatclust import (
    DataMatrix,
    Settings,
    build_kernel_matrix,
    extract_clusters,
    uhclust,
)
from ustatclust.errors import DomainError, TooSmallError
from ustatclust.hierarchy import DendrogramNode


def planted_three_clusters(n1=6, L=400, gap=2.0, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((3 * n1, L))
    x[n1 : 2 * n1, 0::2] += gap
    x[2 * n1 :, 1::2] += gap
    return build_kernel_matrix(DataMatrix(x))


def walk(node):
    yield node
    for child in node.children:
        yield from walk(child)


class TestLevelSchedule:
    def test_root_level_is_alpha(self):
        km = planted_three_clusters(seed=1)
        root = uhclust(km, alpha=0.05, settings=Settings(seed=1))
        assert root.alpha_i == 0.05

    def test_formula_at_every_node(self):
        km = planted_three_clusters(seed=2)
        root = uhclust(km, alpha=0.05, settings=Settings(seed=2))
        n = root.n
        for node in walk(root):
            assert node.alpha_i == 0.05 * (node.n - 1) / (n - 1)

    def test_reference_value(self):
        # n=100, n_i=50 gives exactly alpha * 49 / 99
        assert 0.05 * (50 - 1) / (100 - 1) == pytest.approx(0.024747474747474747)

    def test_levels_decrease_along_paths(self):
        km = planted_three_clusters(seed=3)
        root = uhclust(km, settings=Settings(seed=3))

        def check(node):
            for child in node.children:
                assert child.alpha_i < node.alpha_i
                check(child)

        check(root)


class TestTreeStructure:
    def test_children_partition_parent(self):
        km = planted_three_clusters(seed=4)
        root = uhclust(km, settings=Settings(seed=4))
        for node in walk(root):
            if node.children:
                merged = sorted(node.children[0].members + node.children[1].members)
                assert merged == sorted(node.members)

    def test_leaves_partition_everything(self):
        km = planted_three_clusters(seed=5)
        root = uhclust(km, settings=Settings(seed=5))
        members = sorted(m for leaf in root.leaves() for m in leaf.members)
        assert members == list(range(root.n))

    def test_split_nodes_have_two_children_and_positive_height(self):
        km = planted_three_clusters(seed=6)
        root = uhclust(km, settings=Settings(seed=6))
        for node in walk(root):
            if node.decision == "split":
                assert len(node.children) == 2
                assert node.height > 0
            else:
                assert node.children == ()
                assert node.height == 0.0

    def test_too_small_nodes_never_tested(self):
        km = planted_three_clusters(n1=4, seed=7)
        root = uhclust(km, tau=3, settings=Settings(seed=7))
        for node in walk(root):
            if node.decision == "too-small":
                assert node.n <= 3
                assert node.p_value is None
            elif node.decision != "too-small":
                assert node.n > 3

    def test_child_order_by_smallest_member(self):
        km = planted_three_clusters(seed=8)
        root = uhclust(km, settings=Settings(seed=8))
        for node in walk(root):
            if node.children:
                assert min(node.children[0].members) < min(node.children[1].members)


class TestRecovery:
    def test_three_planted_clusters(self):
        km = planted_three_clusters(seed=13)
        root = uhclust(km, settings=Settings(seed=13))
        labeling = extract_clusters(root)
        assert labeling.k_hat == 3
        expected = np.repeat([0, 1, 2], 6)
        assert np.array_equal(labeling.labels, expected)

    def test_homogeneous_sample_single_cluster(self):
        km = normal_kernel(14, 400, seed=14)
        root = uhclust(km, settings=Settings(seed=14))
        labeling = extract_clusters(root)
        assert labeling.k_hat == 1
        assert set(labeling.labels.tolist()) == {0}

    def test_tau_blocks_small_splits(self):
        # with tau equal to the planted group size, no group that small is tested
        km = planted_three_clusters(n1=6, seed=11)
        root = uhclust(km, tau=6, settings=Settings(seed=11))
        for node in walk(root):
            if node.decision == "split":
                assert node.n > 6

    def test_determinism(self):
        km = planted_three_clusters(seed=12)
        r1 = uhclust(km, settings=Settings(seed=12))
        r2 = uhclust(km, settings=Settings(seed=12))
        assert r1 == r2


class TestExtractClusters:
    def test_two_level_tree_four_leaves(self):
        leaf = lambda members: DendrogramNode(
            members=members, alpha_i=0.01, p_value=None, decision="too-small"
        )
        inner1 = DendrogramNode(
            members=(0, 1, 2, 3), alpha_i=0.02, p_value=0.001, decision="split",
            children=(leaf((0, 1)), leaf((2, 3))), height=1.0,
        )
        inner2 = DendrogramNode(
            members=(4, 5, 6, 7), alpha_i=0.02, p_value=0.001, decision="split",
            children=(leaf((4, 5)), leaf((6, 7))), height=1.0,
        )
        root = DendrogramNode(
            members=tuple(range(8)), alpha_i=0.05, p_value=0.0001, decision="split",
            children=(inner1, inner2), height=2.0,
        )
        labeling = extract_clusters(root)
        assert labeling.k_hat == 4
        assert labeling.labels.tolist() == [0, 0, 1, 1, 2, 2, 3, 3]

    def test_labels_contiguous_from_zero(self):
        km = planted_three_clusters(seed=13)
        labeling = extract_clusters(uhclust(km, settings=Settings(seed=13)))
        assert sorted(set(labeling.labels.tolist())) == list(range(labeling.k_hat))


class TestValidation:
    def test_alpha_range(self):
        km = normal_kernel(8, 100, seed=14)
        with pytest.raises(DomainError):
            uhclust(km, alpha=1.5)

    def test_tau_floor(self):
        km = normal_kernel(8, 100, seed=15)
        with pytest.raises(DomainError):
            uhclust(km, tau=1)

    def test_minimum_n(self):
        km = normal_kernel(3, 100, seed=16)
        with pytest.raises(TooSmallError):
            uhclust(km)

"""The uclust split finder."""

import numpy as np
import pytest

from helpers import normal_kernel, planted_kernel
from ustatclust import Settings, build_kernel_matrix, uclust
from ustatclust.errors import TooSmallError
from ustatclust.kernels import DataMatrix


class TestVerdicts:
    def test_homogeneous(self):
        km = normal_kernel(12, 300, seed=0)
        result = uclust(km, settings=Settings(seed=0))
        assert result.verdict == "homogeneous"
        assert result.partition is None
        assert not result.homogeneity.reject
        assert result.per_size_candidates == []

    def test_split_coherent_with_homogeneity(self):
        km = planted_kernel(n=12, k=6, cross=9.0, within=1.0, noise=0.3, seed=1)
        result = uclust(km, settings=Settings(seed=1))
        assert result.verdict == "split"
        assert result.homogeneity.reject
        assert result.partition is not None
        assert result.p_value < result.alpha

    def test_planted_split_recovered(self):
        km = planted_kernel(n=12, k=6, cross=9.0, within=1.0, noise=0.3, seed=2)
        result = uclust(km, settings=Settings(seed=2))
        assert sorted(result.partition.group1_indices()) == [0, 1, 2, 3, 4, 5]

    def test_too_small(self):
        km = normal_kernel(2, 100, seed=3)
        with pytest.raises(TooSmallError):
            uclust(km)


class TestSizeBiasCorrection:
    def test_planted_size2_returned_even_when_standardized_prefers_singleton(self):
        hits = 0
        singleton_argmax = 0
        for seed in range(5):
            km = planted_kernel(n=12, k=2, cross=10.0, within=1.0, noise=0.4, seed=seed)
            result = uclust(km, settings=Settings(seed=seed))
            assert result.verdict == "split"
            hits += sorted(result.partition.group1_indices()) == [0, 1]
            singleton_argmax += result.homogeneity.best_partition.n1 == 1
        assert hits == 5
        # the standardized criterion drifts to singletons on these instances
        assert singleton_argmax >= 4

    def test_planted_size3(self):
        km = planted_kernel(n=12, k=3, cross=10.0, within=1.0, noise=0.4, seed=7)
        result = uclust(km, settings=Settings(seed=7))
        assert sorted(result.partition.group1_indices()) == [0, 1, 2]

    def test_chosen_candidate_maximizes_bn_among_significant(self):
        km = planted_kernel(n=12, k=2, cross=10.0, within=1.0, noise=0.4, seed=8)
        result = uclust(km, settings=Settings(seed=8))
        significant = [c for c in result.per_size_candidates if c.significant]
        assert significant
        chosen_size = min(result.partition.n1, 12 - result.partition.n1)
        chosen = next(c for c in result.per_size_candidates if c.n1 == chosen_size)
        assert chosen.bn == max(c.bn for c in significant)

    def test_candidates_cover_all_sizes(self):
        km = planted_kernel(n=12, k=6, cross=9.0, within=1.0, noise=0.3, seed=9)
        result = uclust(km, settings=Settings(seed=9))
        assert [c.n1 for c in result.per_size_candidates] == [1, 2, 3, 4, 5, 6]


class TestEquivariance:
    def test_permuting_samples_permutes_result(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((12, 400))
        x[:5] += 1.5
        km = build_kernel_matrix(DataMatrix(x))
        result = uclust(km, settings=Settings(seed=4))
        perm = rng.permutation(12)
        km_perm = build_kernel_matrix(DataMatrix(x[perm]))
        result_perm = uclust(km_perm, settings=Settings(seed=4))
        original = set(result.partition.group1_indices().tolist())
        mapped = {int(np.flatnonzero(perm == i)[0]) for i in original}
        found = set(result_perm.partition.group1_indices().tolist())
        assert found in (mapped, set(range(12)) - mapped)

    def test_determinism(self):
        km = planted_kernel(n=10, k=5, cross=6.0, within=1.0, noise=0.3, seed=11)
        r1 = uclust(km, settings=Settings(seed=5))
        r2 = uclust(km, settings=Settings(seed=5))
        assert r1.verdict == r2.verdict
        assert r1.partition == r2.partition
        assert [c.p_value for c in r1.per_size_candidates] == [
            c.p_value for c in r2.per_size_candidates
        ]

"""Data generators, the ARI, and the two study runners."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_ari
from ustatclust import Settings, SimScenario, adjusted_rand_index, generate
from ustatclust.errors import DimensionError, DomainError, ValidationError
from ustatclust.simulate import run_hierarchy_study, run_homogeneity_study


class TestScenario:
    def test_two_group_constructor(self):
        scen = SimScenario.two_group(n=10, L=50, m2=0.5)
        assert scen.group_sizes == (5, 5)
        assert scen.mean_layout == "two-group-shift"

    def test_clusters_constructor(self):
        scen = SimScenario.clusters(k=3, n1=4, L=50, d=0.4)
        assert scen.n == 12 and scen.group_sizes == (4, 4, 4)

    def test_sizes_must_sum(self):
        with pytest.raises(ValidationError):
            SimScenario(n=10, L=5, k=2, group_sizes=(4, 4))

    def test_negative_shift(self):
        with pytest.raises(DomainError):
            SimScenario.two_group(n=6, L=5, m2=-0.1)

    def test_planted_labels(self):
        scen = SimScenario.clusters(k=3, n1=2, L=5, d=1.0)
        assert scen.planted_labels().labels.tolist() == [0, 0, 1, 1, 2, 2]


class TestGenerate:
    def test_deterministic_per_replication(self):
        scen = SimScenario.two_group(n=6, L=20, m2=0.3, seed=7)
        a = generate(scen, 3).values
        b = generate(scen, 3).values
        assert np.array_equal(a, b)
        c = generate(scen, 4).values
        assert not np.array_equal(a, c)

    def test_null_case_groups_identical_in_law(self):
        scen = SimScenario.two_group(n=40, L=200, m2=0.0, seed=1)
        data = generate(scen, 0).values
        # same marginal moments in both halves
        assert abs(data[:20].mean() - data[20:].mean()) < 0.05

    def test_two_group_shift_means(self):
        scen = SimScenario.two_group(n=30, L=4000, m2=0.5, seed=2)
        data = generate(scen, 0).values
        assert data[:15].mean() == pytest.approx(0.0, abs=0.02)
        assert data[15:].mean() == pytest.approx(0.5, abs=0.02)

    def test_equidistant_mean_distances(self):
        # planted mean vectors sit at pairwise distance d * sqrt(L)
        from ustatclust.simulate import _mean_vectors

        scen = SimScenario.clusters(k=3, n1=2, L=100, d=0.4)
        means = _mean_vectors(scen)
        target = 0.4 * math.sqrt(100)
        for i in range(3):
            for j in range(i + 1, 3):
                dist = np.linalg.norm(means[i] - means[j])
                assert dist == pytest.approx(target, rel=1e-12)

    def test_inline_mean_distances(self):
        from ustatclust.simulate import _mean_vectors

        scen = SimScenario.clusters(k=3, n1=2, L=25, d=0.2, layout="inline")
        means = _mean_vectors(scen)
        step = 0.2 * math.sqrt(25)
        assert np.linalg.norm(means[1] - means[0]) == pytest.approx(step, rel=1e-12)
        assert np.linalg.norm(means[2] - means[1]) == pytest.approx(step, rel=1e-12)
        assert np.linalg.norm(means[2] - means[0]) == pytest.approx(2 * step, rel=1e-12)

    def test_simplex_needs_enough_coordinates(self):
        scen = SimScenario.clusters(k=5, n1=2, L=3, d=0.4)
        with pytest.raises(DomainError):
            generate(scen, 0)

    @pytest.mark.parametrize("noise", ["chi-squared", "gamma"])
    def test_standardized_noise_moments(self, noise):
        scen = SimScenario.two_group(n=40, L=2000, m2=0.0, seed=3, noise=noise)
        data = generate(scen, 0).values
        assert data.mean() == pytest.approx(0.0, abs=0.02)
        assert data.var() == pytest.approx(1.0, abs=0.05)

    def test_unknown_noise(self):
        with pytest.raises(ValidationError):
            SimScenario.two_group(n=6, L=5, m2=0.0, noise="cauchy")


class TestAdjustedRandIndex:
    def test_identical(self):
        assert adjusted_rand_index(np.array([0, 0, 1, 1]), np.array([0, 0, 1, 1])) == 1.0

    def test_renaming_invariance(self):
        a = np.array([0, 0, 1, 1, 2, 2])
        b = np.array([2, 2, 0, 0, 1, 1])
        assert adjusted_rand_index(a, b) == 1.0

    def test_crossed_labelings_match_brute_force(self):
        a = [0, 0, 1, 1]
        b = [0, 1, 0, 1]
        assert adjusted_rand_index(np.array(a), np.array(b)) == pytest.approx(brute_ari(a, b))

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_matches_pair_enumeration_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 12))
        a = rng.integers(0, 3, size=n)
        b = rng.integers(0, 3, size=n)
        assert adjusted_rand_index(a, b) == pytest.approx(brute_ari(a, b), rel=1e-12, abs=1e-12)

    def test_bounded_above_by_one(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a = rng.integers(0, 4, size=10)
            b = rng.integers(0, 4, size=10)
            assert adjusted_rand_index(a, b) <= 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            adjusted_rand_index(np.array([0, 1]), np.array([0, 1, 2]))


class TestHomogeneityStudy:
    def test_report_fields_and_determinism(self):
        scen = SimScenario.two_group(n=8, L=100, m2=0.0, replications=5, seed=4)
        r1 = run_homogeneity_study(scen, settings=Settings(restarts=5, mc_iterations=200))
        r2 = run_homogeneity_study(scen, settings=Settings(restarts=5, mc_iterations=200))
        assert set(r1.rejection_rate) == {"max", "gumbel"}
        assert r1.per_replication == r2.per_replication
        assert len(r1.per_replication) == 5

    def test_standard_error(self):
        scen = SimScenario.two_group(n=8, L=100, m2=0.0, replications=25, seed=5)
        report = run_homogeneity_study(scen, settings=Settings(restarts=5, mc_iterations=200))
        rate = report.rejection_rate["max"]
        assert report.standard_error(rate) == pytest.approx(
            math.sqrt(rate * (1 - rate) / 25)
        )

    def test_power_increases_with_shift(self):
        rates = []
        for m2 in (0.0, 1.2):
            scen = SimScenario.two_group(n=10, L=150, m2=m2, replications=10, seed=6)
            report = run_homogeneity_study(scen, settings=Settings(restarts=5, mc_iterations=300))
            rates.append(report.rejection_rate["max"])
        assert rates[1] >= rates[0]

    def test_layout_must_be_two_group(self):
        scen = SimScenario.clusters(k=3, n1=4, L=50, d=0.4)
        with pytest.raises(ValidationError):
            run_homogeneity_study(scen)


class TestHierarchyStudy:
    def test_recovers_planted_clusters(self):
        scen = SimScenario.clusters(k=3, n1=8, L=500, d=1.0, replications=3, seed=7)
        report = run_hierarchy_study(scen, settings=Settings(restarts=5, mc_iterations=300))
        assert report.mean_ari == pytest.approx(1.0, abs=0.05)
        assert report.mean_k_hat == pytest.approx(3.0, abs=0.35)
        assert len(report.per_replication) == 3
        assert all("labels" in record for record in report.per_replication)

    def test_determinism(self):
        scen = SimScenario.clusters(k=2, n1=4, L=300, d=1.0, replications=2, seed=8)
        r1 = run_hierarchy_study(scen, settings=Settings(restarts=5, mc_iterations=300))
        r2 = run_hierarchy_study(scen, settings=Settings(restarts=5, mc_iterations=300))
        assert r1.per_replication == r2.per_replication

    def test_layout_validation(self):
        scen = SimScenario.two_group(n=8, L=50, m2=0.4)
        with pytest.raises(ValidationError):
            run_hierarchy_study(scen)

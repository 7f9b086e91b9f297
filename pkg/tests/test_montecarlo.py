"""Tests for Monte Carlo moment estimation."""

import math

import numpy as np
import pytest

from catalan_functionals.errors import ArgumentError, CapError
from catalan_functionals.exact_moments import raw_moments
from catalan_functionals.limit_law import limit_moments
from catalan_functionals.montecarlo import block_rng, draw_samples, limit_normalization, run_experiment
from catalan_functionals.numeric import make_field
from catalan_functionals.tolls import parse_toll
from catalan_functionals.types import ExperimentSpec


class TestStreams:
    """Samples depend on the seed only, not on how blocks are scheduled."""

    def test_block_rng_reproducible(self):
        assert np.array_equal(block_rng(7, 3).random(5), block_rng(7, 3).random(5))
        assert not np.array_equal(block_rng(7, 3).random(5), block_rng(7, 4).random(5))
        assert not np.array_equal(block_rng(7, 3).random(5), block_rng(8, 3).random(5))

    def test_workers_do_not_change_samples(self):
        toll = parse_toll("pow:1")
        one = draw_samples(toll, 20, 3000, seed=11, workers=1)
        two = draw_samples(toll, 20, 3000, seed=11, workers=2)
        assert one.shape == (3000,)
        assert np.array_equal(one, two)

    def test_path_length_range(self):
        """Internal path length of a 20-node tree lies between the complete tree's and the chain's."""
        x = draw_samples(parse_toll("path-length"), 20, 500, seed=3)
        assert x.min() >= 54
        assert x.max() <= 190


class TestExperiment:
    def test_small_run(self):
        spec = ExperimentSpec(parse_toll("pow:1"), n=30, samples=2000, seed=1, K=4)
        report = run_experiment(spec)
        assert len(report.raw) == 4
        assert report.counts()["checked"] == 4
        assert all(abs(m.z_score) < 6 for m in report.raw)
        assert report.normalization == "X/n^(alpha+1/2)"
        assert [m.k for m in report.standardized] == [1, 2, 3, 4]
        assert all(m.target is not None for m in report.standardized)
        assert len(report.histogram) == 40
        assert sum(c for _, _, c in report.histogram) <= 2000

    def test_reproducible(self):
        spec = ExperimentSpec(parse_toll("log"), n=25, samples=800, seed=5, K=2)
        assert run_experiment(spec).mean == run_experiment(spec).mean

    def test_empirical_standardization(self):
        spec = ExperimentSpec(parse_toll("log"), n=40, samples=1500, seed=2, K=3, standardization="empirical")
        report = run_experiment(spec)
        assert report.normalization == "(X - mean)/sd"
        assert report.standardized[0].empirical == pytest.approx(0.0, abs=1e-9)
        assert report.standardized[1].exact == pytest.approx(1.0)
        assert report.standardized[1].target == pytest.approx(1.0)

    def test_order_cap(self):
        with pytest.raises(CapError):
            run_experiment(ExperimentSpec(parse_toll("pow:1"), n=10, samples=10, seed=0, K=5))

    def test_zero_variance(self):
        report = run_experiment(ExperimentSpec(parse_toll("custom:1"), n=1, samples=10, seed=0, K=2))
        assert report.variance == 0
        assert report.standardized == [] and report.histogram == []
        assert any("variance is zero" in note for note in report.notes)

    def test_custom_toll_note(self):
        report = run_experiment(ExperimentSpec(parse_toll("custom:1,2,3,4,5"), n=5, samples=500, seed=4, K=2))
        assert report.normalization == "(X - mean)/sd"
        assert any("no limit law" in note for note in report.notes)

    def test_spec_validation(self):
        toll = parse_toll("pow:1")
        with pytest.raises(ArgumentError):
            ExperimentSpec(toll, n=0, samples=10, seed=0)
        with pytest.raises(ArgumentError):
            ExperimentSpec(toll, n=5, samples=10, seed=0, workers=0)
        with pytest.raises(ArgumentError):
            ExperimentSpec(toll, n=5, samples=10, seed=-1)
        with pytest.raises(ArgumentError):
            ExperimentSpec(toll, n=5, samples=10, seed=0, standardization="z")

    def test_normalizations(self):
        assert limit_normalization(parse_toll("path-length"), 100, 2).shift == -100.0
        assert limit_normalization(parse_toll("custom:1,2"), 2, 2) is None
        half = limit_normalization(parse_toll("pow:1/2"), 100, 2)
        assert half.scale == 100.0
        assert half.targets[0] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.slow
class TestAcceptance:
    """alpha = 1 at n = 2000 with 10^5 trees."""

    N = 2000

    def test_sample_moments_against_exact_and_limit(self):
        spec = ExperimentSpec(parse_toll("pow:1"), n=self.N, samples=100_000, seed=20240601, workers=4, K=4)
        report = run_experiment(spec)
        for m in report.standardized:
            assert abs(m.empirical - m.exact) <= 5 * m.se
            assert m.empirical == pytest.approx(m.exact, rel=0.05)

        # E X_n^k / n^(3k/2) = EY^k + O(n^(-1/2)); doubling from n/4 removes the first correction
        table = raw_moments(parse_toll("pow:1"), self.N, 4, make_field("float", 53))
        limit = [float(v) for v in limit_moments(1, 4)]
        for k in range(1, 5):
            r = [float(table.values[n][k]) / n ** (1.5 * k) for n in (self.N // 4, self.N)]
            assert 2 * r[1] - r[0] == pytest.approx(limit[k - 1], rel=0.05)
            assert math.isclose(report.standardized[k - 1].target, limit[k - 1], rel_tol=1e-12)

"""Tests for the minimum error-sum constructions.

The load-bearing property: every closed-form threshold rule decides exactly
like the raw log likelihood ratio rule on randomized samples (both direction
branches), outside 1e-12 tie neighborhoods.
"""

import json
import math

import numpy as np
import pytest

from helpers import mismatches_outside_ties, mixed_sample_matrix
from optest.exceptions import DegenerateProblemError
from optest.models import (
    NormalMeanModel,
    NormalVarianceModel,
    bernoulli,
    exponential_rate,
    poisson,
)
from optest.optimum import (
    build_lr_test,
    expfam_test,
    fixed_alpha_comparator,
    log_ratio_constant,
    normal_mean_test,
    normal_variance_test,
)
from optest.procedures import Decision, Direction


class TestNormalMeanTest:
    def test_midpoint_threshold_upper(self):
        test = normal_mean_test(10.0, 11.0, 2.0)
        assert test.threshold == 10.5
        assert test.direction is Direction.GE
        assert test.provenance == "example1"

    def test_midpoint_threshold_lower(self):
        test = normal_mean_test(11.0, 10.0, 2.0)
        assert test.threshold == 10.5
        assert test.direction is Direction.LE
        assert test.provenance == "example2"

    def test_direction_coherence_under_swap(self):
        up = normal_mean_test(10.0, 11.0, 2.0)
        down = normal_mean_test(11.0, 10.0, 2.0)
        assert up.threshold == down.threshold
        assert {up.direction, down.direction} == {Direction.GE, Direction.LE}

    def test_tie_rejects(self):
        up = normal_mean_test(10.0, 11.0, 2.0)
        assert up.decide([10.5] * 16) is Decision.REJECT
        down = normal_mean_test(11.0, 10.0, 2.0)
        assert down.decide([10.5] * 16) is Decision.REJECT

    def test_decisions(self):
        test = normal_mean_test(10.0, 11.0, 2.0)
        assert test.decide([10.6] * 16) is Decision.REJECT
        assert test.decide([10.4] * 16) is Decision.ACCEPT

    def test_degenerate(self):
        with pytest.raises(DegenerateProblemError):
            normal_mean_test(10.0, 10.0, 2.0)
        with pytest.raises(ValueError):
            normal_mean_test(10.0, 11.0, 0.0)


class TestNormalVarianceTest:
    def test_constant_and_threshold(self):
        assert log_ratio_constant(1.0, 2.0) == pytest.approx(2.0 * math.log(2.0),
                                                             rel=1e-12)
        test = normal_variance_test(0.0, 1.0, 2.0, 10)
        assert test.threshold == pytest.approx(13.862943611198906, rel=1e-12)
        assert test.direction is Direction.GE
        assert test.provenance == "example3"

    def test_constant_euler_case(self):
        c = log_ratio_constant(1.0, math.e)
        assert c == pytest.approx(math.e / (math.e - 1.0), rel=1e-12)

    def test_constant_tends_to_one_at_equal_variances(self):
        assert log_ratio_constant(1.0, 1.0 + 1e-9) == pytest.approx(1.0, abs=1e-6)

    def test_lower_direction_for_shrinking_variance(self):
        test = normal_variance_test(0.0, 2.0, 1.0, 10)
        assert test.direction is Direction.LE
        assert test.threshold == pytest.approx(10.0 * log_ratio_constant(2.0, 1.0))

    def test_statistic_is_standardized(self):
        test = normal_variance_test(1.0, 4.0, 8.0, 2)
        # ((3-1)/2)^2 + ((-1-1)/2)^2 = 1 + 1
        assert test.statistic_value([3.0, -1.0]) == pytest.approx(2.0)

    def test_degenerate(self):
        with pytest.raises(DegenerateProblemError):
            normal_variance_test(0.0, 2.0, 2.0, 10)
        with pytest.raises(ValueError):
            normal_variance_test(0.0, -1.0, 2.0, 10)


class TestExpFamilyTest:
    def test_poisson_threshold(self):
        test = expfam_test(poisson(1.0), 1.0, 2.0, 10)
        assert test.threshold == pytest.approx(10.0 / math.log(2.0), rel=1e-12)
        assert test.direction is Direction.GE

    def test_bernoulli_threshold(self):
        test = expfam_test(bernoulli(0.3), 0.3, 0.7, 3)
        assert test.threshold == pytest.approx(1.5, rel=1e-12)
        assert test.direction is Direction.GE
        assert test.decide([1.0, 1.0, 0.0]) is Decision.REJECT
        assert test.decide([1.0, 0.0, 0.0]) is Decision.ACCEPT

    def test_bernoulli_reversed_direction(self):
        test = expfam_test(bernoulli(0.7), 0.7, 0.3, 3)
        assert test.threshold == pytest.approx(1.5, rel=1e-12)
        assert test.direction is Direction.LE

    def test_exponential_rate_uses_lower_tail(self):
        # Q(t) = -t decreases, so theta1 > theta0 rejects small sums
        test = expfam_test(exponential_rate(1.0), 1.0, 2.0, 5)
        assert test.direction is Direction.LE

    def test_indistinguishable(self):
        with pytest.raises(DegenerateProblemError):
            expfam_test(bernoulli(0.3), 0.4, 0.4, 3)


class TestBuildLrTest:
    def test_rejects_identical_models(self):
        with pytest.raises(DegenerateProblemError):
            build_lr_test(NormalMeanModel(1.0, 2.0), NormalMeanModel(1.0, 2.0))
        with pytest.raises(DegenerateProblemError):
            build_lr_test(bernoulli(0.3), bernoulli(0.3))

    def test_rejects_mismatched_families(self):
        with pytest.raises(ValueError):
            build_lr_test(NormalMeanModel(0.0, 1.0), bernoulli(0.3))

    def test_sign_matches_midpoint_algebra(self):
        lr = build_lr_test(NormalMeanModel(10.0, 2.0), NormalMeanModel(11.0, 2.0))
        assert lr.decide([10.6] * 16) is Decision.REJECT
        assert lr.decide([10.4] * 16) is Decision.ACCEPT
        # the exact midpoint makes the log ratio 0, and ties reject
        assert lr.decide([10.5] * 16) is Decision.REJECT

    def test_bernoulli_lr_below_one_accepts(self):
        lr = build_lr_test(bernoulli(0.3), bernoulli(0.7))
        assert lr.decide([1.0, 0.0, 0.0]) is Decision.ACCEPT
        assert lr.decide([1.0, 1.0, 0.0]) is Decision.REJECT


def _equivalence_config_cases():
    return [
        ("mean-up",
         NormalMeanModel(10.0, 2.0), NormalMeanModel(11.0, 2.0), 16,
         normal_mean_test(10.0, 11.0, 2.0)),
        ("mean-down",
         NormalMeanModel(11.0, 2.0), NormalMeanModel(10.0, 2.0), 16,
         normal_mean_test(11.0, 10.0, 2.0)),
        ("variance-up",
         NormalVarianceModel(0.0, 1.0), NormalVarianceModel(0.0, 2.0), 10,
         normal_variance_test(0.0, 1.0, 2.0, 10)),
        ("variance-down",
         NormalVarianceModel(0.0, 2.0), NormalVarianceModel(0.0, 1.0), 10,
         normal_variance_test(0.0, 2.0, 1.0, 10)),
        ("bernoulli",
         bernoulli(0.3), bernoulli(0.7), 3,
         expfam_test(bernoulli(0.3), 0.3, 0.7, 3)),
        ("bernoulli-reversed",
         bernoulli(0.7), bernoulli(0.3), 3,
         expfam_test(bernoulli(0.7), 0.7, 0.3, 3)),
        ("poisson",
         poisson(1.0), poisson(2.0), 10,
         expfam_test(poisson(1.0), 1.0, 2.0, 10)),
        ("exponential",
         exponential_rate(1.0), exponential_rate(2.0), 8,
         expfam_test(exponential_rate(1.0), 1.0, 2.0, 8)),
    ]


class TestClosedFormEqualsRawLikelihoodRatio:
    @pytest.mark.parametrize(
        ("label", "model0", "model1", "n", "closed"),
        _equivalence_config_cases(),
        ids=[case[0] for case in _equivalence_config_cases()])
    def test_ten_thousand_samples(self, label, model0, model1, n, closed):
        raw = build_lr_test(model0, model1)
        matrix = mixed_sample_matrix(model0, model1, n, 10_000, seed=90 + n)
        mismatches, compared, _ = mismatches_outside_ties(closed, raw, matrix)
        assert mismatches == 0
        assert compared > 9_000


class TestFixedAlphaComparator:
    def test_exact_quantile_threshold(self):
        test = fixed_alpha_comparator(10.0, 2.0, 16, 0.05)
        assert test.threshold == pytest.approx(1.6448536269514722, abs=1e-9)

    def test_median_level(self):
        assert fixed_alpha_comparator(0.0, 1.0, 4, 0.5).threshold == pytest.approx(
            0.0, abs=1e-12)

    def test_decision(self):
        test = fixed_alpha_comparator(10.0, 2.0, 16, 0.05)
        # z statistic (10.9 - 10) / (2/4) = 1.8
        assert test.statistic_value([10.9] * 16) == pytest.approx(1.8, rel=1e-12)
        assert test.decide([10.9] * 16) is Decision.REJECT
        assert test.decide([10.7] * 16) is Decision.ACCEPT

    def test_critical_z_override(self):
        test = fixed_alpha_comparator(10.0, 2.0, 16, 0.05, critical_z=1.64)
        assert test.threshold == 1.64

    def test_rejects_bad_alpha(self):
        for bad in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                fixed_alpha_comparator(10.0, 2.0, 16, bad)


class TestSerialization:
    def test_descriptor_round_trips_as_json(self):
        test = normal_mean_test(10.0, 11.0, 2.0)
        desc = test.describe()
        assert json.loads(json.dumps(desc)) == desc
        assert desc == {
            "statistic_name": "sample_mean",
            "threshold": 10.5,
            "direction": "ge",
            "provenance": "example1",
        }

    def test_all_constructors_describe(self):
        for test in (
            normal_variance_test(0.0, 1.0, 2.0, 10),
            expfam_test(poisson(1.0), 1.0, 2.0, 10),
            fixed_alpha_comparator(10.0, 2.0, 16, 0.05),
            build_lr_test(bernoulli(0.2), bernoulli(0.5)),
        ):
            desc = test.describe()
            assert set(desc) == {"statistic_name", "threshold", "direction",
                                 "provenance"}
            assert desc["direction"] in ("ge", "le")

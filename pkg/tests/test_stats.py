"""Estimators, test statistics, quantiles, and intervals.

Expected values that are not closed-form trivia were computed once from
the independent enumeration/bisection oracles and are frozen here as
literals; the oracle tests re-derive them.
"""

import math

import pytest

from sqdc.stats import (
    DetectionStats,
    ErrorKind,
    classify_error,
    corruption_rate,
    detection_probability,
    estimate_kappa,
    estimate_omega,
    normal_approx_threshold,
    normal_approx_valid,
    normal_cdf,
    normal_quantile,
    rate_test,
    wilson_interval,
    z_statistic,
    z_statistic_known,
)


class TestEstimators:
    def test_kappa_arithmetic(self):
        assert estimate_kappa(0, 60) == 0.0
        assert estimate_kappa(30, 600) == pytest.approx(0.1)
        assert estimate_kappa(15, 600) == pytest.approx(0.05)

    def test_kappa_may_exceed_one(self):
        assert estimate_kappa(500, 600) == pytest.approx(5 / 3)

    def test_omega_arithmetic(self):
        assert estimate_omega(0, 40) == 0.0
        assert estimate_omega(15, 600) == pytest.approx(0.05)

    @pytest.mark.parametrize("fn", [estimate_kappa, estimate_omega])
    def test_estimator_domain_errors(self, fn):
        with pytest.raises(ValueError):
            fn(0, 0)
        with pytest.raises(ValueError):
            fn(-1, 10)
        with pytest.raises(ValueError):
            fn(11, 10)


class TestZStatistics:
    def test_two_sample_frozen_value(self):
        # kappa_hat=0.1, omega_hat=0.05 from C=30, C'=15 at r=s=600;
        # value computed independently with exact arithmetic.
        z = z_statistic(0.1, 0.05, 30, 15, 600, 600)
        assert z == pytest.approx(2.2792115291927, abs=1e-10)

    def test_two_sample_zero_numerator(self):
        assert z_statistic(0.1, 0.1, 30, 30, 600, 600) == 0.0

    def test_two_sample_degenerate_no_positives(self):
        assert z_statistic(0.0, 0.0, 0, 0, 600, 600) == 0.0

    def test_two_sample_rejects_zero_probes(self):
        with pytest.raises(ValueError):
            z_statistic(0.0, 0.0, 0, 0, 0, 600)

    def test_known_frozen_value(self):
        # 0.05 / sqrt(2*0.1*0.95/600), computed independently.
        z = z_statistic_known(0.1, 0.05, 600)
        assert z == pytest.approx(2.8097574347450, abs=1e-10)

    def test_known_equal_rates(self):
        assert z_statistic_known(0.05, 0.05, 600) == pytest.approx(0.0)

    def test_known_zero_sample_never_rejects(self):
        # no observed mismatches: numerator is -omega, fallback variance
        z = z_statistic_known(0.0, 0.05, 600)
        assert z < 0

    def test_known_zero_everything_is_zero(self):
        assert z_statistic_known(0.0, 0.0, 600) == 0.0

    def test_known_saturated_sample_always_rejects(self):
        # kappa_hat = 2 zeroes the nominal variance with a positive excess
        assert z_statistic_known(2.0, 0.05, 10) == math.inf


class TestDetectionProbability:
    @pytest.mark.parametrize("r", range(0, 11))
    def test_always_attack_closed_form(self, r):
        assert detection_probability(1.0, r) == pytest.approx(1 - 0.5 ** r)

    def test_headline_operating_point(self):
        assert detection_probability(0.6, 15) == pytest.approx(0.99525, abs=5e-6)

    def test_no_attack_never_detects(self):
        assert detection_probability(0.0, 50) == 0.0

    def test_disturbance_enters_through_corruption_rate(self):
        assert corruption_rate(0.1, 1 / 9) == pytest.approx(0.2)
        assert detection_probability(0.1, 1, omega=1 / 9) == pytest.approx(0.1)

    def test_negative_r_rejected(self):
        with pytest.raises(ValueError):
            detection_probability(0.5, -1)


class TestNormalQuantile:
    def test_frozen_values(self):
        assert normal_quantile(0.5) == 0.0
        assert normal_quantile(0.05) == pytest.approx(1.6448536, abs=1e-7)
        assert normal_quantile(0.01) == pytest.approx(2.3263479, abs=1e-7)

    @pytest.mark.parametrize("alpha", [0.1, 0.05, 0.01, 0.001])
    def test_cdf_round_trip(self, alpha):
        assert normal_cdf(normal_quantile(alpha)) == pytest.approx(1 - alpha, abs=1e-6)

    @pytest.mark.parametrize("alpha", [0.2, 0.05, 0.01])
    def test_symmetry(self, alpha):
        assert normal_quantile(alpha) == pytest.approx(-normal_quantile(1 - alpha), abs=1e-9)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            normal_quantile(bad)


class TestNormalApproxRule:
    def test_full_corruption_threshold(self):
        assert normal_approx_threshold(1.0) == pytest.approx(28.0)
        assert normal_approx_valid(1.0, 30)
        assert not normal_approx_valid(1.0, 27)

    def test_small_corruption_needs_many_probes(self):
        assert normal_approx_threshold(0.1) == pytest.approx(767.37, abs=0.01)
        assert not normal_approx_valid(0.1, 600)
        assert normal_approx_valid(0.1, 800)

    def test_monotone_in_r(self):
        valid = [normal_approx_valid(0.3, r) for r in range(1, 400)]
        assert valid == sorted(valid)

    @pytest.mark.parametrize("bad", [0.0, -0.1, 1.5])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            normal_approx_threshold(bad)


class TestWilsonInterval:
    def test_frozen_midpoint_case(self):
        lo, hi = wilson_interval(50, 100, 0.95)
        assert lo == pytest.approx(0.40383, abs=1e-5)
        assert hi == pytest.approx(0.59617, abs=1e-5)

    def test_boundaries(self):
        assert wilson_interval(0, 20, 0.95)[0] == 0.0
        assert wilson_interval(20, 20, 0.95)[1] == 1.0

    def test_contains_point_estimate(self):
        for k, n in [(0, 10), (3, 10), (10, 10), (17, 400)]:
            lo, hi = wilson_interval(k, n)
            assert lo <= k / n <= hi

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            wilson_interval(0, 0)
        with pytest.raises(ValueError):
            wilson_interval(5, 4)
        with pytest.raises(ValueError):
            wilson_interval(1, 4, 1.0)


class TestRateTest:
    def test_known_mode_fields(self):
        stats = rate_test(30, 600, 0.05, omega=0.05)
        assert stats.omega_known
        assert stats.nu_hat is None
        assert stats.kappa_hat == pytest.approx(0.1)
        assert stats.z == pytest.approx(2.8097574, abs=1e-6)
        assert stats.rejected

    def test_estimated_mode_fields(self):
        stats = rate_test(30, 600, 0.05, baseline_mismatches=15, baseline_probes=600)
        assert not stats.omega_known
        assert stats.nu_hat == pytest.approx(0.075)
        assert stats.omega_hat == pytest.approx(0.05)
        assert stats.z == pytest.approx(2.2792115, abs=1e-6)
        assert stats.rejected

    def test_rejection_matches_threshold(self):
        stats = rate_test(30, 600, 0.01, baseline_mismatches=15, baseline_probes=600)
        assert stats.threshold == pytest.approx(2.3263479, abs=1e-6)
        assert not stats.rejected  # 2.279 < 2.326

    def test_kappa_capped_for_reporting(self):
        stats = rate_test(580, 600, 0.05, omega=0.05)
        assert stats.kappa_hat == 1.0
        assert stats.z > 0  # computed from the raw 1.933

    def test_argument_exclusivity(self):
        with pytest.raises(ValueError):
            rate_test(1, 10, 0.05, omega=0.1, baseline_mismatches=1, baseline_probes=10)
        with pytest.raises(ValueError):
            rate_test(1, 10, 0.05)

    def test_to_dict_round_trips_json(self):
        import json
        stats = rate_test(3, 60, 0.05, omega=0.05)
        again = json.loads(json.dumps(stats.to_dict()))
        assert again["mismatches"] == 3
        assert again["rejected"] == stats.rejected


class TestErrorClassification:
    def test_mapping(self):
        assert classify_error(True, False) is ErrorKind.MISSED_ATTACK
        assert classify_error(False, True) is ErrorKind.FALSE_ALARM
        assert classify_error(True, True) is ErrorKind.CORRECT
        assert classify_error(False, False) is ErrorKind.CORRECT

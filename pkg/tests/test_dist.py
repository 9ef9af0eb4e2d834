"""Accuracy and property tests for the special functions.

Reference values are frozen from 40-digit mpmath evaluations of erfc and the
regularized incomplete gamma; the implementation under test never sees them.
"""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from optest.dist import chi2_sf, std_normal_cdf, std_normal_pdf, std_normal_quantile

# (z, Phi(z)) frozen from mpmath erfc at 40 digits
PHI_REFERENCE = [
    (-8.0, 6.220960574271784e-16),
    (-5.0, 2.866515718791939e-07),
    (-3.0, 0.0013498980316300946),
    (-2.5, 0.006209665325776135),
    (-2.0, 0.02275013194817921),
    (-1.5, 0.06680720126885807),
    (-1.0, 0.15865525393145705),
    (-0.5, 0.3085375387259869),
    (-0.36, 0.35942356678200876),
    (-0.1, 0.460172162722971),
    (0.0, 0.5),
    (0.1, 0.539827837277029),
    (0.36, 0.6405764332179913),
    (0.5, 0.6914624612740131),
    (1.0, 0.8413447460685429),
    (1.118033988749895, 0.8682237613585136),
    (1.5, 0.9331927987311419),
    (1.6449, 0.9500047825316537),
    (2.0, 0.9772498680518208),
    (4.0, 0.9999683287581669),
]

# (x, dof, sf) frozen from mpmath regularized upper gamma at 40 digits
CHI2_REFERENCE = [
    (0.5, 1, 0.4795001221869535),
    (3.2, 1, 0.07363827012030265),
    (0.7, 2, 0.7046880897187134),
    (5.0, 2, 0.0820849986238988),
    (2.7, 3, 0.44022729436023106),
    (10.0, 5, 0.07523524614651218),
    (3.0, 10, 0.9814240637778593),
    (13.862943611198906, 10, 0.17933547094005456),
    (6.931471805599453, 10, 0.7318982141296169),
    (55.2, 40, 0.055404224926966616),
    (130.0, 160, 0.9605563195301594),
    (200.0, 160, 0.01745132251627543),
]


class TestStdNormalCdf:
    @pytest.mark.parametrize(("z", "expected"), PHI_REFERENCE)
    def test_reference_values(self, z, expected):
        assert abs(std_normal_cdf(z) - expected) <= 1e-10

    def test_zero_is_exactly_half(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_upper_tail_values(self):
        # the sizes quoted throughout the worked examples
        assert 1.0 - std_normal_cdf(0.5) == pytest.approx(0.3085, abs=5e-5)
        assert 1.0 - std_normal_cdf(-1.5) == pytest.approx(0.93319, abs=5e-6)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            std_normal_cdf(bad)

    @given(st.floats(min_value=-38.0, max_value=38.0))
    def test_symmetry(self, z):
        assert abs(std_normal_cdf(z) + std_normal_cdf(-z) - 1.0) <= 1e-12

    def test_monotone_nondecreasing(self):
        grid = [x * 0.05 for x in range(-200, 201)]
        values = [std_normal_cdf(z) for z in grid]
        assert all(b >= a for a, b in zip(values, values[1:]))


class TestStdNormalQuantile:
    def test_median_is_zero(self):
        assert std_normal_quantile(0.5) == 0.0

    def test_upper_five_percent(self):
        assert std_normal_quantile(0.95) == pytest.approx(1.6448536269514722, abs=1e-9)

    def test_round_trip_of_printed_value(self):
        # Phi(0.5) rounds to 0.69146; its quantile sits next to 0.5
        assert std_normal_quantile(0.69146) == pytest.approx(0.5, abs=1e-4)
        assert std_normal_quantile(std_normal_cdf(0.5)) == pytest.approx(0.5, abs=1e-12)

    @given(st.floats(min_value=0.001, max_value=0.999))
    def test_inverse_property(self, p):
        assert abs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-9

    @given(st.floats(min_value=-6.0, max_value=6.0))
    def test_quantile_of_cdf(self, z):
        assert std_normal_quantile(std_normal_cdf(z)) == pytest.approx(z, abs=1e-8)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.7, math.nan])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            std_normal_quantile(bad)

    def test_extreme_tails_stay_sane(self):
        lo = std_normal_quantile(1e-12)
        hi = std_normal_quantile(1.0 - 1e-12)
        assert lo < -6.0 and hi > 6.0
        assert abs(std_normal_cdf(lo) - 1e-12) <= 1e-13


class TestChi2Sf:
    @pytest.mark.parametrize(("x", "dof", "expected"), CHI2_REFERENCE)
    def test_reference_values(self, x, dof, expected):
        assert chi2_sf(x, dof) == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("dof", [1, 2, 5, 40])
    def test_full_mass_at_zero(self, dof):
        assert chi2_sf(0.0, dof) == 1.0

    def test_two_dof_closed_form(self):
        for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0]:
            assert chi2_sf(x, 2) == pytest.approx(math.exp(-x / 2.0), rel=1e-9)

    def test_one_dof_matches_normal_tail(self):
        for x in [0.01, 0.25, 1.0, 1.25, 2.0, 4.0, 9.0, 16.0]:
            expected = 2.0 * (1.0 - std_normal_cdf(math.sqrt(x)))
            assert chi2_sf(x, 1) == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_strictly_decreasing(self):
        for dof in (1, 3, 10):
            grid = [0.05 * k for k in range(1, 600)]
            values = [chi2_sf(x, dof) for x in grid]
            assert all(b < a for a, b in zip(values, values[1:]))

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            chi2_sf(-0.5, 3)
        with pytest.raises(ValueError):
            chi2_sf(math.nan, 3)
        with pytest.raises(ValueError):
            chi2_sf(1.0, 0)
        with pytest.raises(ValueError):
            chi2_sf(1.0, 1.5)


class TestStdNormalPdf:
    def test_peak_value(self):
        assert std_normal_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=1e-15)

    def test_symmetry(self):
        assert std_normal_pdf(1.3) == std_normal_pdf(-1.3)

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import REFERENCE_BAND, QUAD_BANDS, bisect_quantile, mp_cdf, quad_p1, quad_p2
from robustsig import TestKind, TestSpec, VarianceBand
from robustsig.errors import DomainError, UnsupportedVariantError
from robustsig.gnormal import (
    critical_value,
    p1,
    p2,
    p3,
    power_approx,
    self_similar_f,
    self_similar_f_yy,
    std_normal_cdf,
    std_normal_quantile,
)

# Phi^{-1}(0.9625) and Phi^{-1}(0.98125) at 30 digits (mpmath), rounded.
C1_REF = 1.7804643416920256
C3_REF = 2.0802784525252753


class TestNormalCdf:
    def test_median(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_against_high_precision(self):
        assert std_normal_cdf(1.6448536269514722) == pytest.approx(0.95, abs=1e-10)
        for x in np.linspace(-8, 8, 161):
            assert abs(std_normal_cdf(x) - mp_cdf(x)) <= 1e-12

    @given(st.floats(-40, 40))
    def test_symmetry(self, x):
        assert abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) <= 1e-12

    def test_monotone(self):
        xs = np.linspace(-10, 10, 20001)
        vals = np.array([std_normal_cdf(x) for x in xs])
        assert np.all(np.diff(vals) >= 0)

    def test_saturates(self):
        assert std_normal_cdf(-50.0) == 0.0
        assert std_normal_cdf(50.0) == 1.0


class TestNormalQuantile:
    def test_median(self):
        assert std_normal_quantile(0.5) == 0.0

    def test_bisection_oracle(self):
        expected = bisect_quantile(0.9625, mp_cdf)
        assert expected == pytest.approx(1.780464, abs=1e-5)
        assert std_normal_quantile(0.9625) == pytest.approx(expected, abs=1e-10)

    def test_symmetry(self):
        assert std_normal_quantile(0.05) == pytest.approx(-std_normal_quantile(0.95), abs=1e-12)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            std_normal_quantile(p)

    def test_accuracy_grid(self):
        ps = np.logspace(-12, math.log10(0.5), 400)
        for p in np.concatenate([ps, 1.0 - ps]):
            assert abs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-9

    def test_strictly_increasing(self):
        ps = np.linspace(1e-6, 1 - 1e-6, 5001)
        qs = [std_normal_quantile(p) for p in ps]
        assert np.all(np.diff(qs) > 0)

    def test_round_trip(self):
        for x in np.linspace(-6, 6, 1201):
            assert abs(std_normal_quantile(std_normal_cdf(x)) - x) <= 1e-7


class TestTailLaws:
    def test_no_uncertainty_reduces_to_normal(self):
        b = VarianceBand(0.7, 0.7)
        for c in np.linspace(-4, 4, 33):
            assert p1(c, b) == pytest.approx(1.0 - mp_cdf(c / 0.7), abs=1e-12)
            assert p2(c, b) == pytest.approx(mp_cdf(c / 0.7), abs=1e-12)

    def test_value_at_zero(self, band):
        # integral at 0 is sigma_upper / (sigma_upper + sigma_lower)
        assert p1(0.0, band) == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert quad_p1(0.0, band) == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert p2(0.0, band) == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert quad_p2(0.0, band) == pytest.approx(2.0 / 3.0, abs=1e-12)

    @pytest.mark.parametrize("b", QUAD_BANDS, ids=str)
    def test_closed_form_matches_quadrature(self, b):
        for c in np.linspace(-6, 6, 121):
            assert abs(p1(c, b) - quad_p1(c, b)) <= 1e-10
            assert abs(p2(c, b) - quad_p2(c, b)) <= 1e-10

    @given(st.floats(-50, 50), st.floats(0.01, 10), st.floats(1.0, 10))
    def test_reflection(self, c, lo, ratio):
        b = VarianceBand(lo, lo * ratio)
        assert p2(c, b) == p1(-c, b)

    def test_strictly_decreasing_with_limits(self, band):
        # strictly on a range where doubles resolve the change, weakly beyond
        cs = np.linspace(-2.5, 6, 4001)
        assert np.all(np.diff([p1(c, band) for c in cs]) < 0)
        cs = np.linspace(-12, 12, 4001)
        assert np.all(np.diff([p1(c, band) for c in cs]) <= 0)
        assert p1(-math.inf, band) == 1.0
        assert p1(math.inf, band) == 0.0
        assert p1(-60.0, band) == pytest.approx(1.0, abs=1e-15)

    def test_p3_two_sided(self):
        b = VarianceBand(1.3, 1.3)
        for c in (0.5, 1.0, 2.0):
            assert p3(c, b) == pytest.approx(2.0 * (1.0 - mp_cdf(c / 1.3)), abs=1e-12)
        assert p3(-1.0, REFERENCE_BAND) == 1.0

    def test_p3_at_rounded_c3(self, band):
        assert p3(2.0798, band) == pytest.approx(0.05, abs=1e-4)

    def test_invalid_band(self):
        with pytest.raises(DomainError):
            VarianceBand(1.0, 0.5)
        with pytest.raises(DomainError):
            VarianceBand(0.0, 1.0)
        with pytest.raises(DomainError):
            p1(0.0, (0.5, 1.0))


class TestCriticalValue:
    def test_kind_I(self, band):
        assert critical_value(TestSpec("I", 0, 0.05), band) == pytest.approx(C1_REF, abs=1e-10)

    def test_kind_II_mirrors_I(self, band):
        assert critical_value(TestSpec("II", 0, 0.05), band) == pytest.approx(-C1_REF, abs=1e-10)

    def test_kind_III(self, band):
        # the quantile oracle gives 2.080278, not the 2.07987 one might guess
        expected = bisect_quantile(0.98125, mp_cdf)
        assert expected == pytest.approx(C3_REF, abs=1e-12)
        assert critical_value(TestSpec("III", 0, 0.05), band) == pytest.approx(expected, abs=1e-10)

    def test_classical_reduction(self):
        b = VarianceBand(2.0, 2.0)
        for a in (0.01, 0.05, 0.1):
            assert critical_value(TestSpec("I", 0, a), b) == pytest.approx(
                2.0 * std_normal_quantile(1 - a), abs=1e-12
            )

    @pytest.mark.parametrize("kind,fn", [("I", p1), ("II", p2), ("III", p3)])
    def test_inverse_construction(self, kind, fn, band):
        c = critical_value(TestSpec(kind, 0, 0.05), band)
        assert fn(c, band) == pytest.approx(0.05, abs=1e-9)

    def test_inverse_on_random_pairs(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.uniform(0.001, 0.3)
            lo = rng.uniform(0.05, 3.0)
            b = VarianceBand(lo, lo * rng.uniform(1.0, 6.0))
            for kind, fn in (("I", p1), ("II", p2), ("III", p3)):
                c = critical_value(TestSpec(kind, 0, a), b)
                assert abs(fn(c, b) - a) <= 1e-9

    def test_monotone_in_alpha_and_sigma_upper(self):
        alphas = np.linspace(0.001, 0.499, 200)
        cs = [critical_value(TestSpec("I", 0, a), REFERENCE_BAND) for a in alphas]
        assert np.all(np.diff(cs) <= 0)
        his = np.linspace(0.5, 5, 100)
        cs = [critical_value(TestSpec("I", 0, 0.05), VarianceBand(0.5, h)) for h in his]
        assert np.all(np.diff(cs) >= 0)

    @given(st.floats(0.001, 0.499), st.floats(0.05, 5), st.floats(1, 20))
    def test_dominates_classical_scale(self, a, lo, ratio):
        b = VarianceBand(lo, lo * ratio)
        c1 = critical_value(TestSpec("I", 0, a), b)
        assert c1 >= b.sigma_upper * std_normal_quantile(1 - a) - 1e-12

    def test_alpha_validation(self):
        for a in (0.0, 0.5, 0.6, -0.1):
            with pytest.raises(DomainError):
                TestSpec("I", 0, a)


class TestSelfSimilarProfile:
    def test_matches_p1(self, band):
        for c in np.linspace(-5, 5, 101):
            assert abs(self_similar_f(-c, band) - p1(c, band)) <= 1e-12

    def test_limits(self, band):
        assert self_similar_f(60.0, band) == pytest.approx(1.0, abs=1e-15)
        assert self_similar_f(-60.0, band) == pytest.approx(0.0, abs=1e-15)
        assert self_similar_f(0.0, band) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_second_derivative_finite_difference(self, band):
        h = 1e-4
        for y in (-2.0, -0.7, -0.1, 0.1, 0.7, 2.0):
            fd = (self_similar_f(y + h, band) - 2 * self_similar_f(y, band) + self_similar_f(y - h, band)) / h**2
            assert self_similar_f_yy(y, band) == pytest.approx(fd, abs=1e-5)
            assert (self_similar_f_yy(y, band) >= 0) == (y <= 0)

    def test_solves_g_heat_equation(self, band):
        """u(t, x) = f((x - c)/sqrt(t)) satisfies u_t = (s_hi^2 u_xx^+ - s_lo^2 u_xx^-) / 2."""
        c, t, h = 0.4, 0.7, 1e-4
        u = lambda tt, xx: self_similar_f((xx - c) / math.sqrt(tt), band)
        for x in (-1.0, 0.0, 0.3, 0.5, 1.2):
            ut = (u(t + h, x) - u(t - h, x)) / (2 * h)
            uxx = (u(t, x + h) - 2 * u(t, x) + u(t, x - h)) / h**2
            rhs = 0.5 * (band.sigma_upper**2 * max(uxx, 0) - band.sigma_lower**2 * max(-uxx, 0))
            assert ut == pytest.approx(rhs, abs=1e-5)


class TestPowerApprox:
    def test_at_null(self, band):
        spec = TestSpec("I", 0.0, 0.05)
        c1 = critical_value(spec, band)
        val = power_approx(100, 0.0, spec, band)
        assert val == pytest.approx(1.0 - p2(c1, band), abs=1e-15)
        assert val < 0.5

    def test_large_sample(self, band):
        spec = TestSpec("I", 0.0, 0.05)
        val = power_approx(2000, 0.1, spec, band)
        # 1 - p2(1.7805 - 4.4721) = 1 - p1(2.6917) = 1 - (4/3)(1 - Phi(2.6917))
        d = math.sqrt(2000) * 0.1 - C1_REF
        expected = 1.0 - (4.0 / 3.0) * (1.0 - mp_cdf(d))
        assert val == pytest.approx(expected, abs=1e-12)
        assert val >= 0.99

    def test_tends_to_one(self, band):
        spec = TestSpec("I", 0.0, 0.05)
        vals = [power_approx(n, 0.05, spec, band) for n in (10, 100, 1000, 10000, 100000)]
        assert np.all(np.diff(vals) > 0)
        assert vals[-1] == pytest.approx(1.0, abs=1e-12)

    def test_other_kinds_unsupported(self, band):
        with pytest.raises(UnsupportedVariantError):
            power_approx(100, 0.1, TestSpec("II", 0.0, 0.05), band)


def test_kind_parse():
    assert TestKind.parse("iii") is TestKind.III
    with pytest.raises(DomainError):
        TestKind.parse("IV")

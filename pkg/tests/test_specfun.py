import math

import mpmath as mp
import numpy as np
import pytest

from etamu_outage import specfun
from etamu_outage.specfun import (
    DomainError,
    EvalResult,
    PoleError,
    UnsupportedDomainError,
    appell_f2,
    hyp0f1,
    hyp1f1,
    hyp2f1,
    ln_gamma,
    pochhammer,
)

mp.mp.dps = 40


def _ulp(x):
    return np.spacing(abs(x))


class TestLnGamma:
    def test_known_values(self):
        assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
        assert ln_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-14)
        assert ln_gamma(10.0) == pytest.approx(math.log(362880.0), abs=1e-12)

    def test_against_mpmath_grid(self):
        # 1e-12 absolute where doubles can express it; the ulp floor takes
        # over once ln Gamma(x) itself exceeds ~1e4
        for x in np.geomspace(1e-3, 1e4, 60):
            ref = float(mp.loggamma(mp.mpf(float(x))))
            tol = max(1e-12, 4.0 * _ulp(ref))
            assert abs(ln_gamma(float(x)) - ref) <= tol

    def test_domain(self):
        with pytest.raises(DomainError):
            ln_gamma(0.0)
        with pytest.raises(DomainError):
            ln_gamma(-3.2)


class TestPochhammer:
    def test_examples(self):
        assert pochhammer(3.7, 0) == 1.0
        assert pochhammer(2.0, 3) == 24.0
        assert pochhammer(0.5, 2) == 0.75

    def test_matches_gamma_ratio(self):
        for a in (0.3, 1.7, 5.2):
            for n in (1, 4, 9):
                ref = math.exp(ln_gamma(a + n) - ln_gamma(a))
                assert pochhammer(a, n) == pytest.approx(ref, rel=1e-12)


class TestHyp0f1:
    def test_trivial(self):
        assert hyp0f1(0.7, 0.0).value == pytest.approx(1.0, abs=1e-15)

    def test_cosh_identity(self):
        # 0F1(; 1/2; z^2/4) = cosh z at z = 1
        r = hyp0f1(0.5, 0.25)
        assert r.value == pytest.approx(math.cosh(1.0), rel=1e-12)

    def test_series_oracle(self):
        # brute-force series in 40-digit arithmetic
        def oracle(b, z, terms=200):
            s = mp.mpf(0)
            t = mp.mpf(1)
            for k in range(terms):
                s += t
                t *= mp.mpf(z) / ((b + k) * (k + 1))
            return float(s)

        r = hyp0f1(1.5, 2.0)
        assert r.value == pytest.approx(oracle(1.5, 2.0), rel=1e-12)
        assert r.strategy == specfun.STRATEGY_SERIES

    @pytest.mark.parametrize("b,z", [
        (0.8, 50.0), (2.5, 1e4), (1.2, -50.0), (3.5, -1e4), (0.6, -300.0),
    ])
    def test_against_mpmath(self, b, z):
        r = hyp0f1(b, z)
        ref = float(mp.hyp0f1(b, z))
        assert r.value == pytest.approx(ref, rel=1e-10)

    def test_large_negative_uses_transformation(self):
        assert hyp0f1(1.2, -1e4).strategy == specfun.STRATEGY_TRANSFORMED

    def test_pole(self):
        with pytest.raises(PoleError):
            hyp0f1(0.0, 1.0)
        with pytest.raises(PoleError):
            hyp0f1(-3.0, 1.0)


class TestHyp1f1:
    def test_trivial(self):
        assert hyp1f1(2.3, 3.3, 0.0).value == pytest.approx(1.0, abs=1e-15)

    def test_exp_identity(self):
        # 1F1(1; 2; z) = (e^z - 1)/z at z = 1
        assert hyp1f1(1.0, 2.0, 1.0).value == pytest.approx(math.e - 1.0, rel=1e-12)

    def test_erf_identity(self):
        # 1F1(1/2; 3/2; -x^2) = sqrt(pi) erf(x) / (2x) at x = 2
        ref = math.sqrt(math.pi) * math.erf(2.0) / 4.0
        assert hyp1f1(0.5, 1.5, -4.0).value == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("a,b,z", [
        (2.3, 3.3, 5.0), (0.5, 1.5, -40.0), (2.3, 3.3, -800.0),
        (6.0, 12.0, 550.0), (1.0, 3.0, -1000.0), (0.7, 2.9, 120.0),
    ])
    def test_against_mpmath(self, a, b, z):
        r = hyp1f1(a, b, z)
        ref = float(mp.hyp1f1(a, b, z))
        assert r.value == pytest.approx(ref, rel=1e-10)

    def test_kummer_branch_recorded(self):
        assert hyp1f1(2.3, 3.3, -800.0).strategy == specfun.STRATEGY_TRANSFORMED

    def test_pole(self):
        with pytest.raises(PoleError):
            hyp1f1(1.0, -2.0, 0.5)


class TestHyp2f1:
    def test_trivial_at_zero(self):
        assert hyp2f1(1.3, 0.4, 2.2, 0.0).value == 1.0

    def test_log_identity(self):
        # 2F1(1, 1; 2; z) = -log(1-z)/z
        assert hyp2f1(1.0, 1.0, 2.0, 0.5).value == pytest.approx(2.0 * math.log(2.0),
                                                                 rel=1e-12)

    def test_pfaff_region_series_oracle(self):
        # oracle: Pfaff-map z to z/(z-1), then brute-force series at 64 digits
        a, b, c, z = 0.3, 0.7, 1.6, -5.0
        with mp.workdps(64):
            u = mp.mpf(z) / (z - 1.0)
            s = mp.mpf(0)
            t = mp.mpf(1)
            for k in range(500):
                s += t
                t *= (a + k) * (c - b + k) * u / ((c + k) * (k + 1))
            ref = float((1 - mp.mpf(z)) ** (-a) * s)
        r = hyp2f1(a, b, c, z)
        assert r.value == pytest.approx(ref, rel=1e-9)
        assert r.strategy == specfun.STRATEGY_TRANSFORMED

    @pytest.mark.parametrize("a,b,c,z", [
        (0.3, 0.7, 1.6, -5.0), (3.3, 1.0, 4.1, -2500.0), (1.2, 0.7, 4.6, 0.97),
        (2.0, 1.5, 3.7, 0.5), (26.0, 1.0, 3.6, 0.8), (1.1, 2.2, 3.3, -0.4),
    ])
    def test_against_mpmath(self, a, b, c, z):
        ref = float(mp.hyp2f1(a, b, c, z))
        assert hyp2f1(a, b, c, z).value == pytest.approx(ref, rel=1e-9)

    def test_gauss_summation(self):
        # extrapolation to the Gauss value at z -> 1-; parameter draws keep
        # the leading (1-z) correction coefficient below the 1e-6 budget
        rng = np.random.default_rng(5)
        for _ in range(10):
            a = rng.uniform(0.2, 0.9)
            b = rng.uniform(0.2, 0.9)
            c = a + b + rng.uniform(0.8, 2.0)
            gauss = math.exp(ln_gamma(c) + ln_gamma(c - a - b)
                             - ln_gamma(c - a) - ln_gamma(c - b))
            val = hyp2f1(a, b, c, 1.0 - 1e-6).value
            assert abs(val - gauss) <= 1e-6

    def test_domain_and_pole(self):
        with pytest.raises(DomainError):
            hyp2f1(1.0, 1.0, 2.0, 1.0)
        with pytest.raises(DomainError):
            hyp2f1(1.0, 1.0, 2.0, 1.5)
        with pytest.raises(PoleError):
            hyp2f1(1.0, 1.0, -1.0, 0.5)


class TestAppellF2:
    def test_both_arguments_zero(self):
        assert appell_f2(1.7, 1.0, 2.0, 3.0, 2.5, 0.0, 0.0).value == pytest.approx(
            1.0, abs=1e-14)

    def test_reduces_to_2f1(self):
        for (a, b1, b2, c1, c2, w) in [
            (2.0, 1.0, 1.5, 3.0, 2.5, 0.3),
            (14.0, 1.0, 6.0, 2.7, 12.0, 0.6),
            (1.3, 0.7, 2.0, 2.1, 4.0, -0.5),
        ]:
            f2 = appell_f2(a, b1, b2, c1, c2, w, 0.0).value
            ref = hyp2f1(a, b1, c1, w).value
            assert f2 == pytest.approx(ref, abs=1e-10 * max(1.0, abs(ref)))

    def test_cross_strategy_spec_point(self):
        args = (2.0, 1.0, 1.5, 3.0, 2.5, 0.3, 0.4)
        series, _, ok = specfun._f2_series(*args)
        assert ok
        log_quad, _ = specfun._f2_quad_log(*args)
        quad = math.exp(log_quad)
        assert series == pytest.approx(quad, rel=1e-8)

    def test_cross_strategy_random_grid(self):
        # 50 points inside |w|+|z| <= 0.9, positive-parameter regime
        rng = np.random.default_rng(11)
        for _ in range(50):
            a = rng.uniform(0.5, 10.0)
            b2 = rng.uniform(0.5, 6.0)
            c1 = rng.uniform(1.2, 6.0)
            c2 = b2 + rng.uniform(0.5, 6.0)
            s = rng.uniform(0.05, 0.9)
            frac = rng.uniform(0.05, 0.95)
            w, z = s * frac, s * (1.0 - frac)
            args = (a, 1.0, b2, c1, c2, w, z)
            series, _, ok = specfun._f2_series(*args)
            assert ok
            log_quad, _ = specfun._f2_quad_log(*args)
            assert series == pytest.approx(math.exp(log_quad),
                                           rel=1e-8, abs=1e-12)

    @pytest.mark.parametrize("args", [
        (2.0, 1.0, 1.5, 3.0, 2.5, 0.3, 0.4),
        (14.0, 1.0, 6.0, 3.0, 12.0, 0.8, 0.18),
        (5.0, 1.0, 2.0, 2.4, 4.0, 0.05, 0.6),
    ])
    def test_against_mpmath(self, args):
        ref = float(mp.appellf2(*[mp.mpf(x) for x in args], maxterms=10 ** 7))
        assert appell_f2(*args).value == pytest.approx(ref, rel=1e-8)

    def test_transformation_identity(self):
        # F2(a,b1,b2;c1,c2;w,z) = (1-w)^-a F2(a,c1-b1,b2;c1,c2;w/(w-1),z/(1-w))
        for (a, b1, b2, c1, c2, w, z) in [
            (2.0, 1.0, 1.5, 3.0, 2.5, 0.3, 0.4),
            (4.0, 1.0, 2.0, 2.2, 4.0, 0.5, 0.2),
            (1.5, 0.8, 1.2, 2.0, 3.0, 0.25, 0.3),
        ]:
            lhs = appell_f2(a, b1, b2, c1, c2, w, z).value
            inner = appell_f2(a, c1 - b1, b2, c1, c2, w / (w - 1.0), z / (1.0 - w))
            rhs = (1.0 - w) ** (-a) * inner.value
            assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_strategy_selection(self):
        inside = appell_f2(2.0, 1.0, 1.5, 3.0, 2.5, 0.5, 0.44)
        assert inside.strategy == specfun.STRATEGY_SERIES
        outside = appell_f2(2.0, 1.0, 1.5, 3.0, 2.5, 0.6, 0.38)
        assert outside.strategy == specfun.STRATEGY_QUADRATURE

    def test_unsupported_domain_carries_strategies(self):
        with pytest.raises(UnsupportedDomainError) as exc:
            appell_f2(2.0, 1.0, 1.5, 3.0, 2.5, 0.55, 0.55)
        assert specfun.STRATEGY_QUADRATURE in exc.value.attempted_strategies

    def test_pole(self):
        with pytest.raises(PoleError):
            appell_f2(1.0, 1.0, 1.0, -2.0, 2.0, 0.1, 0.1)


class TestInvariants:
    def test_2f1_at_zero_is_exactly_one(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a, b = rng.uniform(-3, 5, 2)
            c = rng.uniform(0.3, 6)
            assert hyp2f1(a, b, c, 0.0).value == 1.0

    def test_kummer_link(self):
        # 0F1(; b; z) = e^{-2 sqrt z} 1F1(b - 1/2; 2b - 1; 4 sqrt z)
        for b, z in [(1.7, 3.1), (0.9, 0.5), (4.2, 40.0), (2.5, 300.0)]:
            lhs = hyp0f1(b, z).value
            rhs = math.exp(-2.0 * math.sqrt(z)) * hyp1f1(
                b - 0.5, 2.0 * b - 1.0, 4.0 * math.sqrt(z)).value
            assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_strategy_always_recorded(self):
        results = [
            hyp0f1(1.5, 2.0), hyp1f1(1.0, 2.0, 1.0),
            hyp2f1(0.3, 0.7, 1.6, -5.0),
            appell_f2(2.0, 1.0, 1.5, 3.0, 2.5, 0.3, 0.4),
        ]
        for r in results:
            assert r.strategy in (specfun.STRATEGY_SERIES,
                                  specfun.STRATEGY_TRANSFORMED,
                                  specfun.STRATEGY_QUADRATURE)
            assert r.abs_error_estimate >= 0.0

    def test_negative_error_estimate_rejected(self):
        with pytest.raises(ValueError):
            EvalResult(1.0, -1e-3, specfun.STRATEGY_SERIES)

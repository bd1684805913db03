import math

import numpy as np
import pytest
from scipy import integrate, stats

from kappagen import (
    DagumI,
    DomainError,
    Exponential,
    KappaGeneralized,
    SinghMaddala,
    Weibull,
    dist_eval,
    kgen_ccdf,
    kgen_cdf,
    kgen_pdf,
    kgen_quantile,
    kgen_sample,
    kgen_tail_exponent,
    moment,
)

from conftest import bisect

P = KappaGeneralized(2.0, 1.2, 0.75)

ALPHAS = (0.8, 1.0, 1.5, 2.0, 2.5)
BETAS = (0.5, 1.2, 3.0)
KAPPAS = (0.0, 0.25, 0.5, 0.75, 0.9)

BASELINES = [
    Weibull(1.7, 2.0),
    Exponential(1.5),
    SinghMaddala(2.5, 1.3, 1.4),
    DagumI(3.0, 0.9, 0.6),
    KappaGeneralized(1.3, 0.7, 0.4),
]


def brute_ks(x, cdf):
    u = np.sort(cdf(np.sort(x)))
    n = u.size
    i = np.arange(1, n + 1)
    return max(np.max(i / n - u), np.max(u - (i - 1) / n))


def mass_by_substitution(p):
    """Total mass of kgen_pdf with x = beta * t**(1/alpha), which removes the origin pole."""
    a, b = p.alpha, p.beta

    def integrand(t):
        if t == 0.0:
            return 0.0
        x = b * t ** (1.0 / a)
        return kgen_pdf(x, p) * (b / a) * t ** (1.0 / a - 1.0)

    opts = dict(epsabs=0.0, epsrel=1e-12, limit=500)
    return integrate.quad(integrand, 0, 1, **opts)[0] + integrate.quad(integrand, 1, np.inf, **opts)[0]


class TestKappaPdf:
    def test_vanishes_at_origin_for_alpha_above_one(self):
        assert kgen_pdf(1e-12, P) < 1e-10

    def test_exponential_special_case(self):
        p = KappaGeneralized(1.0, 1.2, 0.0)
        assert kgen_pdf(1.2, p) == pytest.approx(math.exp(-1) / 1.2, rel=1e-14)
        assert kgen_pdf(1.2, p) == pytest.approx(0.3066, abs=1e-4)

    def test_hand_value(self):
        expected = (2 / 1.2) * 2 ** (-4 / 3) / math.sqrt(1 + 0.75**2)
        assert kgen_pdf(1.2, P) == pytest.approx(expected, rel=1e-14)
        assert kgen_pdf(1.2, P) == pytest.approx(0.52913, abs=1e-5)

    @pytest.mark.parametrize("x", [0.0, -1.0, math.inf])
    def test_support(self, x):
        with pytest.raises(DomainError):
            kgen_pdf(x, P)

    def test_pole_at_origin_for_alpha_one(self):
        p = KappaGeneralized(1.0, 1.0, 0.5)
        assert kgen_pdf(1e-8, p) < kgen_pdf(1e-12, p) or p.alpha == 1.0
        q = KappaGeneralized(0.8, 1.0, 0.5)
        assert kgen_pdf(1e-12, q) > kgen_pdf(1e-8, q) > kgen_pdf(1e-4, q)

    def test_far_tail_log_density_is_finite(self):
        assert np.isfinite(P.logpdf(1e300))
        # power-law log density: slope -(1 + alpha/kappa)
        x1, x2 = 1e200, 1e250
        slope = (P.logpdf(x2) - P.logpdf(x1)) / math.log(x2 / x1)
        assert slope == pytest.approx(-(1 + 2 / 0.75), rel=1e-9)


class TestKappaCdf:
    def test_origin(self):
        assert kgen_cdf(0.0, P) == 0.0
        assert kgen_ccdf(0.0, P) == 1.0

    def test_weibull_reduction_at_beta(self):
        for a in (0.7, 1.0, 3.0):
            assert kgen_cdf(1.2, KappaGeneralized(a, 1.2, 0.0)) == pytest.approx(1 - math.exp(-1), rel=1e-15)

    def test_hand_value(self):
        assert kgen_cdf(1.2, P) == pytest.approx(1 - 2 ** (-4 / 3), rel=1e-14)
        assert kgen_cdf(1.2, P) == pytest.approx(0.6031497, abs=1e-7)
        assert kgen_ccdf(1.2, P) == pytest.approx(0.3968502, abs=1e-7)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            kgen_cdf(-0.1, P)
        with pytest.raises(DomainError):
            kgen_ccdf(-0.1, P)

    def test_tail_slope(self):
        x1, x2 = 1e3 * P.beta, 1e6 * P.beta
        slope = math.log(kgen_ccdf(x2, P) / kgen_ccdf(x1, P)) / math.log(x2 / x1)
        assert slope == pytest.approx(-2 / 0.75, rel=0.01)

    def test_tail_prefactor(self):
        # CCDF ~ |2 kappa t|^(-1/kappa), t = (x/beta)^alpha
        x = 1e6 * P.beta
        t = (x / P.beta) ** P.alpha
        assert kgen_ccdf(x, P) == pytest.approx((2 * P.kappa * t) ** (-1 / P.kappa), rel=1e-9)

    def test_ccdf_keeps_digits_where_cdf_saturates(self):
        x = 1e8
        assert kgen_cdf(x, P) == 1.0
        assert 0 < kgen_ccdf(x, P) < 1e-18

    def test_monotone_and_limits(self):
        x = np.logspace(-6, 12, 3000)
        F = kgen_cdf(x, P)
        assert np.all(np.diff(F) >= 0)
        assert F[-1] == pytest.approx(1.0, abs=1e-15)


class TestKappaQuantile:
    def test_hand_values(self):
        assert kgen_quantile(0.0, P) == 0.0
        ln2 = (2**0.75 - 2**-0.75) / 1.5
        assert kgen_quantile(0.5, P) == pytest.approx(1.2 * math.sqrt(ln2), rel=1e-14)
        assert kgen_quantile(0.5, P) == pytest.approx(1.02162, abs=1e-5)
        assert kgen_quantile(0.6031497370079502, P) == pytest.approx(1.2, rel=1e-12)

    def test_bisection_oracle(self):
        for u in (0.01, 0.5, 0.9, 0.999):
            root = bisect(lambda x: kgen_cdf(x, P), u, 0.0, 1e6)
            assert kgen_quantile(u, P) == pytest.approx(root, rel=1e-10)

    @pytest.mark.parametrize("u", [-0.1, 1.0, 1.5, math.nan])
    def test_domain(self, u):
        with pytest.raises(DomainError):
            kgen_quantile(u, P)

    @pytest.mark.parametrize("p", BASELINES, ids=lambda d: d.name)
    def test_round_trip(self, p):
        u = np.array([1e-6, 1e-3, 0.1, 0.5, 0.9, 0.999, 1 - 1e-6, 1 - 1e-9])
        x = p.quantile(u)
        assert np.allclose(p.cdf(x), u, rtol=1e-10, atol=1e-10 * 1e-6)
        # upper tail through the survival function, where the CDF has no digits left
        q = 1 - u
        assert np.allclose(p.ccdf(p.isf(q)), q, rtol=1e-9)
        xs = np.logspace(-3, 3, 50) * p.quantile(0.5)
        assert np.allclose(p.quantile(p.cdf(xs)[p.cdf(xs) < 1 - 1e-6]), xs[p.cdf(xs) < 1 - 1e-6], rtol=1e-8)


class TestSampling:
    def test_deterministic(self):
        assert kgen_sample(1, P, seed=11)[0] == kgen_sample(1, P, seed=11)[0]
        assert np.array_equal(kgen_sample(100, P, 3), kgen_sample(100, P, 3))
        assert not np.array_equal(kgen_sample(100, P, 3), kgen_sample(100, P, 4))

    def test_empty(self):
        assert kgen_sample(0, P, 1).size == 0

    def test_ks_against_cdf(self):
        n = 10**5
        x = kgen_sample(n, P, seed=2024)
        assert brute_ks(x, lambda v: kgen_cdf(v, P)) < 1.36 / math.sqrt(n) * 1.5

    def test_exponential_mean(self):
        n = 10**5
        x = kgen_sample(n, KappaGeneralized(1.0, 2.0, 0.0), seed=7)
        assert abs(x.mean() - 2.0) < 3 * 2.0 / math.sqrt(n)

    @pytest.mark.parametrize("p", BASELINES, ids=lambda d: d.name)
    def test_baseline_samples(self, p):
        x = p.sample(20000, seed=5)
        assert brute_ks(x, p.cdf) < 1.36 / math.sqrt(x.size) * 1.5


class TestTailExponent:
    def test_values(self):
        assert kgen_tail_exponent(P) == pytest.approx(2.0 / 0.75)
        assert kgen_tail_exponent(KappaGeneralized(1.0, 1.0, 0.5)) == 2.0

    def test_weibull_case(self):
        with pytest.raises(DomainError, match="stretched-exponential"):
            kgen_tail_exponent(KappaGeneralized(2.0, 1.2, 0.0))


class TestBaselines:
    def test_weibull_equals_kappa_zero(self):
        x = np.logspace(-4, 2, 500)
        w = dist_eval(Weibull(1.8, 0.9), x)
        k = dist_eval(KappaGeneralized(1.8, 0.9, 0.0), x)
        assert np.max(np.abs(w["cdf"] - k["cdf"])) < 1e-12
        assert np.allclose(w["pdf"], k["pdf"], rtol=1e-12, atol=0)

    def test_exponential_at_scale(self):
        assert dist_eval(Exponential(3.0), 3.0)["cdf"] == pytest.approx(0.6321205, abs=1e-7)

    def test_singh_maddala_at_b(self):
        for q in (0.5, 1.0, 2.3):
            assert SinghMaddala(2.0, 4.0, q).cdf(4.0) == pytest.approx(1 - 2 ** (-q), rel=1e-14)

    def test_dagum_at_b(self):
        for p in (0.5, 1.0, 2.3):
            assert DagumI(2.0, 4.0, p).cdf(4.0) == pytest.approx(2 ** (-p), rel=1e-14)

    @pytest.mark.parametrize(
        "ours, ref",
        [
            (Weibull(1.7, 2.0), stats.weibull_min(1.7, scale=2.0)),
            (Exponential(1.5), stats.expon(scale=1.5)),
            (SinghMaddala(2.5, 1.3, 1.4), stats.burr12(2.5, 1.4, scale=1.3)),
            (DagumI(3.0, 0.9, 0.6), stats.burr(3.0, 0.6, scale=0.9)),
        ],
        ids=lambda v: getattr(v, "name", ""),
    )
    def test_against_scipy(self, ours, ref):
        x = np.logspace(-3, 1.5, 200)
        assert np.allclose(ours.pdf(x), ref.pdf(x), rtol=1e-10, atol=0)
        assert np.allclose(ours.cdf(x), ref.cdf(x), rtol=1e-10, atol=1e-300)
        assert np.allclose(ours.ccdf(x), ref.sf(x), rtol=1e-8, atol=1e-300)
        u = np.linspace(0.001, 0.999, 50)
        assert np.allclose(ours.quantile(u), ref.ppf(u), rtol=1e-9)

    def test_dist_eval_keys(self):
        out = dist_eval(SinghMaddala(2, 1, 1), 1.0, u=0.5)
        assert set(out) == {"pdf", "logpdf", "cdf", "ccdf", "quantile"}
        assert out["quantile"] == pytest.approx(1.0)

    def test_parameter_validation(self):
        for bad in [(0, 1, 0.5), (1, -1, 0.5), (1, 1, 1.0), (1, 1, -0.2), (math.inf, 1, 0.1)]:
            with pytest.raises(DomainError):
                KappaGeneralized(*bad)
        with pytest.raises(DomainError):
            SinghMaddala(1, 0, 1)
        with pytest.raises(DomainError):
            Weibull(1, 1).pdf(0.0)


class TestProperties:
    @pytest.mark.parametrize("kappa", KAPPAS)
    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_normalization(self, alpha, kappa):
        for beta in BETAS:
            assert mass_by_substitution(KappaGeneralized(alpha, beta, kappa)) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("kappa", KAPPAS)
    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_cdf_derivative_is_pdf(self, alpha, kappa):
        for beta in BETAS:
            p = KappaGeneralized(alpha, beta, kappa)
            x = p.quantile(np.linspace(0.05, 0.95, 19))
            h = 1e-5 * x
            fd = (p.cdf(x + h) - p.cdf(x - h)) / (2 * h)
            assert np.allclose(fd, p.pdf(x), rtol=1e-6, atol=0)

    def test_weibull_reduction_small_kappa(self):
        for a in ALPHAS:
            x = np.logspace(-5, 3, 5000)
            diff = np.abs(KappaGeneralized(a, 1.2, 1e-7).cdf(x) - Weibull(a, 1.2).cdf(x))
            assert diff.max() < 1e-6

    def test_alpha_steepens_mid_range(self):
        slopes = []
        for a in (1.0, 1.5, 2.0, 2.5):
            p = KappaGeneralized(a, 1.2, 0.75)
            x1, x2 = 1.2 / 1.1, 1.2 * 1.1
            slopes.append(math.log(p.ccdf(x2) / p.ccdf(x1)) / math.log(x2 / x1))
        assert all(b < a for a, b in zip(slopes, slopes[1:]))

    def test_quantile_scale_equivariance(self):
        u = np.linspace(0.0, 0.999, 101)
        for c in (0.3, 1.5, 7.0):
            base = KappaGeneralized(2.0, 1.2, 0.75)
            assert np.allclose(
                KappaGeneralized(2.0, 1.2 * c, 0.75).quantile(u), c * base.quantile(u), rtol=1e-13, atol=0
            )

    def test_kappa_fattens_tail(self):
        values = [KappaGeneralized(2.0, 1.2, k).ccdf(12.0) for k in (0.0, 0.25, 0.5, 0.75)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_moment_existence_boundary(self):
        # r above alpha/kappa: the Monte-Carlo moment keeps growing with n
        p = KappaGeneralized(2.0, 1.2, 0.75)
        r_hi, r_lo = p.alpha / p.kappa + 0.5, p.alpha / p.kappa - 0.5
        sizes = (10**4, 10**5, 10**6)
        hi = [np.median([np.mean(p.sample(n, 1000 * n + s) ** r_hi) for s in range(20)]) for n in sizes]
        lo = [np.median([np.mean(p.sample(n, 1000 * n + s) ** r_lo) for s in range(20)]) for n in sizes]
        assert hi[0] < hi[1] < hi[2]
        assert hi[2] / hi[0] > 2.0
        # r below alpha/kappa: settles towards the quadrature moment
        assert lo[2] / lo[0] < 1.3
        assert lo[2] == pytest.approx(moment(r_lo, p), rel=0.15)

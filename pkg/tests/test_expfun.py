import math

import numpy as np
import pytest

from nubes import expfun
from nubes.expfun import ExpFunMoments, ExpFunParams, PathConfig, Scheme
from oracles import expfun_mean_quad, expfun_variance_quad

# high-precision reference values (mpmath, 40 digits)
M_0_1 = 1.2974425414002563  # 2 (sqrt(e) - 1)
SIGMA2_0_1 = 0.8460901958516027
EF2_M15_01 = 0.009357680320888939  # E F^2 at a = -3/2, t = 0.1 (series branch)
M_OVER_T_1E3 = 1.0002500416718755
THREE_SIGMA2_OVER_T3_1E3 = 1.0008754376615068
PREF_OVER_6_1E3 = 1.0031298330421158
LOG2_RATIO_1E3_Z1 = 0.9913170750128726
DK1_0_01_X1 = 0.8645148620964923
M_0_01 = 0.10254219275204808
SIGMA2_0_01 = 3.6401380965093509e-4


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            ExpFunParams(a=0.0, t=0.0)
        with pytest.raises(ValueError):
            ExpFunParams(a=0.0, t=-1.0)
        with pytest.raises(ValueError):
            ExpFunParams(a=math.nan, t=1.0)
        with pytest.raises(ValueError):
            PathConfig(n_steps=1)

    def test_default_n_steps(self):
        assert expfun.default_n_steps(0.1) == 2000
        assert expfun.default_n_steps(0.05) == 1000
        assert expfun.default_n_steps(1e-9) == 2


class TestMean:
    def test_drift_minus_half_is_t(self):
        for t in (0.01, 0.7, 3.0):
            assert expfun.mean_mt(-0.5, t) == t  # integrand has mean 1 for every s

    def test_reference_value(self):
        assert abs(expfun.mean_mt(0.0, 1.0) / M_0_1 - 1.0) <= 1e-14
        assert abs(expfun.mean_mt(0.0, 1.0) - 2.0 * (math.sqrt(math.e) - 1.0)) <= 1e-15

    def test_against_quadrature(self):
        for a in (-2.0, -1.5, -1.0, -0.5, -0.5 + 1e-9, 0.0, 1.0):
            for t in (0.01, 0.1, 1.0):
                assert abs(expfun.mean_mt(a, t) / expfun_mean_quad(a, t) - 1.0) <= 1e-12

    def test_small_t_series(self):
        assert abs(expfun.mean_mt(0.0, 1e-3) / 1e-3 / M_OVER_T_1E3 - 1.0) <= 1e-13

    def test_continuous_across_half(self):
        base = expfun.mean_mt(-0.5, 0.3)
        for eps in (1e-9, -1e-9, 1e-13):
            assert abs(expfun.mean_mt(-0.5 + eps, 0.3) / base - 1.0) <= 1e-8

    def test_rejects_bad_t(self):
        with pytest.raises(ValueError):
            expfun.mean_mt(0.0, 0.0)
        with pytest.raises(ValueError):
            expfun.mean_mt(0.0, -2.0)


class TestVariance:
    def test_reference_values(self):
        assert abs(expfun.variance_sigma2(0.0, 1.0) / SIGMA2_0_1 - 1.0) <= 1e-12
        assert abs(expfun.second_moment(-1.5, 0.1) / EF2_M15_01 - 1.0) <= 1e-11
        assert abs(expfun.variance_sigma2(0.0, 0.1) / SIGMA2_0_01 - 1.0) <= 1e-12
        assert abs(expfun.mean_mt(0.0, 0.1) / M_0_01 - 1.0) <= 1e-14

    def test_against_quadrature(self):
        # limit branch at a = -1.5 included; all removable points covered
        for a in (-2.0, -1.5, -1.0, -0.5, 0.0, 1.0):
            for t in (0.01, 0.1, 1.0):
                rel = abs(expfun.variance_sigma2(a, t) / expfun_variance_quad(a, t) - 1.0)
                assert rel <= 1e-10, (a, t, rel)

    def test_series_branch_agrees_near_singularity(self):
        for a in (-1.5 + 5e-4, -1.5 - 5e-4, -1.498):
            for t in (0.1, 1.0):
                rel = abs(expfun.variance_sigma2(a, t) / expfun_variance_quad(a, t) - 1.0)
                assert rel <= 1e-8

    def test_small_t_limit(self):
        # EF^2 - m^2 loses ~3.5 digits to cancellation at t = 1e-3; 1e-9 still
        # pins the value to 9 digits (the acceptance tolerance is 1e-2)
        t = 1e-3
        assert abs(3.0 * expfun.variance_sigma2(0.0, t) / t**3 / THREE_SIGMA2_OVER_T3_1E3 - 1.0) <= 1e-9

    def test_positive_and_cauchy_schwarz(self):
        for a in (-3.0, -1.5, 0.0, 2.0):
            for t in (0.01, 0.5, 2.0):
                s2 = expfun.variance_sigma2(a, t)
                assert 0.0 < s2 < expfun.second_moment(a, t)

    def test_rejects_bad_t(self):
        with pytest.raises(ValueError):
            expfun.variance_sigma2(0.0, 0.0)


class TestSampling:
    def test_zero_increments_give_deterministic_integral(self):
        # flat path, a = 0: the integrand is identically 1
        w = np.zeros(64)
        assert abs(expfun.integral_from_increments(0.0, 0.7, w, Scheme.TRAPEZOID) - 0.7) <= 1e-15
        assert abs(expfun.integral_from_increments(0.0, 0.7, w, Scheme.LEFT_POINT) - 0.7) <= 1e-15

    def test_two_step_trapezoid_by_hand(self):
        w1, w2 = 0.4, -0.9
        val = expfun.integral_from_increments(0.0, 1.0, np.array([w1, w2]), Scheme.TRAPEZOID)
        hand = 0.25 * (1.0 + 2.0 * math.exp(w1) + math.exp(w1 + w2))
        assert abs(val - hand) <= 1e-15

    def test_two_step_left_point_by_hand(self):
        w1, w2 = 0.4, -0.9
        val = expfun.integral_from_increments(0.0, 1.0, np.array([w1, w2]), Scheme.LEFT_POINT)
        assert abs(val - 0.5 * (1.0 + math.exp(w1))) <= 1e-15

    def test_consumes_exactly_n_steps(self):
        from nubes.sampling import substream

        params = ExpFunParams(a=0.3, t=0.2)
        cfg = PathConfig(n_steps=17)
        rng_a = substream(5, 0)
        rng_b = substream(5, 0)
        expfun.sample_ft(params, cfg, rng_a)
        rng_b.standard_normal(17)
        assert rng_a.standard_normal() == rng_b.standard_normal()

    def test_batch_matches_worker_counts(self):
        params = ExpFunParams(a=0.0, t=0.05)
        cfg = PathConfig(n_steps=50)
        one = expfun.sample_batch(params, cfg, 9000, seed=2, workers=1)
        two = expfun.sample_batch(params, cfg, 9000, seed=2, workers=2)
        assert np.array_equal(one, two)

    def test_positivity_and_support(self, expfun_t005):
        f = expfun_t005["f"]
        m = expfun_t005["moments"]
        assert np.all(f > 0.0)
        standardized = expfun.standardize(f, m)
        assert standardized.min() >= -m.m_t / m.sigma_t

    def test_mc_mean_within_3se(self, expfun_refinement):
        fine = expfun_refinement["fine"]
        m = expfun.moments(ExpFunParams(a=expfun_refinement["a"], t=expfun_refinement["t"]))
        se = fine.std(ddof=1) / math.sqrt(fine.size)
        assert abs(fine.mean() - m.m_t) <= 3.0 * se

    def test_refinement_shift_below_one_se(self, expfun_refinement):
        fine, coarse = expfun_refinement["fine"], expfun_refinement["coarse"]
        se_mean = fine.std(ddof=1) / math.sqrt(fine.size)
        assert abs(fine.mean() - coarse.mean()) < se_mean


class TestStandardize:
    def test_affine_anchors(self):
        m = ExpFunMoments(m_t=2.0, sigma2_t=9.0)
        assert expfun.standardize(2.0, m) == 0.0
        assert expfun.standardize(5.0, m) == 1.0
        assert np.array_equal(expfun.standardize(np.array([2.0, 5.0]), m), np.array([0.0, 1.0]))

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            expfun.standardize(1.0, ExpFunMoments(m_t=1.0, sigma2_t=0.0))

    def test_mc_variance_near_one(self, expfun_t01):
        s = expfun.standardize(expfun_t01["f"], expfun_t01["moments"])
        s2 = s**2
        se = s2.std(ddof=1) / math.sqrt(s2.size)
        assert abs(s.var(ddof=1) - 1.0) <= 4.0 * se


class TestConcentrationBounds:
    def test_upper_tail_anchors(self):
        params = ExpFunParams(a=0.0, t=0.1)
        m = expfun.moments(params)
        assert expfun.upper_tail_bound(0.0, params, m) == 1.0
        assert abs(expfun.upper_tail_bound(1.0, params, m) / DK1_0_01_X1 - 1.0) <= 1e-13
        xs = np.arange(0.0, 5.001, 0.5)
        vals = expfun.upper_tail_bound(xs, params, m)
        assert np.all(np.diff(vals) < 0.0)
        assert np.all((vals > 0.0) & (vals <= 1.0))
        with pytest.raises(ValueError):
            expfun.upper_tail_bound(-0.1, params, m)

    def test_lower_tail_anchors(self):
        assert expfun.lower_tail_bound(0.0) == 1.0
        assert abs(expfun.lower_tail_bound(2.0) - math.exp(-2.0)) <= 1e-16
        with pytest.raises(ValueError):
            expfun.lower_tail_bound(-1.0)

    def test_two_sided(self):
        params = ExpFunParams(a=0.0, t=0.1)
        m = expfun.moments(params)
        assert expfun.two_sided_tail(0.0, params, m) == 1.0  # clamped from 2
        expected = expfun.upper_tail_bound(2.0, params, m) + math.exp(-2.0)
        assert abs(expfun.two_sided_tail(4.0, params, m) - expected) <= 1e-15
        assert expfun.two_sided_tail(3.0, params, m) == expfun.two_sided_tail(-3.0, params, m)

    def test_empirical_tails_respect_bounds(self, expfun_t01, expfun_t005):
        for data in (expfun_t01, expfun_t005):
            params, m = data["params"], data["moments"]
            s = expfun.standardize(data["f"], m)
            n = s.size
            for x in (0.5, 1.0, 1.5, 2.0):
                up_emp = np.count_nonzero(s >= x) / n
                lo_emp = np.count_nonzero(s <= -x) / n
                up_b = expfun.upper_tail_bound(x, params, m)
                lo_b = expfun.lower_tail_bound(x)
                up_se = math.sqrt(max(up_emp * (1 - up_emp), 1e-12) / n)
                lo_se = math.sqrt(max(lo_emp * (1 - lo_emp), 1e-12) / n)
                assert up_emp <= up_b + 3.0 * up_se
                assert lo_emp <= lo_b + 3.0 * lo_se


class TestRateBound:
    def test_prefactor_is_sqrt_of_discrepancy_bound(self):
        for a, t in ((0.0, 1.0), (-1.0, 0.3), (0.5, 0.05)):
            params = ExpFunParams(a=a, t=t)
            m = expfun.moments(params)
            pref = 2.0 * math.exp(2 * a * t + 4 * t) * t**3 * math.sqrt(t) / m.sigma2_t
            assert abs(math.sqrt(expfun.discrepancy_sq_upper(params, m)) / pref - 1.0) <= 1e-13

    def test_discrepancy_bound_reference(self):
        params = ExpFunParams(a=0.0, t=1.0)
        m = expfun.moments(params)
        expected = 4.0 * math.exp(8.0) / SIGMA2_0_1**2
        assert abs(expfun.discrepancy_sq_upper(params, m) / expected - 1.0) <= 1e-11

    def test_discrepancy_bound_monotone_in_drift(self):
        t = 0.4
        vals = []
        for a in (-1.0, 0.0, 1.0, 2.0):
            params = ExpFunParams(a=a, t=t)
            vals.append(expfun.discrepancy_sq_upper(params, expfun.moments(params)))
        # e^{4at} grows with a and dominates the sigma_t variation at fixed t
        assert all(b > prev for prev, b in zip(vals, vals[1:]))

    def test_vanishes_at_small_t(self):
        t = 1e-3
        params = ExpFunParams(a=0.0, t=t)
        m = expfun.moments(params)
        ratio = math.sqrt(expfun.discrepancy_sq_upper(params, m)) / (6.0 * math.sqrt(t))
        # sigma_t^2 cancellation at t = 1e-3 limits agreement to ~2e-10
        assert abs(ratio / PREF_OVER_6_1E3 - 1.0) <= 1e-9

    def test_bound_at_zero_is_four_prefactors(self):
        params = ExpFunParams(a=0.0, t=0.05)
        m = expfun.moments(params)
        pref = math.sqrt(expfun.discrepancy_sq_upper(params, m))
        assert abs(expfun.clt_rate_bound(params, m, 0.0) - 4.0 * pref) <= 1e-13

    def test_even_in_z(self):
        params = ExpFunParams(a=0.0, t=0.05)
        m = expfun.moments(params)
        zs = np.array([0.3, 1.0, 2.4, 4.9])
        assert np.array_equal(expfun.clt_rate_bound(params, m, zs), expfun.clt_rate_bound(params, m, -zs))

    def test_small_t_exponent_limit(self):
        t = 1e-3
        params = ExpFunParams(a=0.0, t=t)
        m = expfun.moments(params)
        val = math.log1p(1.0 * m.sigma_t / (2.0 * m.m_t)) ** 2 / (4.0 * t)
        assert abs(val / (1.0 / 48.0) / LOG2_RATIO_1E3_Z1 - 1.0) <= 1e-9

    def test_bound_dominates_measured_discrepancy(self, expfun_t005):
        params, m = expfun_t005["params"], expfun_t005["moments"]
        s = np.sort(expfun.standardize(expfun_t005["f"], m))
        from nubes.gaussian import normal_cdf

        z = 3.0
        p_hat = np.searchsorted(s, z, side="right") / s.size
        disc = abs(p_hat - normal_cdf(z))
        assert disc <= expfun.clt_rate_bound(params, m, z)

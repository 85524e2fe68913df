import math

import numpy as np
import pytest

from nubes.gaussian import (
    SQRT_2PI,
    Branch,
    check_lemma,
    normal_cdf,
    normal_tail,
    scaled_tail,
    stein_derivative,
    stein_ode_residual_fd,
    stein_solution,
    stein_value,
)
from oracles import mills_asymptotic, normal_tail_asymptotic

# high-precision reference values (mpmath, 40 digits)
PHI_1 = 0.8413447460685429  # quadrature of the density on [0, 1] plus 1/2
TAIL_2 = 0.02275013194817921
TAIL_30 = 4.9067139271481870595e-198
ST_0 = 1.2533141373155003  # sqrt(2 pi)/2
ST_100 = 0.009999000299850105
ST_MINUS_2 = 18.100247711126153  # sqrt(2 pi) e^2 Phi(2)
F_00 = 0.6266570686577501  # sqrt(2 pi)/4
F_SEAM_13 = 0.5101877171588748  # sqrt(2 pi) e^{z^2/2} Phi(z)(1 - Phi(z)) at z = 1.3
F_1_M40 = 0.003963906993584761


class TestNormalCdf:
    def test_examples(self):
        assert normal_cdf(0.0) == 0.5
        assert normal_cdf(40.0) == 1.0  # limit case, no overflow
        assert abs(normal_cdf(1.0) - PHI_1) <= 1e-15

    def test_symmetry_and_monotone(self):
        xs = np.linspace(-8.0, 8.0, 1601)
        assert np.max(np.abs(normal_cdf(xs) + normal_cdf(-xs) - 1.0)) <= 1e-15
        assert np.all(np.diff(normal_cdf(xs)) >= 0.0)

    def test_rejects_non_finite(self):
        for bad in (math.nan, math.inf, -math.inf):
            with pytest.raises(ValueError):
                normal_cdf(bad)


class TestNormalTail:
    def test_examples(self):
        assert normal_tail(0.0) == 0.5
        assert abs(normal_tail(2.0) - TAIL_2) <= 1e-16
        t30 = normal_tail(30.0)
        assert 0.0 < t30 < 1e-100 and math.isfinite(t30)
        assert abs(t30 / TAIL_30 - 1.0) <= 1e-12

    def test_proof_inequality(self):
        # 1 - Phi(z) <= e^{-z^2/2}/2 for z > 0
        zs = np.linspace(1e-6, 37.0, 2000)
        assert np.all(normal_tail(zs) <= 0.5 * np.exp(-zs * zs / 2.0))

    def test_complement_and_relative_accuracy(self):
        xs = np.linspace(-8.0, 8.0, 801)
        assert np.max(np.abs(normal_tail(xs) + normal_cdf(xs) - 1.0)) <= 1e-15
        for x in np.linspace(8.0, 35.0, 55):
            oracle = normal_tail_asymptotic(float(x))
            assert abs(normal_tail(float(x)) / oracle - 1.0) <= 1e-10

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            normal_tail(math.inf)


class TestScaledTail:
    def test_examples(self):
        assert abs(scaled_tail(0.0) - ST_0) <= 1e-15
        assert abs(scaled_tail(100.0) / ST_100 - 1.0) <= 1e-13
        assert abs(scaled_tail(-2.0) / ST_MINUS_2 - 1.0) <= 1e-13

    def test_mills_asymptotics(self):
        for x in (10.0, 50.0, 1e3, 1e6):
            assert abs(scaled_tail(x) * x - x * mills_asymptotic(x)) <= 1e-12
        assert abs(scaled_tail(1e8) * 1e8 - 1.0) <= 1e-10

    def test_finite_where_representable(self):
        xs = np.linspace(-37.0, 500.0, 4001)
        vals = scaled_tail(xs)
        assert np.all(np.isfinite(vals)) and np.all(vals > 0.0)
        assert np.all(np.diff(vals) < 0.0)  # strictly decreasing

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            scaled_tail(math.nan)


class TestSteinSolution:
    def test_center_point(self):
        p = stein_solution(0.0, 0.0)
        assert abs(p.value - F_00) <= 1e-15
        assert abs(p.derivative - 0.5) <= 1e-15
        assert p.branch is Branch.LOWER

    def test_seam_continuity(self):
        z = 1.3
        below = stein_value(z, np.nextafter(z, -np.inf))
        above = stein_value(z, np.nextafter(z, np.inf))
        at = stein_value(z, z)
        assert abs(at - F_SEAM_13) <= 1e-14
        assert abs(below - above) <= 1e-12
        for z in (-4.0, -0.7, 0.0, 0.2, 2.5, 7.0):
            lo = stein_value(z, np.nextafter(z, -np.inf))
            hi = stein_value(z, np.nextafter(z, np.inf))
            assert abs(lo - hi) <= 1e-12 * max(1.0, abs(lo))

    def test_derivative_jump_is_one(self):
        # indicator discontinuity: lower-branch f' minus the upper-branch limit
        for z in (-3.0, 0.0, 1.3, 5.0):
            f = stein_value(z, z)
            lower = stein_derivative(z, z)
            upper_limit = z * f - normal_cdf(z)
            assert abs((lower - upper_limit) - 1.0) <= 1e-12

    def test_branch_classification(self):
        assert stein_solution(1.0, 1.0).branch is Branch.LOWER
        assert stein_solution(1.0, 1.0 + 1e-12).branch is Branch.UPPER

    def test_far_left_mills_limit(self):
        p = stein_solution(1.0, -40.0)
        assert abs(p.value / F_1_M40 - 1.0) <= 1e-12
        assert abs(p.value / (normal_tail(1.0) / 40.0) - 1.0) <= 0.002

    def test_no_overflow_extremes(self):
        for z, x in [(200.0, 150.0), (-200.0, -150.0), (50.0, 50.0), (0.0, -400.0),
                     (0.0, 400.0), (300.0, -300.0), (-300.0, 300.0), (37.9, 37.8)]:
            v = stein_value(z, x)
            assert math.isfinite(v) and v >= 0.0

    def test_reflection_symmetry(self):
        # f_z(x) = f_{-z}(-x) away from the seam
        rng = np.random.default_rng(5)
        for _ in range(200):
            z = float(rng.uniform(-10, 10))
            x = float(rng.uniform(-12, 12))
            if x == z:
                continue
            a = stein_value(z, x)
            b = stein_value(-z, -x)
            assert abs(a - b) <= 1e-13 * max(1.0, a)

    def test_positive_and_bounded(self):
        rng = np.random.default_rng(11)
        zs = rng.uniform(-8, 8, size=50)
        xs = np.linspace(-15.0, 15.0, 1501)
        for z in zs:
            f = stein_value(float(z), xs)
            fp = stein_derivative(float(z), xs)
            assert np.all(f > 0.0)
            assert np.all(f <= SQRT_2PI / 4.0 + 1e-12)
            assert np.all(np.abs(fp) <= 1.0 + 1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            stein_solution(math.nan, 0.0)
        with pytest.raises(ValueError):
            stein_solution(0.0, math.inf)
        with pytest.raises(ValueError):
            stein_value(0.0, [0.0, math.inf])


class TestOdeResidual:
    def test_residual_small_on_mixed_grid(self):
        xs = np.arange(-12.0, 12.0001, 0.01)
        for z in (-3.0, -1.0, 0.0, 0.5, 2.0, 6.0):
            res = stein_ode_residual_fd(z, xs)
            assert np.max(np.abs(res)) <= 1e-9

    def test_residual_scalar_at_seam(self):
        assert abs(stein_ode_residual_fd(1.25, 1.25)) <= 1e-9


class TestCheckLemma:
    def test_z2_reference_grid(self):
        rep = check_lemma(2.0, np.linspace(-10.0, 10.0, 4001))
        assert rep.global_bound_ok and rep.center_value_ok and rep.center_derivative_ok
        assert rep.worst_margin > 0.0

    def test_degenerate_center(self):
        rep = check_lemma(0.001, [0.0])
        assert rep.global_bound_ok and rep.center_value_ok and rep.center_derivative_ok

    def test_strict_derivative_margin_z6(self):
        z = 6.0
        rep = check_lemma(z, np.arange(-12.0, 12.0001, 0.005))
        assert rep.center_derivative_ok
        center = np.arange(-z / 2, z / 2 + 1e-9, 0.0005)
        margin = 2.0 * math.exp(-z * z / 4.0) - np.abs(stein_derivative(z, center))
        assert np.min(margin) > 0.0  # strict inequality

    def test_center_value_bound_full_range(self):
        # the sharpened value bound on the whole of |x| <= z/2, including x < 0
        for z in (0.3, 1.0, 2.7, 5.0, 9.0):
            xs = np.linspace(-z / 2, z / 2, 2001)
            f = stein_value(z, xs)
            assert np.all(f <= (SQRT_2PI / 2.0) * math.exp(-z * z / 4.0) + 1e-12)

    def test_rejections(self):
        with pytest.raises(ValueError):
            check_lemma(0.0, [0.0])
        with pytest.raises(ValueError):
            check_lemma(-1.0, [0.0])
        with pytest.raises(ValueError):
            check_lemma(1.0, [])
        with pytest.raises(ValueError):
            check_lemma(1.0, [math.nan])


def test_helper_inequality_z_exp():
    # z e^{-z^2/8} <= 2 e^{-1/2} for all z > 0 (equality at z = 2)
    zs = np.linspace(1e-9, 50.0, 100001)
    assert np.all(zs * np.exp(-zs * zs / 8.0) <= 2.0 * math.exp(-0.5) + 1e-12)
    assert abs(2.0 * math.exp(-2.0 * 2.0 / 8.0) - 2.0 * math.exp(-0.5)) <= 1e-15

"""Convolution tails: quadrature routes, identities, certified brackets."""

import math

import numpy as np
import pytest

import tailforge as tf
from tailforge.errors import GridGuardError, ParameterError


# ------------------------------------------------------------ cross integral


def test_cross_integral_exponential_closed_form(exp1):
    # integrand e^{-(x-y)} e^{-y} is the constant e^{-x}: integral = x e^{-x}
    assert tf.cross_integral(exp1, 0, 2, 2) == pytest.approx(2 * math.exp(-2), rel=1e-11)
    assert tf.cross_integral(exp1, 0, 10, 10) == pytest.approx(10 * math.exp(-10), rel=1e-11)


def test_cross_integral_symmetry(request):
    for name in ("pareto3", "dyadic", "fkz"):
        d = request.getfixturevalue(name)
        for x in (3.0, 8.0, 30.0):
            full = tf.cross_integral(d, 0, x, x)
            half = tf.cross_integral(d, 0, x / 2, x)
            assert full == pytest.approx(2 * half, rel=1e-9)


def test_cross_integral_empty(pareto3):
    assert tf.cross_integral(pareto3, 3.0, 3.0, 10.0) == 0.0


def test_cross_integral_preconditions(pareto3):
    with pytest.raises(ParameterError):
        tf.cross_integral(pareto3, 2.0, 1.0, 10.0)
    with pytest.raises(ParameterError):
        tf.cross_integral(pareto3, 0.0, 11.0, 10.0)


# ------------------------------------------------------------ two-fold tails


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 5.0, 10.0, 20.0])
def test_conv2_exponential_gamma_tail(exp1, x):
    # sum of two exp(1) is gamma(2,1): tail (1+x) e^{-x}
    assert tf.conv2_tail(exp1, x) == pytest.approx((1 + x) * math.exp(-x), rel=1e-10)


def test_conv2_at_zero(pareto3, fkz):
    assert tf.conv2_tail(pareto3, 0.0) == 1.0
    assert tf.conv2_tail(fkz, 0.0) == 1.0


def test_conv2_dyadic_atom_sum_oracle(dyadic):
    # brute-force enumeration over the atoms (the whole law is atomic)
    for x in (5.0, 12.0, 33.0):
        oracle = math.exp(dyadic.log_tail(x)) + sum(
            a.mass * math.exp(dyadic.log_tail(x - a.location))
            for a in dyadic.parts.atoms
            if a.location <= x
        )
        assert tf.conv2_tail(dyadic, x) == pytest.approx(oracle, rel=1e-12)
        bg = tf.convn_tail_grid(dyadic, 2, x + 1.0, 0.25)
        lo, up = bg.at(x)
        assert lo <= oracle <= up


def test_union_intersection_bounds(request):
    for name in ("exp1", "pareto3", "dyadic", "plateau2"):
        d = request.getfixturevalue(name)
        for x in (1.0, 4.0, 17.0):
            f2 = tf.conv2_tail(d, x)
            fbar = math.exp(d.log_tail(x))
            fbar_half = math.exp(d.log_tail(x / 2))
            assert f2 >= fbar - 1e-12
            assert f2 <= min(1.0, 2 * fbar_half) + 1e-12


def test_inequality_cross_vs_moment(request):
    # int_{x/2}^x F(x-y)F(y) dy >= F(x) int_0^{x/2} F(y) dy
    for name in ("exp1", "pareto3", "fkz"):
        d = request.getfixturevalue(name)
        for x in (4.0, 12.0, 40.0):
            lhs = tf.cross_integral(d, x / 2, x, x)
            rhs = math.exp(d.log_tail(x)) * tf.partial_moment(d, 0, 0, x / 2)
            assert lhs >= rhs * (1 - 1e-9)


# --------------------------------------------------------------- identities


@pytest.mark.parametrize("x", [1.0, 2.0, 5.0, 10.0, 20.0, 50.0])
def test_identity_residual_pareto(pareto3, x):
    assert tf.g_conv2_identity_residual(pareto3, 0.5, x) <= 1e-6


@pytest.mark.parametrize("x", [1.0, 2.0, 5.0, 10.0, 20.0, 50.0])
def test_identity_residual_exponential(exp1, x):
    assert tf.g_conv2_identity_residual(exp1, 1.0, x) <= 1e-6


def test_identity_residual_at_zero(pareto3):
    assert tf.g_conv2_identity_residual(pareto3, 0.5, 0.0) <= 1e-12


def test_os_ratio_identity_pointwise(request):
    # G2bar/Gbar = F2bar/Fbar + gamma * crossint/Fbar, within 1e-6
    gamma = 0.5
    for name in ("pareto3", "dyadic"):
        d = request.getfixturevalue(name)
        g = tf.gamma_transform(d, gamma)
        for x in (1.0, 2.0, 5.0, 10.0, 20.0, 50.0):
            lt = d.log_tail(x)
            os_g = math.exp(tf.log_conv2_tail(g, x) - g.log_tail(x))
            os_f = math.exp(tf.log_conv2_tail(d, x) - lt)
            osstar_f = math.exp(tf.log_cross_integral(d, 0, x, x) - lt)
            assert os_g == pytest.approx(os_f + gamma * osstar_f, rel=1e-6)


# ------------------------------------------------------------ grid brackets


def test_bracket_contains_gamma3_tail(exp1):
    bg = tf.convn_tail_grid(exp1, 3, 2.01, 1e-3)
    lo, up = bg.at(2.0)
    truth = math.exp(-2.0) * (1 + 2 + 2.0**2 / 2)
    assert lo <= truth <= up
    assert up - lo < 1e-3


def test_bracket_one_more_fold(exp1):
    # gamma(4,1) tail at x=3
    bg = tf.convn_tail_grid(exp1, 4, 3.01, 2e-3)
    lo, up = bg.at(3.0)
    truth = math.exp(-3.0) * (1 + 3 + 9 / 2 + 27 / 6)
    assert lo <= truth <= up


def test_bracket_consistent_with_conv2(request):
    for name in ("exp1", "pareto3"):
        d = request.getfixturevalue(name)
        bg = tf.convn_tail_grid(d, 2, 5.0, 0.01)
        for x in (0.5, 1.0, 2.5, 4.0):
            lo, up = bg.at(x)
            assert lo <= tf.conv2_tail(d, x) <= up


def test_bracket_width_halves(exp1):
    w = [
        tf.convn_tail_grid(exp1, 3, 2.01, h).width_at(2.0)
        for h in (4e-3, 2e-3, 1e-3)
    ]
    assert w[1] / w[0] <= 0.6
    assert w[2] / w[1] <= 0.6


def test_bracket_monotone_columns(pareto3):
    bg = tf.convn_tail_grid(pareto3, 3, 10.0, 0.01)
    assert np.all(np.diff(bg.log_lower) <= 1e-12)
    assert np.all(np.diff(bg.log_upper) <= 1e-12)
    assert np.all(bg.log_lower <= bg.log_upper + 1e-12)


def test_trunc_support_bound(exp1):
    # both summands <= cap: the sum cannot reach beyond 2 * cap
    cap = 3.0
    tb = tf.trunc_convn_tail_grid(exp1, 2, cap, 8.0, 0.01)
    lo, up = tb.at(6.5)
    assert up == 0.0
    assert lo == 0.0


def test_trunc_matches_1d_oracle(pareto3):
    # P(both <= c, S > x) = int_{x-c}^c f(y)(F(x-y) - F(c)) dy for c < x < 2c
    c, x = 5.0, 8.0
    ys = np.linspace(x - c, c, 400001)
    integrand = 3.0 * (1 + ys) ** -4 * ((1 + x - ys) ** -3.0 - (1 + c) ** -3.0)
    oracle = np.trapezoid(integrand, ys)
    tb = tf.trunc_convn_tail_grid(pareto3, 2, c, 8.5, 1e-3)
    lo, up = tb.at(x)
    assert lo <= oracle <= up
    assert up - lo < 5e-4


def test_trunc_total_mass(pareto3):
    # total mass of the truncated 2-fold law is F(cap)^2
    cap = 4.0
    tb = tf.trunc_convn_tail_grid(pareto3, 2, cap, 9.0, 1e-3)
    lo, up = tb.at(0.0)
    target = (1.0 - (1 + cap) ** -3.0) ** 2
    assert lo <= target <= up + 1e-12


def test_trunc_infinite_cap_equals_plain(exp1):
    a = tf.convn_tail_grid(exp1, 2, 4.0, 0.01)
    b = tf.trunc_convn_tail_grid(exp1, 2, math.inf, 4.0, 0.01)
    assert np.array_equal(a.log_lower, b.log_lower)
    assert np.array_equal(a.log_upper, b.log_upper)


def test_fold_and_cell_guards(exp1):
    with pytest.raises(ParameterError):
        tf.convn_tail_grid(exp1, 9, 2.0, 0.1)
    with pytest.raises(ParameterError):
        tf.convn_tail_grid(exp1, 1, 2.0, 0.1)
    with pytest.raises(GridGuardError):
        tf.convn_tail_grid(exp1, 2, 1e9, 1e-4)


def test_bracket_deterministic(pareto3):
    a = tf.convn_tail_grid(pareto3, 3, 6.0, 0.01)
    b = tf.convn_tail_grid(pareto3, 3, 6.0, 0.01)
    assert np.array_equal(a.log_lower, b.log_lower)
    assert np.array_equal(a.log_upper, b.log_upper)

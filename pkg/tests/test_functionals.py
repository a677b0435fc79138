"""Tail functionals, trend classification, and class diagnostics."""

import math

import numpy as np
import pytest

import tailforge as tf
from tailforge.errors import InconclusiveBracketError, ParameterError, TruncationError
from tailforge.functionals import classify_trend, shift_probe_grid, xu_window_labels


# ------------------------------------------------------------------- t_ratio


def test_t_ratio_exact_one_at_half(request):
    for name in ("exp1", "pareto3", "dyadic"):
        d = request.getfixturevalue(name)
        assert tf.t_ratio(d, 10.0, 5.0) == 1.0


def test_t_ratio_exponential_closed_form(exp1):
    # constant integrand: numerator 2K e^{-x}, denominator x e^{-x}
    assert tf.t_ratio(exp1, 10.0, 2.0) == pytest.approx(0.4, rel=1e-10)


def test_t_ratio_in_unit_interval(request):
    rng = np.random.default_rng(5)
    for name in ("exp1", "pareto3", "fkz", "plateau2"):
        d = request.getfixturevalue(name)
        for _ in range(10):
            x = float(rng.uniform(4.0, 200.0))
            K = float(rng.uniform(0.1, x / 2))
            v = tf.t_ratio(d, x, K)
            assert 0.0 < v <= 1.0


def test_t_ratio_dyadic_approaches_one(dyadic):
    # the dominated-variation mechanism pushes T toward 1 in K
    vals = [tf.t_ratio(dyadic, 2.0**m, 1024.0) for m in range(15, 21)]
    assert min(vals) >= 0.9


def test_t_ratio_precondition(pareto3):
    with pytest.raises(ParameterError):
        tf.t_ratio(pareto3, 10.0, 6.0)


# ------------------------------------------------------------------ b2_cond


@pytest.mark.parametrize("x,K", [(9.0, 1.0), (19.0, 2.0), (99.0, 5.0)])
def test_b2_exponential_closed_form(exp1, x, K):
    assert tf.b2_cond(exp1, x, K) == pytest.approx(2 * K / (1 + x), rel=1e-6)


def test_b2_pareto_limit(pareto3):
    # asymptotically F(K) * F2bar(x) / (2 Fbar(x)) -> F(K); F(9) = 1 - 1e-3
    assert tf.b2_cond(pareto3, 1e4, 9.0) == pytest.approx(0.999, abs=1e-2)


def test_b2_monotone_in_K(request):
    for name in ("exp1", "pareto3", "dyadic"):
        d = request.getfixturevalue(name)
        x = 64.0
        vals = [tf.b2_cond(d, x, K) for K in (1.0, 2.0, 4.0, 8.0, 16.0)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_b2_precondition(pareto3):
    with pytest.raises(ParameterError):
        tf.b2_cond(pareto3, 10.0, 5.0)


# ---------------------------------------------------------------- jump_cond


def test_jump_exponential_oracle(exp1):
    # P(both <= 8, S > 9) = 6 e^{-9} + e^{-16} by direct 1-D integration;
    # P(S > 9) = 10 e^{-9}
    oracle = 1 - (6 * math.exp(-9) + math.exp(-16)) / (10 * math.exp(-9))
    br = tf.jump_cond(exp1, 2, 9.0, 1.0, 0.002)
    assert br.lower <= oracle <= br.upper
    assert br.width < 1e-2


def test_jump_sure_event(request):
    for name in ("exp1", "dyadic"):
        d = request.getfixturevalue(name)
        br = tf.jump_cond(d, 2, 5.0, 5.0, 0.01)
        assert br.lower == br.upper == 1.0


def test_jump_b2_consistency(exp1, pareto3):
    # {X_{2,2} <= K, S_2 > x} implies {X_{2,1} > x-K}
    for d in (exp1, pareto3):
        for x, K in ((9.0, 1.0), (12.0, 3.0)):
            b2 = tf.b2_cond(d, x, K)
            br = tf.jump_cond(d, 2, x, K, 0.002)
            assert b2 <= br.upper + 1e-9


def test_jump_monotone_in_K(pareto3):
    brs = [tf.jump_cond(pareto3, 2, 20.0, K, 0.005) for K in (1.0, 2.0, 4.0, 8.0)]
    for a, b in zip(brs, brs[1:]):
        assert b.upper >= a.lower - 1e-12


def test_jump_degenerate_bracket(exp1):
    # P(S_2 > 800) ~ 801 e^{-800} underflows plain floats entirely
    with pytest.raises(InconclusiveBracketError):
        tf.jump_cond(exp1, 2, 800.0, 1.0, 1.0)


def test_jump_profile_shape(exp1):
    prof = tf.jump_profile(exp1, 2, [8.0, 12.0], [1.0, 2.0], 0.01)
    assert prof.lower.shape == (2, 2)
    assert np.all(prof.lower <= prof.upper + 1e-12)
    assert np.all((0 <= prof.lower) & (prof.upper <= 1))


# --------------------------------------------------------- ratio diagnostics


def test_pareto_halving_ratio_formula(pareto3):
    xs = np.geomspace(4, 1e6, 30)
    s = tf.ratio_diagnostic(pareto3, "d", xs)
    expect = ((1 + xs) / (1 + xs / 2)) ** 3
    assert np.allclose(s.values, expect, rtol=1e-12)
    assert s.trend == "converging"
    assert s.limit == pytest.approx(8.0, rel=1e-2)


def test_dyadic_halving_ratio_exactly_four(dyadic):
    xs = 2.0 ** np.arange(1, 21)
    s = tf.ratio_diagnostic(dyadic, "d", xs)
    assert np.allclose(s.values, 4.0, rtol=1e-12)


def test_xu_shift_ratio_identity(xu55):
    xns = tf.xu_breakpoints(xu55)
    t = 2.0
    checked = 0
    for xn in xns:
        x = 2.0 * xn
        if x - t == x or x - t <= xn:
            break
        s = tf.ratio_diagnostic(xu55, "ol", np.array([x]), t=t)
        target = 1.0 + t - t / xn
        assert float(s.values[0]) == pytest.approx(target, rel=1e-12)
        checked += 1
    assert checked >= 8


def test_os_series_pareto(pareto3):
    xs = np.geomspace(8, 2e3, 16)
    s = tf.ratio_diagnostic(pareto3, "os", xs)
    assert s.trend == "converging"
    assert s.limit == pytest.approx(2.0, rel=0.05)


def test_osstar_series_pareto(pareto3):
    # limit is 2 * mean = 1 for the (1+x)^-3 tail
    xs = np.geomspace(8, 2e4, 16)
    s = tf.ratio_diagnostic(pareto3, "osstar", xs)
    assert s.trend == "converging"
    assert s.limit == pytest.approx(1.0, rel=0.05)


def test_lgamma_exponential_exact(exp1):
    xs = np.geomspace(4, 100, 10)
    s = tf.ratio_diagnostic(exp1, "lgamma", xs, t=1.0, gamma=1.0)
    assert np.allclose(s.values, 1.0, rtol=1e-12)


def test_ratio_kind_validation(pareto3):
    with pytest.raises(ParameterError):
        tf.ratio_diagnostic(pareto3, "bogus", [1, 2, 3])
    with pytest.raises(ParameterError):
        tf.ratio_diagnostic(pareto3, "ol", [1.0, 2.0], t=1.5)


# ---------------------------------------------------------- trend classifier


def test_trend_rules():
    grid = np.geomspace(1, 100, 12)
    conv, limit = classify_trend(grid, np.full(12, 3.0))
    assert conv == "converging" and limit == pytest.approx(3.0)
    div, _ = classify_trend(grid, np.geomspace(1, 1e4, 12))
    assert div == "diverging"
    osc, _ = classify_trend(grid, np.array([1.0, 4.0] * 6))
    assert osc == "oscillating"
    inc, _ = classify_trend(grid, np.linspace(1, 5, 12))
    assert inc == "increasing"
    dec, _ = classify_trend(grid, np.linspace(5, 1, 12))
    assert dec == "decreasing"


# ------------------------------------------------------ exam300 lower bound


def test_exam300_values():
    # direct arithmetic: (a_2^2/2 - a_1^2) e^{-a_1} = (e^2/2 - 1)/e
    assert tf.exam300_lower_bound(1) == pytest.approx(
        (math.e**2 / 2 - 1) / math.e, rel=1e-12
    )
    # regression anchors from the recursion
    assert tf.exam300_lower_bound(2) == pytest.approx(0.5378638876269897, rel=1e-12)
    assert tf.exam300_lower_bound(3) == pytest.approx(4.124984947439519, rel=1e-12)
    assert tf.exam300_lower_bound(4) > 1e10


def test_exam300_increasing_from_two():
    vals = [tf.exam300_lower_bound(n) for n in (2, 3, 4)]
    assert vals[0] < vals[1] < vals[2]


def test_exam300_truncation():
    with pytest.raises(TruncationError):
        tf.exam300_lower_bound(5)


def test_osstar_dominates_exam300_bound(fkz):
    a = tf.fkz_a_sequence()
    for n in (1, 2, 3):
        x = a[n + 1] ** 2
        ratio = math.exp(tf.log_cross_integral(fkz, 0, x, x) - fkz.log_tail(x))
        assert ratio >= tf.exam300_lower_bound(n)


# ------------------------------------------------------------ weak equiv


def test_weak_equiv_exponential(exp1):
    # c(f, t) = e^t exactly
    s = tf.weak_equiv_diag(exp1, [1, 2, 4, 8, 16], np.geomspace(32, 500, 8))
    assert np.allclose(s.values, np.exp([1, 2, 4, 8, 16]), rtol=1e-9)
    assert s.trend == "diverging"


def test_weak_equiv_pareto_bounded(pareto3):
    s = tf.weak_equiv_diag(pareto3, [1, 2, 4, 8, 16], np.geomspace(100, 1e5, 12))
    assert s.trend != "diverging"
    assert float(np.max(s.values)) < 2.0


def test_weak_equiv_xu_diverges(xu55):
    # probe the recurring ramp tops (cycles >= 2; the one-time junction at
    # x_1 is a transient a limsup proxy must not be dominated by)
    xns = tf.xu_breakpoints(xu55)[1:10]
    xgrid = np.unique(np.concatenate([xns, 1.5 * xns, 2.0 * xns]))
    s = tf.weak_equiv_diag(xu55, [1, 2, 4, 8, 16], xgrid)
    assert s.trend == "diverging"
    # the sup at 2 x_n grows like 1 + t
    assert np.allclose(s.values, 1 + s.grid, rtol=1e-3)


# -------------------------------------------------------------- aux helpers


def test_xu_window_labels(xu55):
    xns = tf.xu_breakpoints(xu55)
    xn = xns[2]
    K = 512.0
    labels = xu_window_labels(
        xu55, [xn + 1, xn + K + 1, 1.6 * xn, 2 * xn + 1, 2 * xn + K + 1], K
    )
    assert labels == ("W1", "W2", "W3", "W4", "W5")


def test_shift_probe_grid(dyadic):
    grid = shift_probe_grid(dyadic, np.geomspace(64, 4096, 5), 1.0)
    assert 127.0 in grid  # one ulp... one shift below the breakpoint 128
    assert 2047.0 in grid


# ----------------------------------------------------------------- classify


def test_classify_pareto(pareto3):
    rep = tf.classify(pareto3)
    for cls in ("L", "D", "S", "OS", "OS*", "J", "OL"):
        assert rep.verdict(cls) == "evidence-for", cls
    assert rep.verdict("L(gamma)") == "evidence-against"
    assert rep.verdict("S(gamma)") == "evidence-against"
    assert rep.disclaimer == "numerical evidence, not proof"


def test_classify_exponential(exp1):
    rep = tf.classify(exp1)
    assert rep.verdict("J") == "evidence-against"
    assert rep.verdict("L") == "evidence-against"
    assert rep.verdict("L(gamma)") == "evidence-for"
    assert rep.verdict("S(gamma)") == "evidence-against"


def test_classify_dyadic(dyadic):
    rep = tf.classify(dyadic)
    for cls in ("D", "OS", "OS*", "J"):
        assert rep.verdict(cls) == "evidence-for", cls
    for cls in ("L", "S"):
        assert rep.verdict(cls) == "evidence-against", cls


def test_classify_tilted_pareto(pareto3):
    rep = tf.classify(tf.gamma_transform(pareto3, 0.5))
    assert rep.verdict("L(gamma)") == "evidence-for"
    assert rep.verdict("S(gamma)") == "evidence-for"
    assert rep.verdict("J") == "evidence-for"
    assert rep.verdict("L") == "evidence-against"


def test_classify_tilted_staircase_signature(dyadic):
    # the tilt of the dominatedly-varying staircase stays in J but admits
    # no exponential rate: light-tailed big-jump law beyond the
    # convolution-equivalent families
    cfg = tf.ClassifyConfig(x_hi=1e5, n_grid=18, j_n_grid=6)
    rep = tf.classify(tf.gamma_transform(dyadic, 0.5), cfg)
    assert rep.verdict("J") == "evidence-for"
    assert rep.verdict("L(gamma)") == "evidence-against"
    assert rep.verdict("S(gamma)") == "evidence-against"


def test_classify_tilted_ramp_plateau_signature(xu55):
    cfg = tf.ClassifyConfig(x_hi=1e5, n_grid=18, j_n_grid=6)
    rep = tf.classify(tf.gamma_transform(xu55, 1.0), cfg)
    assert rep.verdict("J") == "evidence-for"
    assert rep.verdict("L(gamma)") == "evidence-against"
    assert rep.verdict("S(gamma)") == "evidence-against"
    assert rep.verdict("OS") == "evidence-for"


def test_classify_runs_on_every_builtin(request):
    cfg = tf.ClassifyConfig(x_hi=1e5, n_grid=14, j_n_grid=5)
    for name in ("fkz", "xu55", "plateau2"):
        d = request.getfixturevalue(name)
        rep = tf.classify(d, cfg)
        assert {e.verdict for e in rep.entries} <= {
            "evidence-for",
            "evidence-against",
            "inconclusive",
        }


def test_classify_report_is_exportable(tmp_path, exp1):
    rep = tf.classify(exp1)
    from tailforge.export import export_grid

    export_grid(rep, "csv", tmp_path / "rep.csv")
    export_grid(rep, "json", tmp_path / "rep.json")
    assert (tmp_path / "rep.csv").read_text().startswith("class,verdict,detail")

import math

import numpy as np
import pytest

from fraccalc import (
    AssumptionError,
    FractionalParams,
    HypothesisError,
    critical_points,
    dilation_scenario,
    order_duality_check,
    parse,
    r_alpha_curve,
    derivative_zero_before,
)


def test_sine_has_single_critical_point_half_order():
    p = FractionalParams(0.5, 0.0, 1024)
    rep = critical_points(parse("sin(t)"), p, math.pi, 64)
    assert len(rep.roots) == 1
    assert 0.0 < rep.roots[0] <= math.pi
    assert rep.residuals[0] <= 1e-8


def test_sine_critical_point_order_limits():
    # near order 1 the critical point approaches the stationary point pi/2,
    # near order 0 it approaches the root pi
    hi = critical_points(parse("sin(t)"), FractionalParams(0.99, 0.0, 2048), math.pi, 64)
    assert any(abs(r - math.pi / 2.0) <= 0.05 for r in hi.roots)
    lo = critical_points(parse("sin(t)"), FractionalParams(0.01, 0.0, 2048), math.pi, 64)
    assert any(abs(r - math.pi) <= 0.05 for r in lo.roots)


def test_strictly_increasing_function_has_no_critical_points():
    for al in (0.2, 0.5, 0.8):
        p = FractionalParams(al, 0.0, 512)
        rep = critical_points(parse("t"), p, 2.0, 48)
        assert rep.roots == ()


def test_limit_consistency_for_bump_profile():
    # t e^(-t) has no root on (0, 2] (so low orders find nothing) and a
    # stationary point at 1 (found as the order approaches 1)
    f = parse("t*exp(-t)")
    lo = critical_points(f, FractionalParams(0.01, 0.0, 2048), 2.0, 64)
    assert lo.roots == ()
    hi = critical_points(f, FractionalParams(0.99, 0.0, 2048), 2.0, 64)
    assert any(abs(r - 1.0) <= 0.05 for r in hi.roots)


def test_residual_invariant_scaled():
    p = FractionalParams(0.4, 0.0, 1024)
    f = parse("sin(t)")
    rep = critical_points(f, p, math.pi, 64)
    from fraccalc import rl_derivative

    sup = max(
        abs(rl_derivative(f, p, float(x)).value)
        for x in np.linspace(0.05 * math.pi, math.pi, 24)
    )
    for r in rep.residuals:
        assert r <= 1e-8 * max(1.0, sup)


def test_critical_points_enforce_base_assumption():
    p = FractionalParams(0.5, 0.0, 256)
    with pytest.raises(AssumptionError):
        critical_points(parse("t + 1"), p, 2.0, 32)


# --- existence construction ----------------------------------------------------


@pytest.mark.parametrize("al", [0.25, 0.5, 0.75])
def test_existence_point_for_quadratic(al):
    # f = t(1-t) vanishes at 1; D^al f vanishes at (2-al)/2 exactly
    p = FractionalParams(al, 0.0, 1024)
    res = derivative_zero_before(parse("t*(1 - t)"), p, 1.0)
    assert res.xi == pytest.approx((2.0 - al) / 2.0, abs=1e-9)
    assert res.residual <= 1e-8
    assert not res.degenerate


@pytest.mark.parametrize("al", [0.25, 0.5, 0.75])
def test_existence_point_for_sine(al):
    p = FractionalParams(al, 0.0, 1024)
    res = derivative_zero_before(parse("sin(t)"), p, math.pi)
    assert 0.0 < res.xi <= math.pi
    assert res.residual <= 1e-8


def test_existence_precondition_checked():
    p = FractionalParams(0.5, 0.0, 256)
    with pytest.raises(HypothesisError):
        derivative_zero_before(parse("sin(t)"), p, 2.0)  # sin(2) != 0


def test_existence_degenerate_zero_function():
    p = FractionalParams(0.5, 0.0, 256)
    res = derivative_zero_before(parse("0"), p, 1.0)
    assert res.degenerate
    assert res.residual == 0.0


# --- order duality for monotone functions ---------------------------------------


def test_duality_check_linear_closed_form():
    # f = t: D^(1-al) t(x) = x^al / G(1+al) > 0 and xi(x) = x/(1+al), so
    # the level residual is |x/(1+al) - x^al|: both quantities stay nonzero
    for al in (0.3, 0.5, 0.7):
        p = FractionalParams(al, 0.0, 1024)
        for x in (0.5, 1.5):
            out = order_duality_check(parse("t"), p, x)
            assert out.d_value == pytest.approx(x**al / math.gamma(1.0 + al), rel=1e-8)
            assert out.level_residual == pytest.approx(
                abs(x / (1.0 + al) - x**al), abs=1e-8
            )
            assert out.d_value > 1e-3
            assert out.level_residual > 1e-3


def test_duality_check_continuity_near_base():
    p = FractionalParams(0.5, 0.0, 1024)
    a = order_duality_check(parse("t"), p, 0.5)
    b = order_duality_check(parse("t"), p, 0.5 + 1e-6)
    assert abs(a.level_residual - b.level_residual) < 1e-5
    assert abs(a.d_value - b.d_value) < 1e-5


def test_duality_predicate_on_monotone_corpus():
    # both-nonzero together at matched tolerance, 20 random probe points each
    rng = np.random.RandomState(17)
    corpus = ["t", "exp(t) - 1", "t^3", "t + sin(t)/2"]
    p_template = [(0.3, 1024), (0.6, 1024)]
    for src in corpus:
        f = parse(src)
        for al, n in p_template:
            p = FractionalParams(al, 0.0, n)
            for _ in range(10):
                x = float(rng.uniform(0.2, 2.0))
                out = order_duality_check(f, p, x)
                level_zero = out.level_residual <= 1e-8 * max(1.0, abs(f.eval(x)))
                d_zero = abs(out.d_value) <= 1e-8 * max(1.0, abs(f.eval(x)))
                assert level_zero == d_zero


def test_duality_check_rejects_nonmonotone():
    p = FractionalParams(0.5, 0.0, 256)
    with pytest.raises(HypothesisError):
        order_duality_check(parse("sin(t)"), p, 6.0)


# --- migration curve -------------------------------------------------------------


def test_r_alpha_endpoints_for_sine():
    curve = r_alpha_curve(
        parse("sin(t)"), 0.0, 1.5 * math.pi, math.pi / 2.0, 0.5,
        [0.01, 0.25, 0.5, 0.75, 0.99], grid_n=1024, scan_n=96,
    )
    last = curve.samples[-1]
    assert last.alpha == 0.99
    assert last.r_alpha is not None
    assert abs(last.r_alpha - math.pi / 2.0) <= 0.05
    first = curve.samples[0]
    assert first.alpha == 0.01
    assert first.global_sup is not None
    assert abs(first.global_sup - math.pi) <= 0.05
    assert curve.gap_high_alpha <= 0.05
    x1, x0 = curve.limit_targets
    assert x1 == pytest.approx(math.pi, abs=0.01)
    assert x0 == pytest.approx(math.pi / 2.0, abs=0.01)


def test_r_alpha_empty_ball_is_marked_not_interpolated():
    # mid orders park the critical point outside a small ball around pi/2
    curve = r_alpha_curve(
        parse("sin(t)"), 0.0, 1.5 * math.pi, math.pi / 2.0, 0.25,
        [0.3, 0.5], grid_n=512, scan_n=64,
    )
    for s in curve.samples:
        assert s.r_alpha is None
        assert s.global_sup is not None


def test_r_alpha_downward_parabola_curve_recorded():
    # f = t(2 - t) on (0, 2]: stationary point 1, root 2; the curve moves
    # from near 2 at small order to near 1 at high order (recorded only)
    curve = r_alpha_curve(
        parse("t*(2 - t)"), 0.0, 2.0, 1.0, 0.4,
        [0.01, 0.3, 0.6, 0.99], x1=2.0, grid_n=512, scan_n=64,
    )
    first, last = curve.samples[0], curve.samples[-1]
    assert abs(first.global_sup - 2.0) <= 0.05
    assert last.r_alpha is not None and abs(last.r_alpha - 1.0) <= 0.05
    sups = [s.global_sup for s in curve.samples]
    assert all(a >= b for a, b in zip(sups, sups[1:]))  # observed, not asserted theory


def test_r_alpha_hypothesis_violations_detected():
    with pytest.raises(HypothesisError):
        r_alpha_curve(parse("sin(t)"), 0.0, 4.0 * math.pi, math.pi / 2.0, 0.5,
                      [0.5], grid_n=256, scan_n=48)  # several roots and extrema
    with pytest.raises(HypothesisError):
        r_alpha_curve(parse("sin(t)"), 0.0, 1.5 * math.pi, 2.8, 0.5,
                      [0.5], grid_n=256, scan_n=48)  # wrong claimed stationary point


# --- memory-kernel velocity scenario ----------------------------------------------


def test_dilation_sine_reports_earlier_zero():
    p = FractionalParams(0.5, 0.0, 1024)
    res = dilation_scenario(parse("sin(t)"), p, [i * math.pi / 12.0 for i in range(1, 13)])
    assert res.zero_time == pytest.approx(math.pi, abs=1e-9)
    assert res.xi is not None and res.xi <= res.zero_time
    assert res.xi_residual <= 1e-8
    assert len(res.rows) == 12


def test_dilation_linear_velocity_never_zero():
    # v = t: the transformed rate is 2 sqrt(t/pi) > 0, no vanishing time
    p = FractionalParams(0.5, 0.0, 512)
    res = dilation_scenario(parse("t"), p, list(np.linspace(0.2, 2.0, 10)))
    for t, val in res.rows:
        assert val == pytest.approx(2.0 * math.sqrt(t / math.pi), rel=1e-10)
    assert res.zero_time is None and res.xi is None


def test_dilation_high_order_matches_classical_rate():
    p = FractionalParams(0.99, 0.0, 2048)
    res = dilation_scenario(parse("sin(t)"), p, list(np.linspace(0.3, 3.0, 8)))
    for t, val in res.rows:
        assert abs(val - math.cos(t)) <= 0.02

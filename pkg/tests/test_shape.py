import math

import numpy as np
import pytest

from fraccalc import (
    FractionalParams,
    HypothesisError,
    WindowSpec,
    comparison_check,
    convexity_equivalence,
    delta_increasing_check,
    monotonicity_certificate,
    parse,
    periodicity_defect,
    property_P_check,
    sample_window_pairs,
    windowed_derivative,
)


@pytest.fixture(scope="module")
def pairs():
    return sample_window_pairs(0.0, 4.0, 0.5, n_pairs=16, seed=0)


def test_pair_sampler_is_deterministic_and_admissible():
    a = sample_window_pairs(0.0, 4.0, 0.5, n_pairs=32, seed=3)
    b = sample_window_pairs(0.0, 4.0, 0.5, n_pairs=32, seed=3)
    assert a == b
    for p in a:
        assert p.x0 + p.delta < p.y0
        assert p.y0 + p.delta <= 4.0 + 1e-12
    c = sample_window_pairs(0.0, 4.0, 0.5, n_pairs=32, seed=4)
    assert c != a


def test_pair_validation():
    with pytest.raises(ValueError):
        sample_window_pairs(0.0, 0.9, 0.5, n_pairs=4)  # no room for two windows


# --- delta-increasing order ----------------------------------------------------


def test_power_function_rebased_windows_all_equal(pairs):
    # under the re-anchored window convention every window of t^beta yields
    # Gamma(1+beta)/Gamma(beta-alpha+1) * delta^(beta-alpha): equality holds
    beta, al, delta = 2.0, 0.5, 0.5
    ref = math.gamma(1.0 + beta) / math.gamma(beta - al + 1.0) * delta ** (beta - al)
    f = parse("t^2")
    for x0 in (pairs[0].x0, pairs[0].y0, pairs[3].x0):
        out = windowed_derivative(f, WindowSpec(x0, delta), al, 512, rebase=True)
        assert out.value == pytest.approx(ref, rel=1e-6)
    verdict = delta_increasing_check(f, al, delta, pairs, 512, rebase=True)
    assert verdict.holds is True


def test_quadratic_is_delta_increasing(pairs):
    verdict = delta_increasing_check(parse("t^2"), 0.5, 0.5, pairs, 512)
    assert verdict.holds is True
    assert verdict.witnesses == ()
    # the windowed values increase strictly along x0 in {0, 1, 2}
    vals = [
        windowed_derivative(parse("t^2"), WindowSpec(x0, 0.5), 0.5, 512).value
        for x0 in (0.0, 1.0, 2.0)
    ]
    assert vals[0] < vals[1] < vals[2]


def test_concave_mirror_fails_with_witnesses(pairs):
    verdict = delta_increasing_check(parse("-t^2"), 0.5, 0.5, pairs, 512)
    assert verdict.holds is False
    assert len(verdict.witnesses) == len(pairs)
    for w in verdict.witnesses:
        assert w.margin > 0.0


# --- property (P) ----------------------------------------------------------------


def test_property_P_linear_offsets(pairs):
    # affine functions place the window mean value at delta/(2-alpha) from
    # every window start; at alpha = 1/2 that is 2 delta / 3
    verdict = property_P_check(parse("t"), 0.5, 0.5, pairs, grid_n=512)
    assert verdict.holds is True
    from fraccalc import FractionalParams, mean_value

    p = FractionalParams(0.5, 1.3, 512)
    mv = mean_value(parse("t"), p, 1.8)
    assert mv.xi_sup - 1.3 == pytest.approx(2.0 * 0.5 / 3.0, abs=1e-9)


def test_property_P_rebased_power_ratio(pairs):
    # re-anchored windows of t^beta share offset delta * ratio(beta, alpha)
    beta, al, delta = 2.0, 0.5, 0.5
    ratio = (math.gamma(2.0 - al) * math.gamma(beta + 1.0) / math.gamma(beta + 2.0 - al)) ** (1.0 / beta)
    verdict = property_P_check(parse("t^2"), al, delta, pairs, grid_n=512, rebase=True)
    assert verdict.holds is True
    from fraccalc import FractionalParams, mean_value

    p = FractionalParams(al, 0.0, 512)
    mv = mean_value(parse("t^2"), p, delta)
    assert mv.xi_sup == pytest.approx(delta * ratio, abs=1e-8)


def test_property_P_fails_for_unshifted_quadratic(pairs):
    verdict = property_P_check(parse("t^2"), 0.5, 0.5, pairs, grid_n=512)
    assert verdict.holds is False
    assert verdict.witnesses
    assert verdict.defect > 1e-3  # offsets genuinely drift across windows


def test_property_P_exponential_offsets_are_constant(pairs):
    # the window average of e^t scales by e^(x0), so the mean-value offset
    # log(...) is the same in every window: the exponential family passes
    verdict = property_P_check(parse("exp(t)"), 0.5, 0.5, pairs, grid_n=512)
    assert verdict.holds is True
    assert verdict.defect <= 1e-9


def test_property_P_degenerate_constant_function(pairs):
    verdict = property_P_check(parse("1"), 0.5, 0.5, pairs, grid_n=256)
    assert verdict.holds is True  # constant level constrains nothing


# --- convexity equivalence ---------------------------------------------------------


@pytest.fixture(scope="module")
def pairs8():
    return sample_window_pairs(0.1, 3.1, 0.5, n_pairs=8, seed=1)


def test_convex_quadratic_all_positive(pairs8):
    rc = convexity_equivalence(parse("t^2"), 0.5, 0.5, pairs8, grid_n=512)
    assert rc.property_P_fprime.holds is True  # f' affine passes the gate
    assert rc.convex_sampled is True
    assert rc.delta_incr.holds is True
    assert rc.fprime_xi_monotone.holds is True
    assert rc.equivalence is True
    assert rc.bridge_residual_max <= 1e-6


def test_concave_quadratic_negative_side_agreement(pairs8):
    rc = convexity_equivalence(parse("-t^2"), 0.5, 0.5, pairs8, grid_n=512)
    assert rc.convex_sampled is False
    assert rc.delta_incr.holds is False
    assert rc.equivalence is True  # both sides say "not convex"
    assert rc.bridge_residual_max <= 1e-6


def test_affine_boundary_case_zero_margins(pairs8):
    rc = convexity_equivalence(parse("t"), 0.5, 0.5, pairs8, grid_n=512)
    assert rc.convex_sampled is True
    assert rc.delta_incr.holds is True
    assert rc.fprime_xi_monotone.holds is True
    assert rc.equivalence is True
    assert rc.delta_incr.defect == 0.0
    assert rc.bridge_residual_max <= 1e-9


def test_exp_minus_linear_convex(pairs8):
    # f' = e^t - 1 passes the gate through the exponential offset structure
    rc = convexity_equivalence(parse("exp(t) - 1 - t"), 0.5, 0.5, pairs8, grid_n=512)
    assert rc.property_P_fprime.holds is True
    assert rc.convex_sampled is True
    assert rc.delta_incr.holds is True
    assert rc.equivalence is True
    assert rc.bridge_residual_max <= 1e-6


def test_cubic_gate_fails_inconclusive(pairs8):
    # f' = 3 t^2 does not have translation-invariant offsets, so the
    # equivalence is not asserted either way
    rc = convexity_equivalence(parse("t^3"), 0.5, 0.5, pairs8, grid_n=512)
    assert rc.property_P_fprime.holds is False
    assert rc.equivalence is None


def test_corpus_agreement_when_gate_passes(pairs8):
    for src in ("t^2", "exp(t) - 1 - t", "t", "-t^2"):
        rc = convexity_equivalence(parse(src), 0.5, 0.5, pairs8, grid_n=512)
        if rc.property_P_fprime.holds:
            assert rc.convex_sampled == rc.delta_incr.holds
            assert rc.equivalence is True


# --- step-monotonicity certificate ----------------------------------------------


def test_certificate_linear_function():
    v = monotonicity_certificate(parse("t"), 0.5, 0.1, 1.0, 1024)
    assert v.holds is True
    assert v.info["df0"] == pytest.approx(0.1, abs=1e-14)
    assert v.info["reconstruction_error"] <= 1e-12  # identity is exact for t
    assert v.info["literal_defect"] > 1e-3  # the transform-style form is not


def test_certificate_sine_small_order():
    # at small orders the shifted-derivative hypothesis holds across the grid
    v = monotonicity_certificate(parse("sin(t)"), 0.05, 0.2, math.pi / 2.0, 1024)
    assert v.holds is True
    assert v.info["reconstruction_error"] <= 1e-4


def test_certificate_sine_half_order_hypothesis_gate():
    # at order 1/2 the tau-difference of the derivative changes sign before
    # pi/2, so the certificate reports not-applicable (yet still reconstructs)
    v = monotonicity_certificate(parse("sin(t)"), 0.5, 0.1, math.pi / 2.0, 1024)
    assert v.holds is None
    assert "not applicable" in v.note
    assert v.info["reconstruction_error"] <= 1e-4


def test_certificate_decreasing_not_applicable():
    v = monotonicity_certificate(parse("-t"), 0.5, 0.1, 1.0, 256)
    assert v.holds is None
    assert "first step" in v.note


def test_certificate_reconstruction_halves_under_doubling():
    e1 = monotonicity_certificate(parse("sin(t)"), 0.5, 0.1, math.pi / 2.0, 1024).info[
        "reconstruction_error"
    ]
    e2 = monotonicity_certificate(parse("sin(t)"), 0.5, 0.1, math.pi / 2.0, 2048).info[
        "reconstruction_error"
    ]
    assert e2 <= e1 / 1.8


def test_certificate_validates_tau():
    with pytest.raises(ValueError):
        monotonicity_certificate(parse("t"), 0.5, 1.5, 1.0, 128)


# --- dominated derivative comparison ----------------------------------------------


def test_comparison_linear_pair_holds():
    v = comparison_check(parse("t"), parse("2*t"), 0.5, 1.0, 512)
    assert v.holds is True
    assert v.defect >= 0.0


def test_comparison_equal_functions_degenerate_pass():
    v = comparison_check(parse("sin(t)"), parse("sin(t)"), 0.4, 1.5, 512)
    assert v.holds is True
    assert v.defect == pytest.approx(0.0, abs=1e-12)


def test_comparison_crossing_hypothesis_gate():
    # D^0.5 ordering of t^2 against t flips at x = 0.75, so the hypothesis
    # fails on part of (0, 1] and the verdict is not-applicable
    v = comparison_check(parse("t^2"), parse("t"), 0.5, 1.0, 512)
    assert v.holds is None
    assert v.witnesses
    assert all(w.where[0] > 0.7 for w in v.witnesses)


def test_comparison_requires_matching_base_values():
    with pytest.raises(HypothesisError):
        comparison_check(parse("t + 1"), parse("2*t + 1"), 0.5, 1.0, 128)


def test_comparison_random_ordered_pairs_never_violate_conclusion():
    # g = f + nonnegative increment vanishing at 0; when the sampled
    # hypothesis holds the sampled conclusion must hold as well
    rng = np.random.RandomState(23)
    fs = ["t", "sin(t)", "t*exp(-t)"]
    incs = ["t^2", "t", "1 - exp(-t)"]
    for _ in range(8):
        f_src = fs[rng.randint(len(fs))]
        c = float(rng.uniform(0.1, 2.0))
        inc = incs[rng.randint(len(incs))]
        g_src = f"{f_src} + {c!r}*({inc})"
        v = comparison_check(parse(f_src), parse(g_src), float(rng.uniform(0.2, 0.8)), 1.2, 512)
        assert v.holds is not False


# --- periodicity defect -------------------------------------------------------------


def test_zero_function_zero_defect():
    v = periodicity_defect(parse("0"), 0.5, 1.0, [2.0, 3.0, 4.0], grid_n=256)
    assert v.defect == 0.0


def test_sine_defect_measured_and_decaying():
    tau = 2.0 * math.pi
    ts = np.linspace(tau, 4.0 * tau, 7)
    v = periodicity_defect(parse("sin(t)"), 0.5, tau, ts, grid_n=2048)
    assert v.holds is None  # measurement, not a verdict
    assert v.defect > 0.0
    first = v.info[f"defect@{float(ts[0]):.6g}"]
    last = v.info[f"defect@{float(ts[-1]):.6g}"]
    assert last < first  # memory of the base point fades


def test_wrong_period_rejected():
    with pytest.raises(HypothesisError):
        periodicity_defect(parse("sin(t)"), 0.5, math.pi, [7.0, 8.0], grid_n=256)

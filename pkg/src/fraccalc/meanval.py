"""Fractional mean values and their polynomial estimator.

The mean value of f over [a, x] at order alpha is any point xi in (a, x)
with

    f(xi) * (x - a)^(1 - alpha) / Gamma(2 - alpha) = I^(1-alpha) f(x),

equivalently f(xi) = g(x) where g is the kernel-weighted average

    g(x) = Gamma(2 - alpha) * I^(1-alpha) f(x) * (x - a)^(alpha - 1).

The full preimage f^(-1){g(x)} can be infinite; this module reports the
finite subset it can certify: every root bracketed by a uniform sign
scan, refined by bisection (bracketing is used instead of Newton because
the crossings can be arbitrarily flat).  ``xi_sup`` is the largest one.

For smooth f the supremum near a is also approximated by the roots of an
explicit polynomial in (xi - a) built from the Taylor coefficients of f
at a; its tail is a genuine fractional integral of f^(n+1) and is
computed, not estimated away.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import HypothesisError, MeanValueNotFoundError
from .expr import Expression, derivative_values, derivatives
from .fracops import (
    PRODUCT_TRAPEZOID,
    FractionalParams,
    FuncLike,
    gamma,
    repeated_integral,
    rl_derivative,
    rl_integral,
    _sampler,
)

__all__ = [
    "MeanValueResult",
    "PolynomialEstimate",
    "mean_value",
    "mean_value_polynomial",
    "xi_smoothness_profile",
    "mean_path_witness",
]


@dataclass(frozen=True)
class MeanValueResult:
    """Certified mean values of f over (a, x).

    ``lambda_set`` holds the bracketed roots in ascending order with
    matching ``residuals`` |f(xi) - g(x)|.  A constant-level case (f is
    indistinguishable from g(x) across the whole scan) is flagged
    ``degenerate`` instead of pretending to a root list.
    """

    target_g: float
    lambda_set: Tuple[float, ...]
    residuals: Tuple[float, ...]
    xi_sup: Optional[float]
    degenerate: bool = False


@dataclass(frozen=True)
class PolynomialEstimate:
    """Polynomial surrogate for the mean value near the base point.

    ``coefficients[j]`` multiplies (xi - a)^j; ``remainder_term`` is the
    computed fractional-integral tail of the truncated series, and
    ``reliable`` is False when that tail dominates the retained terms.
    """

    coefficients: Tuple[float, ...]
    remainder_term: float
    roots_in_range: Tuple[float, ...]
    n: int
    delta: float
    reliable: bool = True


def _bisect(fn: Callable[[float], float], lo: float, hi: float, flo: float, tol: float) -> float:
    """Sign-change bisection; assumes fn(lo) = flo and fn(hi) opposes it."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid == lo or mid == hi:
            break
        fmid = fn(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_roots(
    fn_vec: Callable[[np.ndarray], np.ndarray],
    fn_scalar: Callable[[float], float],
    lo: float,
    hi: float,
    n_points: int,
    tol: float,
) -> List[float]:
    """Roots of fn on the open interval (lo, hi) found by scan + bisection."""
    ts = lo + (hi - lo) * np.arange(1, n_points + 1) / (n_points + 1)
    vals = fn_vec(ts)
    roots: List[float] = []
    for i in range(len(ts)):
        if vals[i] == 0.0:
            roots.append(float(ts[i]))
    for i in range(len(ts) - 1):
        if vals[i] == 0.0 or vals[i + 1] == 0.0:
            continue
        if (vals[i] > 0.0) != (vals[i + 1] > 0.0):
            roots.append(_bisect(fn_scalar, float(ts[i]), float(ts[i + 1]), float(vals[i]), tol))
    return sorted(roots)


def mean_value(
    f: FuncLike,
    p: FractionalParams,
    x: float,
    scan_n: int = 128,
    *,
    backend: str = PRODUCT_TRAPEZOID,
    bisect_rel: float = 1e-12,
    degenerate_rel: float = 1e-12,
) -> MeanValueResult:
    """All bracketed mean values of f over (p.a, x) and their supremum.

    Raises :class:`~fraccalc.errors.MeanValueNotFoundError` when the scan
    brackets nothing and the level is not degenerate; absence is reported,
    never fabricated.
    """
    if scan_n < 16:
        raise ValueError("scan_n must be >= 16")
    if not x > p.a:
        raise ValueError(f"need x > a, got x={x!r}, a={p.a!r}")
    sample = _sampler(f)
    iv = rl_integral(f, p, 1.0 - p.alpha, x, backend=backend)
    g = gamma(2.0 - p.alpha) * iv.value * (x - p.a) ** (p.alpha - 1.0)

    fn_vec = lambda ts: sample(ts) - g  # noqa: E731
    fn_scalar = lambda s: float(sample(np.asarray([s]))[0]) - g  # noqa: E731

    ts = p.a + (x - p.a) * np.arange(1, scan_n + 2) / (scan_n + 2)
    vals = fn_vec(ts)
    level_scale = 1.0 + abs(g)
    if float(np.max(np.abs(vals))) <= degenerate_rel * level_scale:
        return MeanValueResult(g, (), (), None, degenerate=True)

    roots = _scan_roots(fn_vec, fn_scalar, p.a, x, scan_n + 1, bisect_rel * (x - p.a))
    if not roots:
        raise MeanValueNotFoundError(
            f"no crossing of the level g(x)={g!r} found on ({p.a!r}, {x!r}) "
            f"with {scan_n + 1} scan points"
        )
    residuals = tuple(abs(fn_scalar(r)) for r in roots)
    return MeanValueResult(g, tuple(roots), residuals, roots[-1])


def mean_value_polynomial(
    f: Expression,
    p: FractionalParams,
    delta: float,
    n: int,
    *,
    scan_n: int = 256,
) -> PolynomialEstimate:
    """Degree-n polynomial in (xi - a) whose roots estimate the mean value.

    Built from the jet of f at a: the coefficient of x^j (j >= 1) is
    f^(j)(a) delta^(1-alpha) / (Gamma(2-alpha) j!) and the constant term
    collects the series terms -f^(j)(a) delta^(j+1-alpha) / Gamma(j+2-alpha)
    together with the computed tail I^(n+2-alpha) f^(n+1) at a + delta.
    For polynomial f of degree <= n the surrogate is exact.
    """
    if n < 1:
        raise ValueError("polynomial order n must be >= 1")
    if not delta > 0.0:
        raise ValueError("delta must be > 0")
    a, alpha = p.a, p.alpha
    jet = derivatives(f, a, n)
    d_pow = delta ** (1.0 - alpha)

    coeffs = [0.0] * (n + 1)
    series_terms = []
    for j in range(1, n + 1):
        fj = jet.derivative(j)
        coeffs[j] = fj * d_pow / (gamma(2.0 - alpha) * math.factorial(j))
        series_terms.append(fj * delta ** (j + 1.0 - alpha) / gamma(j + 2.0 - alpha))

    f_top = lambda ts: derivative_values(f, ts, n + 1)  # noqa: E731
    remainder = repeated_integral(f_top, a, a + delta, n + 2.0 - alpha, p.grid_n).value
    coeffs[0] = -sum(series_terms) - remainder

    largest_term = max((abs(s) for s in series_terms), default=0.0)
    if largest_term == 0.0:
        reliable = remainder == 0.0
    else:
        reliable = abs(remainder) <= largest_term
    if not reliable:
        warnings.warn(
            "mean-value polynomial: the integral tail exceeds every retained "
            "series term; the root estimate is unreliable at this (delta, n)",
            stacklevel=2,
        )

    carr = np.asarray(coeffs)
    poly_vec = lambda xs: np.polynomial.polynomial.polyval(xs, carr)  # noqa: E731
    poly_scalar = lambda s: float(np.polynomial.polynomial.polyval(s, carr))  # noqa: E731
    roots = _scan_roots(poly_vec, poly_scalar, 0.0, delta, scan_n, 1e-14 * delta)
    return PolynomialEstimate(tuple(coeffs), remainder, tuple(roots), n, delta, reliable)


def check_strictly_monotone(f: FuncLike, lo: float, hi: float, samples: int = 512) -> int:
    """Return +1/-1 for strictly increasing/decreasing on (lo, hi) by sampling."""
    ts = np.linspace(lo, hi, samples)[1:]
    vals = _sampler(f)(ts)
    diffs = np.diff(vals)
    if np.all(diffs > 0.0):
        return 1
    if np.all(diffs < 0.0):
        return -1
    raise HypothesisError(
        f"function is not strictly monotone on ({lo!r}, {hi!r}) "
        "(checked on a sample grid)"
    )


def xi_smoothness_profile(
    f: FuncLike,
    p: FractionalParams,
    x_grid: Sequence[float],
    *,
    scan_n: int = 128,
    backend: str = PRODUCT_TRAPEZOID,
) -> List[Tuple[float, float, float]]:
    """Tabulate x, xi_sup(x) and a finite-difference slope of xi_sup.

    Requires f strictly monotone (sampled check); the returned slopes are
    the numerical probe of the claim that the mean value varies
    continuously differentiably with x.
    """
    xs = [float(x) for x in x_grid]
    if len(xs) < 3:
        raise ValueError("need at least 3 grid points for slopes")
    if sorted(xs) != xs:
        raise ValueError("x_grid must be ascending")
    check_strictly_monotone(f, p.a, xs[-1])
    xis = [mean_value(f, p, x, scan_n, backend=backend).xi_sup for x in xs]
    rows: List[Tuple[float, float, float]] = []
    for i, x in enumerate(xs):
        if i == 0:
            slope = (xis[1] - xis[0]) / (xs[1] - xs[0])
        elif i == len(xs) - 1:
            slope = (xis[-1] - xis[-2]) / (xs[-1] - xs[-2])
        else:
            slope = (xis[i + 1] - xis[i - 1]) / (xs[i + 1] - xs[i - 1])
        rows.append((x, xis[i], slope))
    return rows


def mean_path_witness(
    f: Expression,
    h: Expression,
    p: FractionalParams,
    x_grid: Sequence[float],
    *,
    allow_nonzero_base: bool = False,
    fd_step: Optional[float] = None,
) -> Optional[float]:
    """Search for a point where D^alpha f matches the derivative of the
    reparametrised average x -> f(h(x)) (x-a)^(1-alpha) / Gamma(2-alpha).

    Returns a refined root of the difference, or None when the grid shows
    no sign change; None is a legitimate outcome (the existence statement
    needs h to have an interior extremum that touches the mean value).
    """
    xs = np.asarray([float(x) for x in x_grid])
    if np.any(xs <= p.a):
        raise ValueError("x_grid must lie strictly right of the base point")
    a, alpha = p.a, p.alpha
    s = fd_step if fd_step is not None else 1e-6 * (float(xs[-1]) - a)
    scale = 1.0 / gamma(2.0 - alpha)

    def reparam(x: np.ndarray) -> np.ndarray:
        hx = np.asarray(h.eval(x), dtype=float)
        return np.asarray(f.eval(hx), dtype=float) * (x - a) ** (1.0 - alpha) * scale

    def residual(x: float) -> float:
        d = rl_derivative(f, p, x, allow_nonzero_base=allow_nonzero_base).value
        x_arr = np.asarray([x - s, x + s])
        lo, hi = reparam(x_arr)
        return d - (hi - lo) / (2.0 * s)

    vals = [residual(float(x)) for x in xs]
    for i in range(len(xs) - 1):
        if vals[i] == 0.0:
            return float(xs[i])
        if (vals[i] > 0.0) != (vals[i + 1] > 0.0):
            return _bisect(residual, float(xs[i]), float(xs[i + 1]), vals[i], 1e-10 * (xs[-1] - a))
    if vals[-1] == 0.0:
        return float(xs[-1])
    return None

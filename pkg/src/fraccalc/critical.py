"""Fractional critical points: roots of x -> D^alpha f(x).

The module locates such roots by a sign scan plus bisection, realises
the existence construction (every interior zero of f is preceded by a
zero of its fractional derivative), probes the order-duality identity
for monotone functions, and traces the migration curve r(alpha): the
largest critical point near a chosen centre, which drifts from the root
of f (orders near 0) to the classical stationary point (orders near 1).

All derivative evaluations go through the Caputo form I^(1-alpha) f', so
the f(a) = 0 convention is enforced once per operation; root residuals
then measure only the solver, not numerical differentiation noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import HypothesisError, SolverError
from .expr import Expression, derivative_values
from .fracops import (
    FractionalParams,
    FuncLike,
    base_value,
    rl_derivative,
    _kernel_quad_grid,
    _prime_sampler,
    _sampler,
)
from .meanval import _bisect, check_strictly_monotone, mean_value

__all__ = [
    "CriticalPointReport",
    "RAlphaSample",
    "RAlphaCurve",
    "DerivativeZeroResult",
    "OrderDualityResult",
    "DilationResult",
    "critical_points",
    "order_duality_check",
    "derivative_zero_before",
    "r_alpha_curve",
    "dilation_scenario",
]

#: sweeps never touch the endpoint orders; limits are probed by approach
ALPHA_MIN, ALPHA_MAX = 0.01, 0.99


@dataclass(frozen=True)
class CriticalPointReport:
    alpha: float
    roots: Tuple[float, ...]
    residuals: Tuple[float, ...]
    method_grid_n: int


@dataclass(frozen=True)
class RAlphaSample:
    alpha: float
    r_alpha: Optional[float]       # largest critical point inside the ball, if any
    global_sup: Optional[float]    # largest critical point anywhere in (a, b]


@dataclass(frozen=True)
class RAlphaCurve:
    center_x0: float
    radius_eps: float
    samples: Tuple[RAlphaSample, ...]
    limit_targets: Tuple[float, float]  # (root of f, stationary point of f)
    gap_low_alpha: Optional[float]      # |global_sup(alpha_min) - root|
    gap_high_alpha: Optional[float]     # |r_alpha(alpha_max) - stationary point|


@dataclass(frozen=True)
class DerivativeZeroResult:
    xi: float
    residual: float
    degenerate: bool = False


@dataclass(frozen=True)
class OrderDualityResult:
    level_residual: float   # |f(xi(x)) - (x - a)^alpha|
    d_value: float          # D^(1-alpha) f(x)


@dataclass(frozen=True)
class DilationResult:
    rows: Tuple[Tuple[float, float], ...]  # (t, V(t))
    zero_time: Optional[float]             # first root of v located on the grid
    xi: Optional[float]                    # earlier vanishing time of V
    xi_residual: Optional[float]


def _d_alpha_factory(
    f: FuncLike,
    p: FractionalParams,
    *,
    fprime: Optional[FuncLike] = None,
    allow_nonzero_base: bool = False,
) -> Callable[[float], float]:
    """Fast x -> D^alpha f(x) with the base-value check done once."""
    base_value(f, p.a, allow_nonzero=allow_nonzero_base)
    fp = _prime_sampler(f, fprime)
    mu = 1.0 - p.alpha
    n = p.grid_n

    def d(x: float) -> float:
        return _kernel_quad_grid(fp, p.a, x, mu, n)[0]

    return d


def critical_points(
    f: FuncLike,
    p: FractionalParams,
    b: float,
    scan_n: int = 96,
    *,
    fprime: Optional[FuncLike] = None,
    allow_nonzero_base: bool = False,
    bracket_rel: float = 1e-10,
) -> CriticalPointReport:
    """Roots of D^alpha f on (a, b], bracketed on a scan and bisected."""
    if not b > p.a:
        raise ValueError(f"need b > a, got b={b!r}, a={p.a!r}")
    if scan_n < 4:
        raise ValueError("scan_n must be >= 4")
    d = _d_alpha_factory(f, p, fprime=fprime, allow_nonzero_base=allow_nonzero_base)
    xs = p.a + (b - p.a) * np.arange(1, scan_n + 1) / scan_n
    vals = np.asarray([d(float(x)) for x in xs])
    tol = bracket_rel * (b - p.a)
    roots: List[float] = []
    for i in range(scan_n):
        if vals[i] == 0.0:
            roots.append(float(xs[i]))
    for i in range(scan_n - 1):
        if vals[i] == 0.0 or vals[i + 1] == 0.0:
            continue
        if (vals[i] > 0.0) != (vals[i + 1] > 0.0):
            roots.append(_bisect(d, float(xs[i]), float(xs[i + 1]), float(vals[i]), tol))
    roots = sorted(roots)
    residuals = tuple(abs(d(r)) for r in roots)
    return CriticalPointReport(p.alpha, tuple(roots), residuals, p.grid_n)


def order_duality_check(f: FuncLike, p: FractionalParams, x: float) -> OrderDualityResult:
    """Residual pair for the duality between mean-value level crossings of
    (x - a)^alpha and roots of the order-(1 - alpha) derivative.

    Returns |f(xi(x)) - (x - a)^alpha| with xi taken from the mean value
    of the order-alpha integral (so the companion operator order is
    1 - alpha), together with D^(1-alpha) f(x).  The tested predicate is
    that both are zero together or nonzero together; for strictly
    monotone f vanishing at a both quantities stay one-signed away from
    the base point, so the nonzero branch is the live one.
    """
    if not x > p.a:
        raise ValueError(f"need x > a, got x={x!r}, a={p.a!r}")
    check_strictly_monotone(f, p.a, x)
    # mean value attached to I^alpha means the params order flips to 1 - alpha
    p_flip = FractionalParams(1.0 - p.alpha, p.a, p.grid_n)
    mv = mean_value(f, p_flip, x)
    if mv.degenerate or mv.xi_sup is None:
        raise HypothesisError("mean value degenerate; duality check undefined")
    fxi = float(_sampler(f)(np.asarray([mv.xi_sup]))[0])
    level_residual = abs(fxi - (x - p.a) ** p.alpha)
    d = rl_derivative(f, p_flip, x).value
    return OrderDualityResult(level_residual, d)


def derivative_zero_before(
    f: FuncLike,
    p: FractionalParams,
    x_zero: float,
    *,
    fprime: Optional[FuncLike] = None,
    scan_n: int = 96,
    zero_tol: float = 1e-10,
    max_refinements: int = 3,
) -> DerivativeZeroResult:
    """A point xi in (a, x_zero] where D^alpha f vanishes, given f(x_zero) = 0.

    Existence is guaranteed, so an empty search is a solver failure (the
    scan is refined a few times before giving up), not a valid answer.
    """
    fx = float(_sampler(f)(np.asarray([x_zero]))[0])
    if abs(fx) > zero_tol:
        raise HypothesisError(f"f(x_zero) = {fx!r} is not 0 within {zero_tol!r}")
    d = _d_alpha_factory(f, p, fprime=fprime)
    span = x_zero - p.a

    n = scan_n
    best_x, best_val = None, math.inf
    for _ in range(max_refinements + 1):
        xs = p.a + span * np.arange(1, n + 1) / n
        vals = np.asarray([d(float(x)) for x in xs])
        scale = float(np.max(np.abs(vals)))
        if scale <= 1e-13:
            return DerivativeZeroResult(float(xs[0]), abs(float(vals[0])), degenerate=True)
        hits = [float(xs[i]) for i in range(n) if vals[i] == 0.0]
        for i in range(n - 1):
            if vals[i] != 0.0 and vals[i + 1] != 0.0 and (vals[i] > 0.0) != (vals[i + 1] > 0.0):
                hits.append(_bisect(d, float(xs[i]), float(xs[i + 1]), float(vals[i]), 1e-12 * span))
        if hits:
            xi = max(hits)
            return DerivativeZeroResult(xi, abs(d(xi)))
        k = int(np.argmin(np.abs(vals)))
        if abs(float(vals[k])) < best_val:
            best_x, best_val = float(xs[k]), abs(float(vals[k]))
        n *= 4
    # no sign change anywhere: accept a tangent root at the endpoint scale,
    # otherwise report the resolution failure (existence is not in doubt)
    if best_x is not None and best_val <= 1e-8 * scale:
        return DerivativeZeroResult(best_x, best_val)
    raise SolverError(
        f"no root of D^alpha f found on ({p.a!r}, {x_zero!r}] after refining "
        f"to {n // 4} scan points; existence is guaranteed, so this is a "
        "resolution failure"
    )


def _verify_single_extremum_and_root(
    f: FuncLike, a: float, b: float, x0: float, x1: Optional[float], *, samples: int = 2048
) -> Tuple[float, float]:
    """Sampled check that f has exactly one stationary point and one root
    in (a, b], close to the claimed x0 (and x1 when given); returns the
    detected locations."""
    sample = _sampler(f)
    ts = np.linspace(a, b, samples + 1)[1:]
    vals = sample(ts)
    if isinstance(f, Expression):
        dvals = derivative_values(f, ts, 1)
    else:
        h = (b - a) / (4.0 * samples)
        dvals = (sample(ts + h) - sample(ts - h)) / (2.0 * h)

    def zero_events(arr: np.ndarray) -> List[float]:
        locs = [float(ts[i]) for i in range(len(arr)) if arr[i] == 0.0]
        for i in range(len(arr) - 1):
            if arr[i] != 0.0 and arr[i + 1] != 0.0 and (arr[i] > 0.0) != (arr[i + 1] > 0.0):
                locs.append(float(0.5 * (ts[i] + ts[i + 1])))
        return sorted(locs)

    ext = zero_events(dvals)
    roots = zero_events(vals)
    if (
        vals[-1] != 0.0
        and abs(float(vals[-1])) <= 1e-9 * max(1.0, float(np.max(np.abs(vals))))
    ):
        roots.append(float(ts[-1]))  # root sitting on the right endpoint
    if len(ext) != 1:
        raise HypothesisError(f"expected exactly one stationary point in ({a}, {b}), found {len(ext)}")
    if len(roots) != 1:
        raise HypothesisError(f"expected exactly one root of f in ({a}, {b}], found {len(roots)}")
    coarse = (b - a) / 16.0
    if abs(ext[0] - x0) > coarse:
        raise HypothesisError(f"claimed stationary point {x0!r} is far from detected {ext[0]!r}")
    if x1 is not None and abs(roots[0] - x1) > coarse:
        raise HypothesisError(f"claimed root {x1!r} is far from detected {roots[0]!r}")
    return ext[0], roots[0]


def r_alpha_curve(
    f: FuncLike,
    a: float,
    b: float,
    x0: float,
    eps: float,
    alpha_grid: Sequence[float],
    *,
    x1: Optional[float] = None,
    grid_n: int = 1024,
    scan_n: int = 96,
    fprime: Optional[FuncLike] = None,
) -> RAlphaCurve:
    """Trace alpha -> r(alpha), the largest critical point near x0.

    For each order the ball-restricted supremum over B(x0, eps) is
    recorded (None when the ball holds no critical point: the quantity is
    defined conditionally) together with the unrestricted largest critical
    point in (a, b], whose low-order limit is checked against the root x1
    while the ball-restricted high-order limit is checked against x0.
    ``x1`` may be omitted; the unique root is then located by sampling.
    """
    if not eps > 0.0:
        raise ValueError("eps must be > 0")
    x0_ref, x1_ref = _verify_single_extremum_and_root(f, a, b, x0, x1)
    alphas = sorted(min(max(float(al), ALPHA_MIN), ALPHA_MAX) for al in alpha_grid)
    samples: List[RAlphaSample] = []
    for al in alphas:
        p = FractionalParams(al, a, grid_n)
        report = critical_points(f, p, b, scan_n, fprime=fprime)
        in_ball = [r for r in report.roots if abs(r - x0) <= eps]
        samples.append(
            RAlphaSample(
                al,
                max(in_ball) if in_ball else None,
                max(report.roots) if report.roots else None,
            )
        )
    gap_low = None
    if samples and samples[0].global_sup is not None:
        gap_low = abs(samples[0].global_sup - x1_ref)
    gap_high = None
    if samples and samples[-1].r_alpha is not None:
        gap_high = abs(samples[-1].r_alpha - x0_ref)
    return RAlphaCurve(x0, eps, tuple(samples), (x1_ref, x0_ref), gap_low, gap_high)


def dilation_scenario(
    v: FuncLike,
    p: FractionalParams,
    t_grid: Sequence[float],
    *,
    fprime: Optional[FuncLike] = None,
) -> DilationResult:
    """Tabulate V(t) = D^alpha v(t), the rate seen through a memory kernel.

    If the plain rate v vanishes at some time t* on the grid range, the
    transformed rate V is guaranteed to vanish no later; the scenario
    reports that earlier time xi <= t* alongside the table.
    """
    ts = [float(t) for t in t_grid]
    if any(t <= p.a for t in ts):
        raise ValueError("t_grid must lie strictly right of the base point")
    d = _d_alpha_factory(v, p, fprime=fprime)
    rows = tuple((t, d(t)) for t in ts)

    sample = _sampler(v)
    vvals = np.asarray([float(sample(np.asarray([t]))[0]) for t in ts])
    zero_time = None
    vscale = float(np.max(np.abs(vvals))) or 1.0
    for i, t in enumerate(ts):
        if abs(vvals[i]) <= 1e-10 * vscale:
            zero_time = t
            break
        if i and (vvals[i - 1] > 0.0) != (vvals[i] > 0.0):
            fn = lambda s: float(sample(np.asarray([s]))[0])  # noqa: E731
            zero_time = _bisect(fn, ts[i - 1], t, float(vvals[i - 1]), 1e-12 * (ts[-1] - p.a))
            break
    if zero_time is None:
        return DilationResult(rows, None, None, None)
    res = derivative_zero_before(
        v, p, zero_time, fprime=fprime, zero_tol=max(1e-10, 1e-9 * vscale)
    )
    return DilationResult(rows, zero_time, res.xi, res.residual)

"""Fractional critical points and how they migrate with the order.

A fractional critical point is a root of x -> D^alpha f(x).  Near order
1 it sits by the classical stationary point; near order 0 it drifts to a
root of the function itself.  The script finds the points, realises the
guarantee that a zero of f is preceded by a zero of D^alpha f, traces
the migration curve, and runs the memory-kernel velocity preset.
"""

import math

import numpy as np

from fraccalc import (
    FractionalParams,
    critical_points,
    dilation_scenario,
    parse,
    r_alpha_curve,
    derivative_zero_before,
)

f = parse("sin(t)")

print("critical points of sin on (0, pi]:")
for al in (0.1, 0.5, 0.9):
    rep = critical_points(f, FractionalParams(al, 0.0, 1024), math.pi, 64)
    roots = ", ".join(f"{r:.6f}" for r in rep.roots)
    print(f"  alpha = {al}   roots: {roots}")
print(f"  (stationary point pi/2 = {math.pi / 2:.6f}, root pi = {math.pi:.6f})")

# sin vanishes at pi, so some xi <= pi must already zero the half-order
# derivative; for the parabola t(1-t) that xi is exactly (2 - alpha)/2.
res = derivative_zero_before(f, FractionalParams(0.5, 0.0, 1024), math.pi)
print(f"\nexistence point for sin, x_zero = pi: xi = {res.xi:.8f}  |D f(xi)| = {res.residual:.1e}")
for al in (0.25, 0.5, 0.75):
    res = derivative_zero_before(parse("t*(1 - t)"), FractionalParams(al, 0.0, 1024), 1.0)
    print(f"  t(1-t), alpha = {al}: xi = {res.xi:.10f}   (closed form {(2 - al) / 2})")

# The migration curve r(alpha): largest critical point inside a ball
# around the stationary point, plus the unrestricted largest one.
curve = r_alpha_curve(f, 0.0, 1.5 * math.pi, math.pi / 2, 0.5,
                      np.linspace(0.01, 0.99, 9), grid_n=1024, scan_n=96)
print("\nmigration curve for sin on (0, 3 pi/2]:")
print("  alpha     in-ball r(alpha)    global largest")
for s in curve.samples:
    ball = f"{s.r_alpha:.6f}" if s.r_alpha is not None else "   --   "
    print(f"  {s.alpha:5.3f}     {ball:>10s}       {s.global_sup:.6f}")
x1, x0 = curve.limit_targets
print(f"  low-order end vs root {x1:.4f}: gap {curve.gap_low_alpha:.4f}")
print(f"  high-order end vs stationary {x0:.4f}: gap {curve.gap_high_alpha:.4f}")

# Velocity seen through a memory kernel: if the plain rate v = sin
# vanishes at pi, the transformed rate V = D^alpha v vanishes earlier.
res = dilation_scenario(parse("sin(t)"), FractionalParams(0.5, 0.0, 1024),
                        [k * math.pi / 8 for k in range(1, 9)])
print("\nmemory-kernel velocity table (v = sin, order 1/2):")
for t, v in res.rows:
    print(f"  t = {t:6.4f}   V = {v:+.6f}")
print(f"  v vanishes at {res.zero_time:.6f}; V already vanished at {res.xi:.6f}")

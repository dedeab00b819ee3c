"""Command-line front end.

Every command takes an expression in ``t`` via ``--f``, dispatches to the
library and prints either an aligned table or machine-readable CSV
(``--output csv``).  CSV carries a header row, data rows with all numbers
at 17 significant digits (bit-exact on re-parse), and trailing ``#``
comment lines echoing the configuration and error-estimate summaries.
Runs with identical flags (including ``--seed``) are byte-identical.

Exit codes: 0 success, 1 usage error (bad flags or expression), 2
computation error (domain or assumption violation), 3 self-test failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .critical import critical_points, dilation_scenario, r_alpha_curve
from .errors import (
    AssumptionError,
    DomainError,
    FracCalcError,
    HypothesisError,
    MeanValueNotFoundError,
    ParseError,
    SolverError,
)
from .expr import parse
from .fracops import (
    FractionalParams,
    gamma,
    integral_on_grid,
    f_lower,
    rl_derivative,
    rl_integral,
)
from .meanval import mean_value, mean_value_polynomial
from .shape import (
    convexity_equivalence,
    monotonicity_certificate,
    periodicity_defect,
    sample_window_pairs,
)

ALPHA_CLIP = (0.01, 0.99)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise _UsageError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


class Report:
    """Collects rows plus comment lines; renders as table or CSV."""

    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        self.rows: List[List[str]] = []
        self.comments: List[str] = []

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError("row width mismatch")
        self.rows.append([_fmt(v) for v in values])

    def comment(self, text: str):
        self.comments.append(text)

    def echo_config(self, args: argparse.Namespace):
        skip = {"handler", "output"}
        parts = []
        for key in sorted(vars(args)):
            if key in skip:
                continue
            parts.append(f"{key}={_fmt(getattr(args, key))}")
        self.comment("config " + " ".join(parts))
        self.comment(f"fraccalc {__version__}")

    def render(self, output: str) -> str:
        if output == "csv":
            lines = [",".join(self.columns)]
            lines += [",".join(row) for row in self.rows]
            lines += [f"# {c}" for c in self.comments]
            return "\n".join(lines) + "\n"
        widths = [len(c) for c in self.columns]
        for row in self.rows:
            widths = [max(w, len(v)) for w, v in zip(widths, row)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(self.columns, widths)).rstrip()]
        lines.append("  ".join("-" * w for w in widths))
        for row in self.rows:
            lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
        lines += [f"[{c}]" for c in self.comments]
        return "\n".join(lines) + "\n"


def _alpha_list(text: str, *, sweep_ok: bool) -> List[float]:
    if ":" in text:
        if not sweep_ok:
            raise _UsageError("this command takes a single --alpha, not a sweep")
        parts = text.split(":")
        if len(parts) != 3:
            raise _UsageError("alpha sweep must be start:stop:count")
        try:
            start, stop = float(parts[0]), float(parts[1])
            count = int(parts[2])
        except ValueError:
            raise _UsageError(f"bad alpha sweep {text!r}") from None
        if count < 1:
            raise _UsageError("alpha sweep count must be >= 1")
        lo, hi = ALPHA_CLIP
        grid = np.linspace(start, stop, count) if count > 1 else np.asarray([start])
        return [float(min(max(a, lo), hi)) for a in grid]
    try:
        return [float(text)]
    except ValueError:
        raise _UsageError(f"bad alpha value {text!r}") from None


def _emit(report: Report, args) -> int:
    sys.stdout.write(report.render(args.output))
    return 0


# ---------------------------------------------------------------------------
# command handlers


def _cmd_fracint(args) -> int:
    f = parse(args.f)
    rep = Report(["alpha", "x", "value", "est_error"])
    worst = 0.0
    for al in _alpha_list(args.alpha, sweep_ok=True):
        p = FractionalParams(al, args.a, args.grid_n)
        out = rl_integral(f, p, al, args.x)
        worst = max(worst, out.est_error)
        rep.add(al, args.x, out.value, out.est_error)
    rep.comment(f"est_error_max {_fmt(worst)}")
    rep.echo_config(args)
    return _emit(rep, args)


def _cmd_fracderiv(args) -> int:
    f = parse(args.f)
    rep = Report(["alpha", "x", "value", "est_error"])
    worst = 0.0
    for al in _alpha_list(args.alpha, sweep_ok=True):
        p = FractionalParams(al, args.a, args.grid_n)
        out = rl_derivative(f, p, args.x, allow_nonzero_base=args.allow_nonzero_base)
        worst = max(worst, out.est_error)
        rep.add(al, args.x, out.value, out.est_error)
    rep.comment(f"est_error_max {_fmt(worst)}")
    rep.echo_config(args)
    return _emit(rep, args)


def _cmd_meanvalue(args) -> int:
    f = parse(args.f)
    (al,) = _alpha_list(args.alpha, sweep_ok=False)
    p = FractionalParams(al, args.a, args.grid_n)
    res = mean_value(f, p, args.x, args.scan_n)
    rep = Report(["alpha", "x", "xi", "residual", "is_sup"])
    if res.degenerate:
        rep.comment("degenerate level: f matches g(x) across the whole scan")
    for xi, r in zip(res.lambda_set, res.residuals):
        rep.add(al, args.x, xi, r, xi == res.xi_sup)
    rep.comment(f"target_g {_fmt(res.target_g)}")
    if res.xi_sup is not None:
        rep.comment(f"xi_sup {_fmt(res.xi_sup)}")
    rep.echo_config(args)
    return _emit(rep, args)


def _cmd_polyxi(args) -> int:
    f = parse(args.f)
    (al,) = _alpha_list(args.alpha, sweep_ok=False)
    p = FractionalParams(al, args.a, args.grid_n)
    est = mean_value_polynomial(f, p, args.delta, args.n)
    rep = Report(["kind", "index", "value"])
    for j, c in enumerate(est.coefficients):
        rep.add("coefficient", j, c)
    for i, r in enumerate(est.roots_in_range):
        rep.add("root", i, r)
    rep.add("remainder", "", est.remainder_term)
    rep.comment(f"reliable {_fmt(est.reliable)}")
    rep.echo_config(args)
    return _emit(rep, args)


def _cmd_critpoints(args) -> int:
    f = parse(args.f)
    rep = Report(["alpha", "root", "residual"])
    for al in _alpha_list(args.alpha, sweep_ok=True):
        p = FractionalParams(al, args.a, args.grid_n)
        report = critical_points(
            f, p, args.b, args.scan_n, allow_nonzero_base=args.allow_nonzero_base
        )
        if not report.roots:
            rep.comment(f"alpha={_fmt(al)}: no critical points in (a, b]")
        for root, resid in zip(report.roots, report.residuals):
            rep.add(al, root, resid)
    rep.echo_config(args)
    return _emit(rep, args)


def _cmd_ralpha(args) -> int:
    f = parse(args.f)
    alphas = _alpha_list(args.alpha, sweep_ok=True)
    curve = r_alpha_curve(
        f, args.a, args.b, args.x0, args.eps, alphas,
        grid_n=args.grid_n, scan_n=args.scan_n,
    )
    rep = Report(["alpha", "r_alpha", "global_sup"])
    for s in curve.samples:
        rep.add(s.alpha, s.r_alpha, s.global_sup)
    x1, x0 = curve.limit_targets
    rep.comment(f"detected_root {_fmt(x1)} detected_stationary {_fmt(x0)}")
    rep.comment(f"gap_low_alpha {_fmt(curve.gap_low_alpha)} gap_high_alpha {_fmt(curve.gap_high_alpha)}")
    rep.echo_config(args)
    return _emit(rep, args)


def _cmd_dilation(args) -> int:
    v = parse(args.f)
    (al,) = _alpha_list(args.alpha, sweep_ok=False)
    p = FractionalParams(al, args.a, args.grid_n)
    ts = [args.a + (args.b - args.a) * i / args.scan_n for i in range(1, args.scan_n + 1)]
    res = dilation_scenario(v, p, ts)
    rep = Report(["t", "V"])
    for t, val in res.rows:
        rep.add(t, val)
    if res.zero_time is not None:
        rep.comment(f"zero_time {_fmt(res.zero_time)}")
        rep.comment(f"xi {_fmt(res.xi)} residual {_fmt(res.xi_residual)}")
    else:
        rep.comment("no vanishing time of v on the grid")
    rep.echo_config(args)
    return _emit(rep, args)


def _cmd_convexity(args) -> int:
    f = parse(args.f)
    (al,) = _alpha_list(args.alpha, sweep_ok=False)
    pairs = sample_window_pairs(args.a, args.b, args.delta, n_pairs=args.pairs, seed=args.seed)
    rc = convexity_equivalence(f, al, args.delta, pairs, grid_n=args.grid_n, scan_n=args.scan_n)
    rep = Report(["check", "holds", "value"])
    rep.add("convex_sampled", rc.convex_sampled, "")
    rep.add("delta_increasing", rc.delta_incr.holds, rc.delta_incr.defect)
    rep.add("fprime_xi_monotone", rc.fprime_xi_monotone.holds, rc.fprime_xi_monotone.defect)
    rep.add("property_P_fprime", rc.property_P_fprime.holds, rc.property_P_fprime.defect)
    rep.add("bridge_residual_max", "", rc.bridge_residual_max)
    rep.add("equivalence", rc.equivalence, "")
    for v in (rc.delta_incr.witnesses + rc.fprime_xi_monotone.witnesses)[:8]:
        rep.comment(f"witness windows {v.where} margin {_fmt(v.margin)}")
    if rc.property_P_fprime.note:
        rep.comment(rc.property_P_fprime.note)
    rep.echo_config(args)
    return _emit(rep, args)


def _cmd_mono(args) -> int:
    f = parse(args.f)
    (al,) = _alpha_list(args.alpha, sweep_ok=False)
    verdict = monotonicity_certificate(f, al, args.tau, args.b, args.grid_n)
    rep = Report(["quantity", "value"])
    rep.add("holds", "not_applicable" if verdict.holds is None else verdict.holds)
    for key in sorted(verdict.info):
        rep.add(key, verdict.info[key])
    if verdict.note:
        rep.comment(verdict.note)
    for v in verdict.witnesses[:8]:
        rep.comment(f"witness x={v.where} margin {_fmt(v.margin)}")
    rep.echo_config(args)
    return _emit(rep, args)


def _cmd_periodic(args) -> int:
    f = parse(args.f)
    (al,) = _alpha_list(args.alpha, sweep_ok=False)
    start = args.a if args.a > 0 else args.tau
    ts = np.linspace(start, args.b, args.scan_n)
    verdict = periodicity_defect(f, al, args.tau, ts, grid_n=args.grid_n)
    rep = Report(["t", "defect"])
    for t in ts:
        rep.add(float(t), verdict.info[f"defect@{float(t):.6g}"])
    rep.comment(f"max_defect {_fmt(verdict.defect)}")
    rep.comment("measurement only: the memory kernel remembers the base point")
    rep.echo_config(args)
    return _emit(rep, args)


# ---------------------------------------------------------------------------
# self test


def _selftest_checks(grid_n: int):
    """Closed-form and identity checks; each yields (name, error, tol, floor)."""
    t = parse("t")
    t2 = parse("t^2")
    sin = parse("sin(t)")
    texp = parse("t*exp(-t)")
    checks = []

    err = abs(gamma(0.5) - math.sqrt(math.pi)) / math.sqrt(math.pi)
    checks.append(("gamma(1/2) reflection value", err, 1e-12, 1e-15))
    err = abs(gamma(6.0) - 120.0) / 120.0
    checks.append(("gamma(6) factorial value", err, 1e-12, 1e-15))

    p5 = FractionalParams(0.5, 0.0, grid_n)
    exact = gamma(3.0) / gamma(3.5)
    out = rl_integral(t2, p5, 0.5, 1.0)
    checks.append(("integral power law t^2", abs(out.value - exact) / exact,
                   1e-8, out.est_error / 10.0 + 1e-14))

    exact = gamma(2.0) / gamma(1.5)
    out = rl_derivative(t, p5, 1.0)
    checks.append(("derivative power law t", abs(out.value - exact) / exact,
                   1e-10, out.est_error / 10.0 + 1e-14))

    out = rl_integral(sin, p5, 0.5, 2.0)
    checks.append(("integral error budget sin", out.est_error, 1e-6, 1e-13))

    ident = f_lower(sin, FractionalParams(0.4, 0.0, grid_n), 1.5)
    ref = rl_integral(sin, FractionalParams(0.4, 0.0, grid_n), 0.6, 1.5)
    checks.append(("lowered-function identity", abs(ident.value - ref.value) / abs(ref.value),
                   1e-8, (ident.est_error + ref.est_error) / 10.0 + 1e-14))

    # composition round trips on a shared grid
    n = grid_n
    h = 1.5 / n
    ts = h * np.arange(n + 1)
    al = 0.4
    inner = integral_on_grid(np.sin(ts), h, al)      # I^alpha sin at nodes
    outer = integral_on_grid(inner, h, 1.0 - al)     # I^(1-alpha) of that
    dval = (outer[-1] - outer[-3]) / (2.0 * h)       # d/dx at x - h
    err = abs(dval - math.sin(1.5 - h)) / abs(math.sin(1.5 - h))
    checks.append(("composition D I recovers f", err, 1e-4, 1e-12))

    fe = ts * np.exp(-ts)
    fpe = (1.0 - ts) * np.exp(-ts)
    u = integral_on_grid(fpe, h, 1.0 - al)           # D^alpha f at nodes
    back = integral_on_grid(u, h, al)                # I^alpha of that
    err = abs(float(back[-1]) - float(fe[-1])) / abs(float(fe[-1]))
    checks.append(("composition I D recovers f", err, 1e-5, 1e-12))

    d99 = rl_derivative(sin, FractionalParams(0.99, 0.0, grid_n), 1.0)
    d01 = rl_derivative(sin, FractionalParams(0.01, 0.0, grid_n), 1.0)
    err = max(abs(d99.value - math.cos(1.0)), abs(d01.value - math.sin(1.0)))
    checks.append(("order limits bracket f' and f", err, 0.02, 1e-3))

    mv = mean_value(t, p5, 1.0)
    checks.append(("mean value of t at 2/3", abs(mv.xi_sup - 2.0 / 3.0), 1e-9, 1e-13))

    argv = ["fracderiv", "--f", "t", "--alpha", "0.2:0.8:4", "--a", "0",
            "--x", "1", "--grid-n", "64", "--output", "csv"]
    first = _capture(argv)
    second = _capture(argv)
    checks.append(("deterministic CSV bytes", 0.0 if first == second else 1.0, 0.5, 0.0))
    return checks


def _capture(argv: List[str]) -> str:
    import io

    buf = io.StringIO()
    old = sys.stdout
    sys.stdout = buf
    try:
        code = run(argv)
    finally:
        sys.stdout = old
    if code != 0:
        raise RuntimeError(f"internal command failed with exit {code}")
    return buf.getvalue()


def _cmd_selftest(args) -> int:
    checks = _selftest_checks(args.grid_n)
    n_pass = 0
    lines = [f"selftest  grid_n={args.grid_n}  tol={'default' if args.tol is None else _fmt(args.tol)}"]
    failures = []
    for name, err, default_tol, floor in checks:
        tol = args.tol if args.tol is not None else default_tol
        if err <= tol:
            status = "PASS"
            n_pass += 1
        elif tol < floor:
            status = "INFEASIBLE-TOL"
            failures.append(name)
        else:
            status = "FAIL"
            failures.append(name)
        lines.append(f"  [{status:>14s}] {name:<32s} err={err:.3e} tol={tol:.3e}")
    lines.append(f"result: {n_pass}/{len(checks)} passed")
    if failures:
        lines.append("failing: " + "; ".join(failures))
    sys.stdout.write("\n".join(lines) + "\n")
    return 0 if n_pass == len(checks) else 3


# ---------------------------------------------------------------------------
# argument wiring


def _add_common(sp, *, f_default=None, alpha_default=None):
    if f_default is None:
        sp.add_argument("--f", required=True, help="expression in t, e.g. 'sin(t)'")
    else:
        sp.add_argument("--f", default=f_default, help=f"expression in t (default {f_default!r})")
    if alpha_default is None:
        sp.add_argument("--alpha", required=True, help="order in (0,1) or sweep start:stop:count")
    else:
        sp.add_argument("--alpha", default=alpha_default, help="order in (0,1) or sweep start:stop:count")
    sp.add_argument("--grid-n", type=int, default=2048, dest="grid_n")
    sp.add_argument("--output", choices=("table", "csv"), default="table")
    sp.add_argument("--tol", type=float, default=None, help="tolerance override")
    sp.add_argument("--seed", type=int, default=0)


def _build_parser() -> _Parser:
    top = _Parser(prog="fraccalc", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fracint", help="fractional integral I^alpha f(x)")
    _add_common(sp)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--x", type=float, required=True)
    sp.set_defaults(handler=_cmd_fracint)

    sp = sub.add_parser("fracderiv", help="fractional derivative D^alpha f(x)")
    _add_common(sp)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--allow-nonzero-base", action="store_true", dest="allow_nonzero_base")
    sp.set_defaults(handler=_cmd_fracderiv)

    sp = sub.add_parser("meanvalue", help="fractional mean values over (a, x)")
    _add_common(sp)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--scan-n", type=int, default=128, dest="scan_n")
    sp.set_defaults(handler=_cmd_meanvalue)

    sp = sub.add_parser("polyxi", help="polynomial estimate of the mean value")
    _add_common(sp)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--n", type=int, required=True, help="Taylor truncation order")
    sp.set_defaults(handler=_cmd_polyxi)

    sp = sub.add_parser("critpoints", help="roots of D^alpha f on (a, b]")
    _add_common(sp)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--scan-n", type=int, default=96, dest="scan_n")
    sp.add_argument("--allow-nonzero-base", action="store_true", dest="allow_nonzero_base")
    sp.set_defaults(handler=_cmd_critpoints)

    sp = sub.add_parser("ralpha", help="largest critical point near x0 as alpha varies")
    _add_common(sp)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--x0", type=float, required=True, help="claimed stationary point")
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--scan-n", type=int, default=96, dest="scan_n")
    sp.set_defaults(handler=_cmd_ralpha)

    sp = sub.add_parser("dilation", help="memory-kernel velocity table (preset: sin on [0, pi])")
    _add_common(sp, f_default="sin(t)", alpha_default="0.5")
    sp.add_argument("--a", type=float, default=0.0)
    sp.add_argument("--b", type=float, default=math.pi)
    sp.add_argument("--scan-n", type=int, default=25, dest="scan_n")
    sp.set_defaults(handler=_cmd_dilation)

    sp = sub.add_parser("convexity", help="convexity vs sliding-window order")
    _add_common(sp)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--pairs", type=int, default=32)
    sp.add_argument("--scan-n", type=int, default=96, dest="scan_n")
    sp.set_defaults(handler=_cmd_convexity)

    sp = sub.add_parser("mono", help="tau-step monotonicity certificate on [0, b]")
    _add_common(sp)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--tau", type=float, required=True)
    sp.set_defaults(handler=_cmd_mono)

    sp = sub.add_parser("periodic", help="periodicity defect of D^alpha f")
    _add_common(sp)
    sp.add_argument("--a", type=float, default=0.0, help="start of the sampled t range")
    sp.add_argument("--b", type=float, required=True, help="end of the sampled t range")
    sp.add_argument("--tau", type=float, required=True, help="claimed period")
    sp.add_argument("--scan-n", type=int, default=17, dest="scan_n")
    sp.set_defaults(handler=_cmd_periodic)

    sp = sub.add_parser("selftest", help="closed-form and identity suite")
    sp.add_argument("--grid-n", type=int, default=2048, dest="grid_n")
    sp.add_argument("--tol", type=float, default=None)
    sp.set_defaults(handler=_cmd_selftest)

    return top


def run(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code instead of raising."""
    try:
        args = _build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        DomainError,
        AssumptionError,
        HypothesisError,
        MeanValueNotFoundError,
        SolverError,
        FracCalcError,
    ) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()

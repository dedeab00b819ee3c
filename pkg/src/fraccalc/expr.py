"""One-variable math expressions: parsing, evaluation, Taylor-mode derivatives.

Grammar (whitespace insignificant)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('-')? power
    power  := atom ('^' factor)?
    atom   := number | 'pi' | 'e' | 't' | ident '(' expr ')' | '(' expr ')'

``ident`` is one of sin, cos, exp, log, sqrt, abs.  ``^`` is right
associative and binds tighter than unary minus, so ``-t^2`` is ``-(t^2)``
and ``2^3^2`` is ``2^(3^2)``.

Evaluation works on floats and on numpy arrays alike.  Derivatives of any
order are produced by propagating truncated Taylor series (jets) through
the expression tree, so a single pass yields f, f', ..., f^(n) exactly
(up to rounding) instead of stacking finite differences.

Conventions that keep differentiation sound:

* ``u ^ c`` with an integer literal ``c`` uses repeated multiplication and
  is valid for any base sign; a non-integer constant exponent requires a
  non-negative base (strictly positive when differentiating); a variable
  exponent is rewritten as ``exp(c * log(u))`` and requires ``u > 0``.
* ``abs`` is not differentiable at 0; asking for a jet there raises
  :class:`~fraccalc.errors.DomainError` instead of picking a subgradient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ParseError, UnknownIdentifierError

__all__ = ["Expression", "TaylorJet", "parse", "derivatives", "derivative_values"]

_CONSTANTS = {"pi": math.pi, "e": math.e}
_FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "abs")

Scalar = Union[float, np.ndarray]


# ---------------------------------------------------------------------------
# Syntax tree


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str  # 'pi' or 'e'


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Node"


Node = Union[Num, Const, Var, Neg, BinOp, Call]


# ---------------------------------------------------------------------------
# Tokenizer / recursive-descent parser


class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0

    def parse(self) -> Node:
        node = self.expr()
        self.skip_ws()
        if self.pos < len(self.src):
            raise ParseError(f"unexpected character {self.src[self.pos]!r}", self.pos)
        return node

    def skip_ws(self) -> None:
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise ParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def expr(self) -> Node:
        node = self.term()
        while self.peek() in {"+", "-"}:
            op = self.src[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek() in {"*", "/"}:
            op = self.src[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.peek() == "-":
            self.pos += 1
            return Neg(self.power())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.peek() == "^":
            self.pos += 1
            node = BinOp("^", node, self.factor())  # right associative
        return node

    def atom(self) -> Node:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if ch.isdigit() or ch == ".":
            return self.number()
        if ch.isalpha():
            return self.identifier()
        raise ParseError("expected a number, name or '('", self.pos)

    def number(self) -> Node:
        start = self.pos
        src = self.src
        while self.pos < len(src) and src[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(src) and src[self.pos] == ".":
            self.pos += 1
            while self.pos < len(src) and src[self.pos].isdigit():
                self.pos += 1
        if self.pos < len(src) and src[self.pos] in "eE":
            mark = self.pos
            self.pos += 1
            if self.pos < len(src) and src[self.pos] in "+-":
                self.pos += 1
            if self.pos < len(src) and src[self.pos].isdigit():
                while self.pos < len(src) and src[self.pos].isdigit():
                    self.pos += 1
            else:
                self.pos = mark  # the 'e' was the constant, not an exponent
        text = src[start : self.pos]
        try:
            return Num(float(text))
        except ValueError:
            raise ParseError(f"bad number literal {text!r}", start) from None

    def identifier(self) -> Node:
        start = self.pos
        src = self.src
        while self.pos < len(src) and (src[self.pos].isalnum() or src[self.pos] == "_"):
            self.pos += 1
        name = src[start : self.pos]
        if name == "t":
            return Var()
        if name in _CONSTANTS:
            return Const(name)
        if name in _FUNCTIONS:
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(name, arg)
        raise UnknownIdentifierError(name, start)


# ---------------------------------------------------------------------------
# Pretty printing (minimal parentheses, stable under re-parsing)

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _format(node: Node, context: int = 0) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        text = "-" + _format(node.arg, _PREC_POW)
        return f"({text})" if context > _PREC_NEG else text
    if isinstance(node, Call):
        return f"{node.fn}({_format(node.arg)})"
    if isinstance(node, BinOp):
        if node.op in "+-":
            prec = _PREC_ADD
            text = f"{_format(node.left, prec)} {node.op} {_format(node.right, prec + 1)}"
        elif node.op in "*/":
            prec = _PREC_MUL
            text = f"{_format(node.left, prec)}{node.op}{_format(node.right, prec + 1)}"
        else:  # '^': exponent is a factor, base is an atom
            prec = _PREC_POW
            text = f"{_format(node.left, _PREC_ATOM)}^{_format(node.right, _PREC_NEG)}"
        return f"({text})" if context > prec else text
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Evaluation


def _all(cond) -> bool:
    return bool(np.all(cond))


def _any(cond) -> bool:
    return bool(np.any(cond))


def _contains_var(node: Node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Neg):
        return _contains_var(node.arg)
    if isinstance(node, Call):
        return _contains_var(node.arg)
    if isinstance(node, BinOp):
        return _contains_var(node.left) or _contains_var(node.right)
    return False


def _const_exponent(node: Node):
    """Value of a constant exponent subtree, else None."""
    if _contains_var(node):
        return None
    return float(_eval_node(node, 0.0))


def _is_int(value: float) -> bool:
    return float(value).is_integer() and abs(value) < 2**31


def _eval_node(node: Node, t: Scalar) -> Scalar:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return _CONSTANTS[node.name]
    if isinstance(node, Var):
        return t
    if isinstance(node, Neg):
        return -_eval_node(node.arg, t)
    if isinstance(node, Call):
        u = _eval_node(node.arg, t)
        if node.fn == "sin":
            return np.sin(u)
        if node.fn == "cos":
            return np.cos(u)
        if node.fn == "exp":
            return np.exp(u)
        if node.fn == "abs":
            return np.abs(u)
        if node.fn == "log":
            if not _all(u > 0):
                raise DomainError(f"log of non-positive value in {_format(node)}")
            return np.log(u)
        if node.fn == "sqrt":
            if not _all(u >= 0):
                raise DomainError(f"sqrt of negative value in {_format(node)}")
            return np.sqrt(u)
    if isinstance(node, BinOp):
        a = _eval_node(node.left, t)
        if node.op == "^":
            return _eval_pow(node, a, t)
        b = _eval_node(node.right, t)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if _any(b == 0):
                raise DomainError(f"division by zero in {_format(node)}")
            return a / b
    raise TypeError(f"unknown node {node!r}")


def _eval_pow(node: BinOp, base: Scalar, t: Scalar) -> Scalar:
    c = _const_exponent(node.right)
    if c is not None:
        if _is_int(c):
            if c < 0 and _any(base == 0):
                raise DomainError(f"zero base with negative exponent in {_format(node)}")
            return np.power(base, float(c))
        if not _all(base >= 0):
            raise DomainError(f"negative base with non-integer exponent in {_format(node)}")
        if c < 0 and _any(base == 0):
            raise DomainError(f"zero base with negative exponent in {_format(node)}")
        return np.power(base, c)
    # variable exponent: u^v = exp(v log u), needs u > 0
    if not _all(base > 0):
        raise DomainError(f"non-positive base with variable exponent in {_format(node)}")
    v = _eval_node(node.right, t)
    return np.exp(v * np.log(base))


# ---------------------------------------------------------------------------
# Taylor jets
#
# A jet holds [u, u'/1!, u''/2!, ...] at a point (entries may be numpy
# arrays so that whole sample grids are differentiated in one pass).


class _Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = coeffs

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def __add__(self, other):
        return _Jet([a + b for a, b in zip(self.c, other.c)])

    def __sub__(self, other):
        return _Jet([a - b for a, b in zip(self.c, other.c)])

    def __neg__(self):
        return _Jet([-a for a in self.c])

    def __mul__(self, other):
        n = self.order
        out = []
        for k in range(n + 1):
            acc = self.c[0] * other.c[k]
            for i in range(1, k + 1):
                acc = acc + self.c[i] * other.c[k - i]
            out.append(acc)
        return _Jet(out)

    def divide(self, other, node):
        if _any(other.c[0] == 0):
            raise DomainError(f"division by zero in {_format(node)}")
        n = self.order
        out = []
        for k in range(n + 1):
            acc = self.c[k]
            for i in range(0, k):
                acc = acc - out[i] * other.c[k - i]
            out.append(acc / other.c[0])
        return _Jet(out)


def _jet_const(value, template: _Jet) -> _Jet:
    zero = template.c[0] * 0.0
    return _Jet([zero + value] + [zero] * template.order)


def _jet_exp(u: _Jet) -> _Jet:
    out = [np.exp(u.c[0])]
    for k in range(1, u.order + 1):
        acc = u.c[1] * out[k - 1] if k >= 1 else 0.0
        for j in range(2, k + 1):
            acc = acc + j * u.c[j] * out[k - j]
        out.append(acc / k)
    return _Jet(out)


def _jet_log(u: _Jet, node) -> _Jet:
    if not _all(u.c[0] > 0):
        raise DomainError(f"log of non-positive value in {_format(node)}")
    out = [np.log(u.c[0])]
    for k in range(1, u.order + 1):
        acc = u.c[k] * k
        for j in range(1, k):
            acc = acc - j * out[j] * u.c[k - j]
        out.append(acc / (k * u.c[0]))
    return _Jet(out)


def _jet_sincos(u: _Jet):
    s = [np.sin(u.c[0])]
    c = [np.cos(u.c[0])]
    for k in range(1, u.order + 1):
        sa = 0.0
        ca = 0.0
        for j in range(1, k + 1):
            sa = sa + j * u.c[j] * c[k - j]
            ca = ca + j * u.c[j] * s[k - j]
        s.append(sa / k)
        c.append(-ca / k)
    return _Jet(s), _Jet(c)


def _jet_sqrt(u: _Jet, node) -> _Jet:
    if not _all(u.c[0] > 0):
        raise DomainError(f"sqrt not differentiable at non-positive value in {_format(node)}")
    out = [np.sqrt(u.c[0])]
    for k in range(1, u.order + 1):
        acc = u.c[k]
        for j in range(1, k):
            acc = acc - out[j] * out[k - j]
        out.append(acc / (2.0 * out[0]))
    return _Jet(out)


def _jet_abs(u: _Jet, node) -> _Jet:
    if _any(u.c[0] == 0):
        raise DomainError(f"abs not differentiable at zero in {_format(node)}")
    s = np.sign(u.c[0])
    return _Jet([s * a for a in u.c])


def _jet_powc(u: _Jet, c: float, node) -> _Jet:
    """u^c for a non-integer constant c; base must stay positive."""
    if not _all(u.c[0] > 0):
        raise DomainError(f"non-positive base with exponent {c!r} in {_format(node)}")
    out = [np.power(u.c[0], c)]
    for k in range(1, u.order + 1):
        acc = 0.0
        for j in range(1, k + 1):
            acc = acc + ((c + 1.0) * j - k) * u.c[j] * out[k - j]
        out.append(acc / (k * u.c[0]))
    return _Jet(out)


def _jet_ipow(u: _Jet, m: int, node) -> _Jet:
    if m == 0:
        return _jet_const(1.0, u)
    if m < 0:
        return _jet_const(1.0, u).divide(_jet_ipow(u, -m, node), node)
    result = None
    base = u
    while m:
        if m & 1:
            result = base if result is None else result * base
        m >>= 1
        if m:
            base = base * base
    return result


def _jet_node(node: Node, var: _Jet) -> _Jet:
    if isinstance(node, Num):
        return _jet_const(node.value, var)
    if isinstance(node, Const):
        return _jet_const(_CONSTANTS[node.name], var)
    if isinstance(node, Var):
        return var
    if isinstance(node, Neg):
        return -_jet_node(node.arg, var)
    if isinstance(node, Call):
        u = _jet_node(node.arg, var)
        if node.fn == "sin":
            return _jet_sincos(u)[0]
        if node.fn == "cos":
            return _jet_sincos(u)[1]
        if node.fn == "exp":
            return _jet_exp(u)
        if node.fn == "log":
            return _jet_log(u, node)
        if node.fn == "sqrt":
            return _jet_sqrt(u, node)
        if node.fn == "abs":
            return _jet_abs(u, node)
    if isinstance(node, BinOp):
        u = _jet_node(node.left, var)
        if node.op == "^":
            c = _const_exponent(node.right)
            if c is not None and _is_int(c):
                return _jet_ipow(u, int(c), node)
            if c is not None:
                return _jet_powc(u, c, node)
            v = _jet_node(node.right, var)
            return _jet_exp(v * _jet_log(u, node))
        v = _jet_node(node.right, var)
        if node.op == "+":
            return u + v
        if node.op == "-":
            return u - v
        if node.op == "*":
            return u * v
        if node.op == "/":
            return u.divide(v, node)
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Public API


@dataclass(frozen=True)
class TaylorJet:
    """Scaled derivatives of a function at one point.

    ``coefficients[j]`` equals ``f^(j)(center) / j!``, so the jet is the
    truncated Taylor expansion of f about ``center``.
    """

    center: float
    coefficients: tuple

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def derivative(self, j: int) -> float:
        """Return f^(j)(center)."""
        return self.coefficients[j] * math.factorial(j)


@dataclass(frozen=True)
class Expression:
    """Parsed, immutable expression in the single variable ``t``."""

    root: Node

    def eval(self, t: Scalar) -> Scalar:
        """Evaluate at a float or elementwise over a numpy array."""
        with np.errstate(all="ignore"):  # finiteness is checked below
            out = _eval_node(self.root, t)
        if isinstance(t, np.ndarray):
            out = np.asarray(out, dtype=float) + np.zeros_like(t, dtype=float)
            if not np.all(np.isfinite(out)):
                raise DomainError(f"non-finite value from {_format(self.root)} on sample grid")
            return out
        out = float(out)
        if not math.isfinite(out):
            raise DomainError(f"non-finite value from {_format(self.root)} at t={t!r}")
        return out

    __call__ = eval

    def pretty(self) -> str:
        """Render back to source; re-parsing reproduces the same tree."""
        return _format(self.root)

    def derivatives(self, center: float, n: int) -> TaylorJet:
        return derivatives(self, center, n)

    def __str__(self) -> str:
        return self.pretty()


def parse(source: str) -> Expression:
    """Parse ``source`` into an :class:`Expression`.

    Raises :class:`~fraccalc.errors.ParseError` (with byte offset) on bad
    syntax and :class:`~fraccalc.errors.UnknownIdentifierError` for names
    outside the grammar.
    """
    return Expression(_Parser(source).parse())


def derivatives(e: Expression, center: float, n: int) -> TaylorJet:
    """Taylor jet of ``e`` at ``center`` up to order ``n`` (inclusive)."""
    if n < 0:
        raise ValueError("derivative order must be >= 0")
    center = float(center)
    seed = _Jet([center] + [1.0] * (1 if n >= 1 else 0) + [0.0] * max(0, n - 1))
    with np.errstate(all="ignore"):
        jet = _jet_node(e.root, seed)
    coeffs = tuple(float(c) for c in jet.c)
    for c in coeffs:
        if not math.isfinite(c):
            raise DomainError(f"non-finite derivative of {_format(e.root)} at {center!r}")
    return TaylorJet(center, coeffs)


def derivative_values(e: Expression, ts: np.ndarray, order: int) -> np.ndarray:
    """Sample f^(order) of ``e`` at every point of ``ts`` in one pass."""
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    ts = np.asarray(ts, dtype=float)
    if order == 0:
        return np.asarray(e.eval(ts), dtype=float)
    zeros = np.zeros_like(ts)
    seed = _Jet([ts, np.ones_like(ts)] + [zeros] * (order - 1))
    with np.errstate(all="ignore"):
        jet = _jet_node(e.root, seed)
    out = np.asarray(jet.c[order], dtype=float) * math.factorial(order)
    if out.shape != ts.shape:
        out = out + zeros
    if not np.all(np.isfinite(out)):
        raise DomainError(f"non-finite derivative of {_format(e.root)} on sample grid")
    return out

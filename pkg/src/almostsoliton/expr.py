"""Closed-form coordinate expressions.

Grammar (whitespace-insensitive)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ("^" unary)?           # right-associative, integer exponent
    atom    := NUMBER | "pi" | IDENT | FUNC "(" expr ")" | "(" expr ")"

    IDENT   := [a-zA-Z][a-zA-Z0-9_]*
    NUMBER  := decimal literal with optional exponent, e.g. 2, 0.5, 1e-3
    FUNC    := exp | log | sin | cos | sinh | cosh | tanh | sqrt

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``.  The
exponent of ``^`` must be a variable-free expression with an integer value;
real powers are written through ``exp`` and ``log``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .jets import Jet3, JetBasis, basis

FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh", "tanh", "sqrt")
CONSTANTS = {"pi": math.pi}


class ExprError(ValueError):
    pass


class ParseError(ExprError):
    def __init__(self, message: str, offset: int, src: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.src = src


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class DomainError(ExprError):
    def __init__(self, message: str, subexpr: "Expr"):
        super().__init__(f"{message} in {to_string(subexpr)!r}")
        self.subexpr = subexpr


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


class Expr:
    """Base node.  Arithmetic operators build new trees."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, k: int):
        return power(self, k)

    def __str__(self) -> str:
        return to_string(self)


@dataclass(frozen=True, eq=True, repr=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Const(Expr):
    name: str


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of + - * /
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr

    @property
    def k(self) -> int:
        return _integer_exponent(self.exponent)


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        x = float(x)
        return Num(x) if x >= 0 else Neg(Num(-x))
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def _integer_exponent(e: Expr) -> int:
    value = _const_value(e)
    if value is None or not float(value).is_integer():
        raise ExprError(f"exponent {to_string(e)!r} is not a constant integer")
    return int(value)


def _const_value(e: Expr):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Var):
        return None
    if isinstance(e, Neg):
        v = _const_value(e.operand)
        return None if v is None else -v
    if isinstance(e, Pow):
        b = _const_value(e.base)
        return None if b is None else b ** _integer_exponent(e.exponent)
    if isinstance(e, BinOp):
        a, b = _const_value(e.left), _const_value(e.right)
        if a is None or b is None:
            return None
        if e.op == "/":
            return a / b if b != 0 else None
        return {"+": a + b, "-": a - b, "*": a * b}[e.op]
    if isinstance(e, Call):
        v = _const_value(e.arg)
        return None if v is None else float(getattr(np, e.func)(v))
    return None


# Builders used when assembling derived expressions.  They drop additive
# zeros and multiplicative ones; parsed input never goes through them.

ZERO = Num(0.0)
ONE = Num(1.0)


def _is_num(e: Expr, v: float) -> bool:
    return isinstance(e, Num) and e.value == v


def add(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    if isinstance(b, Neg):
        return BinOp("-", a, b.operand)
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return neg(b)
    if isinstance(b, Neg):
        return BinOp("+", a, b.operand)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    if isinstance(a, Neg) and isinstance(b, Neg):
        return mul(a.operand, b.operand)
    if isinstance(a, Neg):
        return neg(mul(a.operand, b))
    if isinstance(b, Neg):
        return neg(mul(a, b.operand))
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 0.0):
        raise ExprError("division by literal zero")
    if _is_num(a, 0.0):
        return ZERO
    if _is_num(b, 1.0):
        return a
    return BinOp("/", a, b)


def neg(a: Expr) -> Expr:
    if _is_num(a, 0.0):
        return ZERO
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def power(a: Expr, k: int) -> Expr:
    if k == 0:
        return ONE
    if k == 1:
        return a
    return Pow(a, as_expr(k))


def call(func: str, a: Expr) -> Expr:
    if func not in FUNCTIONS:
        raise ExprError(f"unknown function {func!r}")
    return Call(func, a)


def var(name: str) -> Var:
    return Var(name)


def num(x: float) -> Expr:
    return as_expr(x)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[a-zA-Z][a-zA-Z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str):
    pos = 0
    tokens = []
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            bad = len(src[pos:]) - len(src[pos:].lstrip()) + pos
            raise ParseError(f"unexpected character {src[bad]!r}", bad, src)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, names: frozenset):
        self.src = src
        self.names = names
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, off = self.take()
        if text != value or kind == "end":
            what = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {value!r}, found {what}", off, self.src)

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", off, self.src)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, off = self.peek()
        if kind == "op" and text == "^":
            self.take()
            exp_off = self.peek()[2]
            exponent = self.unary()
            value = _const_value(exponent)
            if value is None or not float(value).is_integer():
                raise ParseError("exponent must be a constant integer", exp_off, self.src)
            return Pow(base, exponent)
        return base

    def atom(self) -> Expr:
        kind, text, off = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "id":
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in CONSTANTS and text not in self.names:
                return Const(text)
            if text not in self.names:
                raise UnknownIdentifierError(text, off)
            return Var(text)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect(")")
            return e
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", off, self.src)


def _names_of(chart) -> frozenset:
    if chart is None:
        return frozenset()
    names = getattr(chart, "names", chart)
    return frozenset(names)


def parse(src: str, chart=None) -> Expr:
    """Parse ``src`` against the coordinate names of ``chart``.

    ``chart`` may be a Chart or any sequence of names.
    """
    if not isinstance(src, str) or not src.strip():
        raise ParseError("empty expression", 0, src if isinstance(src, str) else "")
    return _Parser(src, _names_of(chart)).parse()


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_UNARY = 3
_POW = 4
_ATOM = 5


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _UNARY
    if isinstance(e, Pow):
        return _POW
    return _ATOM


def _fmt_num(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_string(e: Expr) -> str:
    """Render with the minimal parentheses that re-parse to the same tree."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    if isinstance(e, Neg):
        inner = to_string(e.operand)
        if _prec(e.operand) < _UNARY:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Pow):
        base = to_string(e.base)
        if _prec(e.base) <= _POW:
            base = f"({base})"
        exponent = to_string(e.exponent)
        if _prec(e.exponent) < _UNARY:
            exponent = f"({exponent})"
        return f"{base}^{exponent}"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left = to_string(e.left)
        if _prec(e.left) < p:
            left = f"({left})"
        right = to_string(e.right)
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression node: {e!r}")


def variables(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Pow):
        return variables(e.base)
    if isinstance(e, Call):
        return variables(e.arg)
    return set()


def pullback(e: Expr, chart) -> Expr:
    """Re-read ``e`` on another chart (fails if a variable is not declared there)."""
    return parse(to_string(e), chart)


# ---------------------------------------------------------------------------
# Jet evaluation
# ---------------------------------------------------------------------------


def _func_derivs(func: str, a0: float, order: int, node: Expr):
    if func == "exp":
        v = math.exp(a0)
        return [v] * (order + 1)
    if func == "log":
        if a0 <= 0:
            raise DomainError("log of non-positive value", node)
        return [math.log(a0)] + [(-1.0) ** (m - 1) * math.factorial(m - 1) / a0**m for m in range(1, order + 1)]
    if func in ("sin", "cos"):
        s, c = math.sin(a0), math.cos(a0)
        cycle = [s, c, -s, -c] if func == "sin" else [c, -s, -c, s]
        return [cycle[m % 4] for m in range(order + 1)]
    if func in ("sinh", "cosh"):
        s, c = math.sinh(a0), math.cosh(a0)
        cycle = [s, c] if func == "sinh" else [c, s]
        return [cycle[m % 2] for m in range(order + 1)]
    if func == "tanh":
        t = math.tanh(a0)
        poly = np.polynomial.Polynomial([0.0, 1.0])
        one_minus = np.polynomial.Polynomial([1.0, 0.0, -1.0])
        out = []
        for _ in range(order + 1):
            out.append(poly(t))
            poly = poly.deriv() * one_minus
        return out
    if func == "sqrt":
        if a0 <= 0:
            raise DomainError("sqrt of non-positive value", node)
        out, coef = [], 1.0
        for m in range(order + 1):
            out.append(coef * a0 ** (0.5 - m))
            coef *= 0.5 - m
        return out
    raise ExprError(f"unknown function {func!r}")


def _eval(e: Expr, env: dict, b: JetBasis) -> np.ndarray:
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Num):
        return b.constant(e.value)
    if isinstance(e, Const):
        return b.constant(CONSTANTS[e.name])
    if isinstance(e, Neg):
        return -_eval(e.operand, env, b)
    if isinstance(e, BinOp):
        x = _eval(e.left, env, b)
        y = _eval(e.right, env, b)
        if e.op == "+":
            return x + y
        if e.op == "-":
            return x - y
        if e.op == "*":
            return b.mul(x, y)
        if y[0] == 0.0:
            raise DomainError("division by zero", e)
        return b.mul(x, b.reciprocal(y))
    if isinstance(e, Pow):
        k = e.k
        x = _eval(e.base, env, b)
        if k < 0:
            if x[0] == 0.0:
                raise DomainError("division by zero", e)
            x = b.reciprocal(x)
            k = -k
        out = b.constant(1.0)
        sq = x
        while k:
            if k & 1:
                out = b.mul(out, sq)
            k >>= 1
            if k:
                sq = b.mul(sq, sq)
        return out
    if isinstance(e, Call):
        x = _eval(e.arg, env, b)
        return b.compose(x, _func_derivs(e.func, float(x[0]), b.order, e))
    raise TypeError(f"not an expression node: {e!r}")


def eval_coeffs(e: Expr, names: Sequence[str], point, order: int = 3) -> np.ndarray:
    """Raw Taylor coefficients of ``e`` about ``point``."""
    point = np.asarray(point, dtype=float)
    if point.shape != (len(names),):
        raise ExprError(f"point has dimension {point.size}, chart has {len(names)}")
    b = basis(len(names), order)
    env = {name: b.variable(i, point[i]) for i, name in enumerate(names)}
    missing = variables(e) - set(names)
    if missing:
        raise UnknownIdentifierError(sorted(missing)[0], -1)
    return _eval(e, env, b)


def eval_jet(e: Expr, chart, point, order: int = 3) -> Jet3:
    """Value and all partials up to ``order`` of ``e`` at ``point``."""
    names = tuple(getattr(chart, "names", chart))
    coeffs = eval_coeffs(e, names, point, order)
    return Jet3(basis(len(names), order), coeffs)


def evaluate(e: Expr, chart, point) -> float:
    return eval_jet(e, chart, point, order=0).value


# ---------------------------------------------------------------------------
# Symbolic derivative construction
# ---------------------------------------------------------------------------


def diff(e: Expr, name: str) -> Expr:
    """Derivative tree of ``e`` with respect to variable ``name``."""
    if isinstance(e, (Num, Const)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == name else ZERO
    if isinstance(e, Neg):
        return neg(diff(e.operand, name))
    if isinstance(e, BinOp):
        da, db = diff(e.left, name), diff(e.right, name)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, e.right), mul(e.left, db))
        return sub(div(da, e.right), div(mul(e.left, db), power(e.right, 2)))
    if isinstance(e, Pow):
        k = e.k
        da = diff(e.base, name)
        if _is_num(da, 0.0):
            return ZERO
        return mul(mul(num(k), power(e.base, k - 1)), da)
    if isinstance(e, Call):
        da = diff(e.arg, name)
        if _is_num(da, 0.0):
            return ZERO
        a = e.arg
        outer = {
            "exp": lambda: e,
            "log": lambda: div(ONE, a),
            "sin": lambda: Call("cos", a),
            "cos": lambda: neg(Call("sin", a)),
            "sinh": lambda: Call("cosh", a),
            "cosh": lambda: Call("sinh", a),
            "tanh": lambda: sub(ONE, power(e, 2)),
            "sqrt": lambda: div(ONE, mul(num(2), e)),
        }[e.func]()
        return mul(outer, da)
    raise TypeError(f"not an expression node: {e!r}")


def sum_exprs(terms: Iterable[Expr]) -> Expr:
    out: Expr = ZERO
    for t in terms:
        out = add(out, t)
    return out

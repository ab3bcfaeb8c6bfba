"""Expression parsing and truncated power series (jet) arithmetic.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("-" | "+") unary | power ;
    power   = atom [ ("^" | "**") unary ] ;
    atom    = number | "x" | "e" | "pi"
            | ("exp" | "log") "(" expr ")"
            | "(" expr ")" ;
    number  = digits [ "." digits ] [ ("e" | "E") ["+" | "-"] digits ] ;

The exponent of ``^`` must not contain ``x``.  All derivative information
comes from exact truncated power-series arithmetic carried out in an
mpmath context of the requested precision.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

from mpmath.ctx_mp import MPContext

from .errors import DomainError, ExpressionSyntaxError, UnknownIdentifierError

__all__ = [
    "PrecisionConfig", "Jet", "JetFunction", "Expression", "Derivative",
    "Shifted", "Offset", "parse_expression", "eval_jet", "nth_derivative",
    "context", "compose", "num", "var", "add", "sub", "mul", "div", "neg",
    "power", "exp", "log",
]


@dataclass(frozen=True)
class PrecisionConfig:
    significand_bits: int = 256
    jet_order: int = 64

    def __post_init__(self):
        if self.significand_bits < 64:
            raise ValueError("significand_bits must be >= 64")
        if self.jet_order < 1:
            raise ValueError("jet_order must be >= 1")

    def with_order(self, order: int) -> "PrecisionConfig":
        return PrecisionConfig(self.significand_bits, max(order, 1))


DEFAULT_PRECISION = PrecisionConfig()


@functools.lru_cache(maxsize=None)
def context(bits: int) -> MPContext:
    """Private mpmath context at ``bits`` of precision (never touches ``mpmath.mp``)."""
    ctx = MPContext()
    ctx.prec = bits
    return ctx


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    text: str


@dataclass(frozen=True)
class Const:
    name: str  # "e" or "pi"


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: object


@dataclass(frozen=True)
class Call:
    name: str  # "exp" or "log"
    arg: object


FUNCTIONS = ("exp", "log")
CONSTANTS = ("e", "pi")


def num(value) -> Num:
    if isinstance(value, (int,)):
        return Num(str(value))
    return Num(repr(float(value)) if isinstance(value, float) else str(value))


def var() -> Var:
    return Var()


def add(a, b):
    return BinOp("+", a, b)


def sub(a, b):
    return BinOp("-", a, b)


def mul(a, b):
    return BinOp("*", a, b)


def div(a, b):
    return BinOp("/", a, b)


def neg(a):
    return Neg(a)


def power(a, b):
    return Pow(a, b)


def exp(a):
    return Call("exp", a)


def log(a):
    return Call("log", a)


def contains_var(node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Num, Const)):
        return False
    if isinstance(node, Neg):
        return contains_var(node.arg)
    if isinstance(node, Call):
        return contains_var(node.arg)
    if isinstance(node, Pow):
        return contains_var(node.base) or contains_var(node.exponent)
    return contains_var(node.left) or contains_var(node.right)


def substitute(node, replacement):
    """Replace every occurrence of the variable by ``replacement``."""
    if isinstance(node, Var):
        return replacement
    if isinstance(node, (Num, Const)):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.arg, replacement))
    if isinstance(node, Call):
        return Call(node.name, substitute(node.arg, replacement))
    if isinstance(node, Pow):
        return Pow(substitute(node.base, replacement), node.exponent)
    return BinOp(node.op, substitute(node.left, replacement), substitute(node.right, replacement))


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message, pos=None, cls=ExpressionSyntaxError):
        p = self.pos if pos is None else pos
        raise cls(message, p + 1, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def accept(self, token: str) -> bool:
        self.skip()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def parse(self):
        if not self.text.strip():
            raise ExpressionSyntaxError("empty expression", 1, self.text)
        node = self.expr()
        self.skip()
        if self.pos != len(self.text):
            self.error(f"unexpected {self.text[self.pos]!r}")
        return node

    def expr(self):
        node = self.term()
        while True:
            if self.accept("+"):
                node = BinOp("+", node, self.term())
            elif self.accept("-"):
                node = BinOp("-", node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            self.skip()
            if self.text.startswith("**", self.pos):
                return node
            if self.accept("*"):
                node = BinOp("*", node, self.unary())
            elif self.accept("/"):
                node = BinOp("/", node, self.unary())
            else:
                return node

    def unary(self):
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        start = self.pos
        if self.accept("**") or self.accept("^"):
            exponent = self.unary()
            if contains_var(exponent):
                self.error("exponent must be constant", start)
            return Pow(base, exponent)
        return base

    def atom(self):
        self.skip()
        start = self.pos
        ch = self.peek()
        if ch == "":
            self.error("unexpected end of input")
        if ch.isdigit() or ch == ".":
            return self.number()
        if ch.isalpha() or ch == "_":
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
            name = self.text[start:self.pos]
            if name in FUNCTIONS:
                if not self.accept("("):
                    self.error(f"expected '(' after {name}")
                arg = self.expr()
                if not self.accept(")"):
                    self.error("expected ')'")
                return Call(name, arg)
            if name == "x":
                return Var()
            if name in CONSTANTS:
                return Const(name)
            self.error(f"unknown identifier {name!r}", start, UnknownIdentifierError)
        if self.accept("("):
            node = self.expr()
            if not self.accept(")"):
                self.error("expected ')'")
            return node
        self.error(f"unexpected {ch!r}")

    def number(self):
        start = self.pos
        text = self.text
        n = len(text)
        while self.pos < n and text[self.pos].isdigit():
            self.pos += 1
        if self.pos < n and text[self.pos] == ".":
            self.pos += 1
            while self.pos < n and text[self.pos].isdigit():
                self.pos += 1
        if self.pos < n and text[self.pos] in "eE":
            save = self.pos
            self.pos += 1
            if self.pos < n and text[self.pos] in "+-":
                self.pos += 1
            if self.pos < n and text[self.pos].isdigit():
                while self.pos < n and text[self.pos].isdigit():
                    self.pos += 1
            else:
                self.pos = save
        literal = text[start:self.pos]
        if literal == ".":
            self.error("malformed number", start)
        return Num(literal)


def parse_expression(text: str) -> "Expression":
    """Parse ``text`` into an :class:`Expression` in the variable ``x``."""
    return Expression(_Parser(text).parse(), text)


# ---------------------------------------------------------------------------
# Printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_text(node) -> str:
    return _fmt(node, 0)


def _fmt(node, outer: int) -> str:
    if isinstance(node, Num):
        return node.text
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Call):
        return f"{node.name}({_fmt(node.arg, 0)})"
    if isinstance(node, Neg):
        s = "-" + _fmt(node.arg, 3)
        return f"({s})" if outer > 3 else s
    if isinstance(node, Pow):
        # exponent is parsed as a unary, so a leading minus needs no brackets
        s = f"{_fmt(node.base, 5)}^{_fmt(node.exponent, 3)}"
        return f"({s})" if outer > 4 else s
    p = _PREC[node.op]
    s = f"{_fmt(node.left, p)} {node.op} {_fmt(node.right, p + 1)}"
    return f"({s})" if outer > p else s


# ---------------------------------------------------------------------------
# Jets

@dataclass(frozen=True)
class Jet:
    """Taylor coefficients ``coeffs[k] = g^(k)(center) / k!``."""

    center: object
    coeffs: tuple
    bits: int = 256

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def derivative(self, k: int):
        ctx = context(self.bits)
        return self.coeffs[k] * ctx.factorial(k)

    def derivatives(self):
        ctx = context(self.bits)
        return [c * ctx.factorial(k) for k, c in enumerate(self.coeffs)]

    def __add__(self, other: "Jet") -> "Jet":
        return Jet(self.center, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.bits)

    def __sub__(self, other: "Jet") -> "Jet":
        return Jet(self.center, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.bits)

    def __mul__(self, other):
        if isinstance(other, Jet):
            ops = _Ops(context(self.bits), self.order)
            return Jet(self.center, tuple(ops.mul(list(self.coeffs), list(other.coeffs))), self.bits)
        return Jet(self.center, tuple(a * other for a in self.coeffs), self.bits)

    __rmul__ = __mul__


class _Ops:
    """Truncated power-series kernels on coefficient lists."""

    def __init__(self, ctx: MPContext, order: int):
        self.ctx = ctx
        self.n = order

    def const(self, value):
        out = [self.ctx.zero] * (self.n + 1)
        out[0] = self.ctx.mpf(value)
        return out

    def variable(self, center):
        out = self.const(center)
        if self.n >= 1:
            out[1] = self.ctx.one
        return out

    def mul(self, a, b):
        fdot = self.ctx.fdot
        return [fdot(a[: k + 1], b[k::-1]) for k in range(self.n + 1)]

    def div(self, a, b):
        if b[0] == 0:
            raise DomainError("division by zero")
        q = []
        fdot = self.ctx.fdot
        for k in range(self.n + 1):
            s = a[k] - fdot(b[1: k + 1], q[::-1]) if k else a[0]
            q.append(s / b[0])
        return q

    def exp(self, a):
        ctx = self.ctx
        h = [ctx.exp(a[0])]
        for k in range(1, self.n + 1):
            s = ctx.fdot([j * a[j] for j in range(1, k + 1)], h[::-1])
            h.append(s / k)
        return h

    def log(self, a):
        ctx = self.ctx
        if not a[0] > 0:
            raise DomainError("log of non-positive argument")
        g = [ctx.log(a[0])]
        for k in range(1, self.n + 1):
            s = ctx.fdot([j * g[j] for j in range(1, k)], a[k - 1:0:-1]) if k > 1 else 0
            g.append((a[k] - s / k) / a[0])
        return g

    def pow(self, a, c):
        ctx = self.ctx
        if ctx.isint(c) and abs(c) <= 4096:
            m = int(c)
            if m >= 0:
                result = self.const(1)
                base = list(a)
                while m:
                    if m & 1:
                        result = self.mul(result, base)
                    m >>= 1
                    if m:
                        base = self.mul(base, base)
                return result
            return self.div(self.const(1), self.pow(a, -c))
        if not a[0] > 0:
            raise DomainError("non-integer power of non-positive argument")
        h = [ctx.power(a[0], c)]
        for k in range(1, self.n + 1):
            w = [(c * j - (k - j)) * a[j] for j in range(1, k + 1)]
            h.append(ctx.fdot(w, h[::-1]) / (k * a[0]))
        return h


def _scalar(node, ctx):
    """Evaluate a variable-free subtree."""
    return _evaluate(node, _Ops(ctx, 0), None)[0]


def _evaluate(node, ops: _Ops, center):
    ctx = ops.ctx
    if isinstance(node, Var):
        return ops.variable(center)
    if isinstance(node, Num):
        return ops.const(ctx.mpf(node.text))
    if isinstance(node, Const):
        return ops.const(ctx.e if node.name == "e" else ctx.pi)
    if isinstance(node, Neg):
        return [-c for c in _evaluate(node.arg, ops, center)]
    if isinstance(node, Call):
        inner = _evaluate(node.arg, ops, center)
        return ops.exp(inner) if node.name == "exp" else ops.log(inner)
    if isinstance(node, Pow):
        exponent = _scalar(node.exponent, ctx)
        return ops.pow(_evaluate(node.base, ops, center), exponent)
    left = _evaluate(node.left, ops, center)
    right = _evaluate(node.right, ops, center)
    if node.op == "+":
        return [a + b for a, b in zip(left, right)]
    if node.op == "-":
        return [a - b for a, b in zip(left, right)]
    if node.op == "*":
        return ops.mul(left, right)
    return ops.div(left, right)


# ---------------------------------------------------------------------------
# Function handles

class JetFunction:
    """Anything that can produce a jet at a real centre.

    Subclasses implement :meth:`jet`; everything else is derived from it.
    """

    label = "f"

    def jet(self, center, order: int, prec: PrecisionConfig = DEFAULT_PRECISION) -> Jet:
        raise NotImplementedError

    def value(self, lam, prec: PrecisionConfig = DEFAULT_PRECISION):
        return self.jet(lam, 0, prec).coeffs[0]

    def derivative(self, n: int, lam, prec: PrecisionConfig = DEFAULT_PRECISION):
        return self.jet(lam, n, prec).derivative(n)

    def __call__(self, lam, prec: PrecisionConfig = DEFAULT_PRECISION) -> float:
        return float(self.value(lam, prec))

    def deriv(self, m: int = 1) -> "Derivative":
        return Derivative(self, m)

    def shift(self, s) -> "Shifted":
        return Shifted(self, s)

    def minus(self, c) -> "Offset":
        return Offset(self, c)


class Expression(JetFunction):
    """A parsed formula in ``x``; immutable."""

    def __init__(self, ast, source: str | None = None):
        self.ast = ast
        self.source = source if source is not None else to_text(ast)
        self.label = self.source

    def __repr__(self):
        return f"Expression({self.source!r})"

    def __eq__(self, other):
        return isinstance(other, Expression) and self.ast == other.ast

    def __hash__(self):
        return hash(self.ast)

    def text(self) -> str:
        return to_text(self.ast)

    def jet(self, center, order: int, prec: PrecisionConfig = DEFAULT_PRECISION) -> Jet:
        return eval_jet(self, center, order, prec)


class Derivative(JetFunction):
    def __init__(self, inner: JetFunction, m: int = 1):
        self.inner = inner
        self.m = m
        self.label = f"({inner.label})" + "'" * m

    def jet(self, center, order, prec=DEFAULT_PRECISION):
        base = self.inner.jet(center, order + self.m, prec)
        ctx = context(prec.significand_bits)
        m = self.m
        coeffs = tuple(
            base.coeffs[k + m] * (ctx.factorial(k + m) / ctx.factorial(k)) for k in range(order + 1)
        )
        return Jet(base.center, coeffs, prec.significand_bits)


class Shifted(JetFunction):
    """``lam -> inner(lam + s)``."""

    def __init__(self, inner: JetFunction, s):
        self.inner = inner
        self.s = s
        self.label = f"{inner.label}(x{s:+g})" if isinstance(s, float) else f"{inner.label}(x+s)"

    def jet(self, center, order, prec=DEFAULT_PRECISION):
        ctx = context(prec.significand_bits)
        j = self.inner.jet(ctx.mpf(center) + ctx.mpf(self.s), order, prec)
        return Jet(ctx.mpf(center), j.coeffs, j.bits)


class Offset(JetFunction):
    """``lam -> inner(lam) - c``."""

    def __init__(self, inner: JetFunction, c):
        self.inner = inner
        self.c = c
        self.label = f"{inner.label} - {c}"

    def jet(self, center, order, prec=DEFAULT_PRECISION):
        j = self.inner.jet(center, order, prec)
        coeffs = (j.coeffs[0] - context(prec.significand_bits).mpf(self.c),) + j.coeffs[1:]
        return Jet(j.center, coeffs, j.bits)


def compose(outer: Expression, inner: Expression) -> Expression:
    """``outer(inner(x))`` as a new expression."""
    return Expression(substitute(outer.ast, inner.ast))


def eval_jet(e: Expression, center, order: int, prec: PrecisionConfig = DEFAULT_PRECISION) -> Jet:
    """Jet of ``e`` at ``center`` truncated at ``order``.

    Raises :class:`DomainError` when some node is singular at ``center``.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    ctx = context(prec.significand_bits)
    c = ctx.mpf(center)
    coeffs = _evaluate(e.ast, _Ops(ctx, order), c)
    return Jet(c, tuple(coeffs), prec.significand_bits)


def nth_derivative(e: JetFunction, n: int, lam, prec: PrecisionConfig = DEFAULT_PRECISION):
    """``e^(n)(lam)`` as an mpf at the working precision."""
    return e.jet(lam, n, prec).derivative(n)


def as_function(f) -> JetFunction:
    if isinstance(f, JetFunction):
        return f
    if isinstance(f, str):
        return parse_expression(f)
    raise TypeError(f"cannot interpret {f!r} as a function")


def to_float(x) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf

"""Symbolic expressions over chart coordinates.

Every coordinate function handled by the package (anchors, structure
functions, connection coefficients, bivectors, 2-forms, momentum sections)
is an :class:`Expr`.  Expressions are immutable trees built from real
literals, coordinate references, ``+ - * /``, non-negative integer powers,
unary negation and the functions ``sin cos exp ln sqrt``.

The grammar accepted by :func:`parse` is::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" integer)?
    atom   := number | ident | ident "(" expr ")" | "(" expr ")"

so ``-x^2`` means ``-(x^2)``.

Derivatives are exact.  Only trivial constant folding is performed
(``0*e``, ``1*e``, ``e+0`` and literal arithmetic); correctness is judged by
evaluation, never by canonical form.
"""
from __future__ import annotations

import math
import re
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Expr",
    "Const",
    "Var",
    "ParseError",
    "DomainError",
    "FUNCTIONS",
    "parse",
    "differentiate",
    "evaluate",
    "evaluate_many",
    "substitute",
    "const",
    "var",
    "esum",
    "eprod",
    "as_expr",
    "is_zero",
]

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")


class ParseError(ValueError):
    """Malformed expression source.

    ``offset`` is the byte offset of the offending token (``len(source)``
    for unexpected end of input) and ``expected`` a short hint.
    """

    def __init__(self, offset: int, message: str, expected: str = ""):
        self.offset = offset
        self.message = message
        self.expected = expected
        text = f"{message} at offset {offset}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class DomainError(ArithmeticError):
    """Evaluation left the domain of an operation.

    ``index`` is the position of the first offending point in the batch that
    was being evaluated; ``point`` is filled in by callers that know it.
    """

    def __init__(self, message: str, index: int = 0, point=None):
        self.message = message
        self.index = index
        self.point = point
        text = message
        if point is not None:
            text += f" at point {tuple(float(v) for v in point)}"
        super().__init__(text)


class Expr:
    """Base class of expression nodes.

    Nodes are hashable by identity; structural equality is not needed
    anywhere and would cost a full tree walk.
    """

    __slots__ = ("free", "__weakref__")

    free: frozenset

    # arithmetic sugar -------------------------------------------------
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

    def __pow__(self, n: int):
        return power(self, n)

    def __str__(self) -> str:
        return to_source(self)

    def __repr__(self) -> str:
        return f"Expr({to_source(self)!r})"

    def diff(self, name: str) -> "Expr":
        return differentiate(self, name)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: float):
        self.value = float(value)
        self.free = frozenset()


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self.free = frozenset((name,))


class _Binary(Expr):
    __slots__ = ("a", "b")
    op = "?"

    def __init__(self, a: Expr, b: Expr):
        self.a = a
        self.b = b
        self.free = a.free | b.free


class Add(_Binary):
    __slots__ = ()
    op = "+"


class Sub(_Binary):
    __slots__ = ()
    op = "-"


class Mul(_Binary):
    __slots__ = ()
    op = "*"


class Div(_Binary):
    __slots__ = ()
    op = "/"


class Neg(Expr):
    __slots__ = ("a",)

    def __init__(self, a: Expr):
        self.a = a
        self.free = a.free


class Pow(Expr):
    __slots__ = ("a", "n")

    def __init__(self, a: Expr, n: int):
        self.a = a
        self.n = int(n)
        self.free = a.free


class Func(Expr):
    __slots__ = ("name", "a")

    def __init__(self, name: str, a: Expr):
        if name not in FUNCTIONS:
            raise ValueError(f"unknown function {name!r}")
        self.name = name
        self.a = a
        self.free = a.free


ZERO = Const(0.0)
ONE = Const(1.0)


def const(value: float) -> Const:
    if value == 0.0:
        return ZERO
    if value == 1.0:
        return ONE
    return Const(value)


def var(name: str) -> Var:
    return Var(name)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float, np.integer, np.floating)):
        return const(float(value))
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


def is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 0.0


def _is_one(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 1.0


# smart constructors with the minimal folding ---------------------------

def add(a: Expr, b: Expr) -> Expr:
    if is_zero(a):
        return b
    if is_zero(b):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return const(a.value + b.value)
    if isinstance(b, Neg):
        return sub(a, b.a)
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if is_zero(b):
        return a
    if is_zero(a):
        return neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return const(a.value - b.value)
    if isinstance(b, Neg):
        return add(a, b.a)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if is_zero(a) or is_zero(b):
        return ZERO
    if _is_one(a):
        return b
    if _is_one(b):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return const(a.value * b.value)
    if isinstance(a, Const) and a.value == -1.0:
        return neg(b)
    if isinstance(b, Const) and b.value == -1.0:
        return neg(a)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if is_zero(a):
        return ZERO
    if _is_one(b):
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return const(a.value / b.value)
    return Div(a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return const(-a.value)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


def power(a: Expr, n: int) -> Expr:
    if int(n) != n or n < 0:
        raise ValueError("exponents must be non-negative integers")
    n = int(n)
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const):
        return const(a.value ** n)
    return Pow(a, n)


def func(name: str, a: Expr) -> Expr:
    return Func(name, a)


def esum(terms: Iterable) -> Expr:
    """Balanced sum, keeps tree depth logarithmic in the number of terms."""
    items = [as_expr(t) for t in terms]
    items = [t for t in items if not is_zero(t)]
    if not items:
        return ZERO
    while len(items) > 1:
        nxt = [add(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def eprod(factors: Iterable) -> Expr:
    items = [as_expr(f) for f in factors]
    if any(is_zero(f) for f in items):
        return ZERO
    items = [f for f in items if not _is_one(f)]
    if not items:
        return ONE
    while len(items) > 1:
        nxt = [mul(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


# parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


class _Parser:
    def __init__(self, source: str, variables: Sequence[str]):
        self.src = source
        self.vars = set(variables)
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        n = len(source)
        while pos < n:
            if source[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(source, pos)
            if m is None or m.end() == pos:
                raise ParseError(pos, f"unexpected character {source[pos]!r}")
            kind = m.lastgroup
            text = m.group(kind)
            self.tokens.append((kind, text, m.start(kind)))
            pos = m.end()
        self.tokens.append(("end", "", n))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, off = self.take()
        if kind != "op" or text != op:
            raise ParseError(off, f"unexpected {text or 'end of input'!r}", repr(op))

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                rhs = self.term()
                node = add(node, rhs) if text == "+" else sub(node, rhs)
            else:
                return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                rhs = self.factor()
                node = mul(node, rhs) if text == "*" else div(node, rhs)
            else:
                return node

    def factor(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            kind, text, off = self.take()
            if kind != "num":
                raise ParseError(off, f"unexpected {text or 'end of input'!r}", "integer exponent")
            if not text.isdigit():
                raise ParseError(off, f"non-integer exponent {text!r}", "integer exponent")
            return power(base, int(text))
        return base

    def atom(self) -> Expr:
        kind, text, off = self.take()
        if kind == "num":
            return const(float(text))
        if kind == "ident":
            nkind, ntext, _ = self.peek()
            if nkind == "op" and ntext == "(":
                if text not in FUNCTIONS:
                    raise ParseError(off, f"unknown function {text!r}", "one of " + ", ".join(FUNCTIONS))
                self.take()
                arg = self.expr()
                self.expect_op(")")
                return func(text, arg)
            if text not in self.vars:
                raise ParseError(off, f"unknown identifier {text!r}", "a chart coordinate")
            return Var(text)
        if kind == "op" and text == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(off, f"unexpected {text or 'end of input'!r}", "number, identifier or '('")


def parse(source: str, variables: Sequence[str]) -> Expr:
    """Parse ``source`` against the declared coordinate names."""
    if not variables:
        raise ValueError("at least one coordinate name is required")
    if len(set(variables)) != len(variables):
        raise ValueError("coordinate names must be distinct")
    for name in variables:
        if not _IDENT.match(name) or name in FUNCTIONS:
            raise ValueError(f"invalid coordinate name {name!r}")
    p = _Parser(source, variables)
    node = p.expr()
    kind, text, off = p.peek()
    if kind != "end":
        raise ParseError(off, f"unexpected {text!r}", "operator or end of input")
    return node


# printing ----------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _prec(e: Expr) -> int:
    if isinstance(e, Const):
        return 5 if e.value >= 0 else 3
    return _PREC.get(type(e), 5)


def to_source(e: Expr) -> str:
    """Render ``e`` in the input grammar; ``parse(to_source(e))`` round-trips."""
    if isinstance(e, Const):
        v = e.value
        text = repr(abs(v))
        if text in ("inf", "nan"):
            raise ValueError("non-finite literal")
        return text if v >= 0 else "-" + text
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({to_source(e.a)})"
    if isinstance(e, Neg):
        inner = to_source(e.a)
        if _prec(e.a) < 3:
            inner = f"({inner})"
        return "-" + inner
    if isinstance(e, Pow):
        inner = to_source(e.a)
        if _prec(e.a) < 5:
            inner = f"({inner})"
        return f"{inner}^{e.n}"
    p = _prec(e)
    left = to_source(e.a)
    if _prec(e.a) < p:
        left = f"({left})"
    right = to_source(e.b)
    # right operand of - and / needs parens at equal precedence
    if _prec(e.b) < p or (_prec(e.b) == p and isinstance(e, (Sub, Div))) or _prec(e.b) == 3:
        right = f"({right})"
    return f"{left} {e.op} {right}"


# calculus ----------------------------------------------------------------

def differentiate(e: Expr, coordinate: str) -> Expr:
    """Exact partial derivative of ``e`` with respect to ``coordinate``."""
    memo: dict[int, Expr] = {}

    def d(node: Expr) -> Expr:
        if coordinate not in node.free:
            return ZERO
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Var):
            out = ONE
        elif isinstance(node, Add):
            out = add(d(node.a), d(node.b))
        elif isinstance(node, Sub):
            out = sub(d(node.a), d(node.b))
        elif isinstance(node, Mul):
            out = add(mul(d(node.a), node.b), mul(node.a, d(node.b)))
        elif isinstance(node, Div):
            da, db = d(node.a), d(node.b)
            if is_zero(db):
                out = div(da, node.b)
            else:
                out = div(sub(mul(da, node.b), mul(node.a, db)), power(node.b, 2))
        elif isinstance(node, Neg):
            out = neg(d(node.a))
        elif isinstance(node, Pow):
            out = mul(mul(const(node.n), power(node.a, node.n - 1)), d(node.a))
        elif isinstance(node, Func):
            u = node.a
            du = d(u)
            if node.name == "sin":
                out = mul(func("cos", u), du)
            elif node.name == "cos":
                out = neg(mul(func("sin", u), du))
            elif node.name == "exp":
                out = mul(node, du)
            elif node.name == "ln":
                out = div(du, u)
            else:  # sqrt
                out = div(du, mul(const(2.0), node))
        else:  # pragma: no cover
            raise TypeError(type(node))
        memo[key] = out
        return out

    return d(e)


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace coordinate references by expressions."""
    memo: dict[int, Expr] = {}

    def s(node: Expr) -> Expr:
        if not (node.free & mapping.keys()):
            return node
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Var):
            out = as_expr(mapping[node.name])
        elif isinstance(node, Add):
            out = add(s(node.a), s(node.b))
        elif isinstance(node, Sub):
            out = sub(s(node.a), s(node.b))
        elif isinstance(node, Mul):
            out = mul(s(node.a), s(node.b))
        elif isinstance(node, Div):
            out = div(s(node.a), s(node.b))
        elif isinstance(node, Neg):
            out = neg(s(node.a))
        elif isinstance(node, Pow):
            out = power(s(node.a), node.n)
        else:
            out = func(node.name, s(node.a))
        memo[key] = out
        return out

    return s(e)


# evaluation ----------------------------------------------------------------

def _first(mask: np.ndarray) -> int:
    return int(np.flatnonzero(mask)[0])


def evaluate_many(e: Expr, env: Mapping[str, np.ndarray], size: int | None = None) -> np.ndarray:
    """Evaluate ``e`` at a batch of points.

    ``env`` maps coordinate names to equal-length float arrays.  Raises
    :class:`DomainError` (with the index of the first bad point) on division
    by zero, ``ln`` of a non-positive number, ``sqrt`` of a negative number or
    a non-finite result.
    """
    if size is None:
        size = len(next(iter(env.values()))) if env else 1
    memo: dict[int, np.ndarray] = {}

    def ev(node: Expr) -> np.ndarray:
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Const):
            out = np.full(size, node.value)
        elif isinstance(node, Var):
            try:
                out = np.asarray(env[node.name], dtype=float)
            except KeyError:
                raise KeyError(f"no value for coordinate {node.name!r}") from None
        elif isinstance(node, Add):
            out = ev(node.a) + ev(node.b)
        elif isinstance(node, Sub):
            out = ev(node.a) - ev(node.b)
        elif isinstance(node, Mul):
            out = ev(node.a) * ev(node.b)
        elif isinstance(node, Div):
            den = ev(node.b)
            bad = den == 0.0
            if bad.any():
                raise DomainError("division by zero", _first(bad))
            out = ev(node.a) / den
        elif isinstance(node, Neg):
            out = -ev(node.a)
        elif isinstance(node, Pow):
            out = ev(node.a) ** node.n
        else:
            arg = ev(node.a)
            if node.name == "ln":
                bad = arg <= 0.0
                if bad.any():
                    raise DomainError("ln of non-positive value", _first(bad))
                out = np.log(arg)
            elif node.name == "sqrt":
                bad = arg < 0.0
                if bad.any():
                    raise DomainError("sqrt of negative value", _first(bad))
                out = np.sqrt(arg)
            else:
                with np.errstate(over="ignore"):
                    out = getattr(np, node.name)(arg)
        memo[key] = out
        return out

    with np.errstate(over="ignore", invalid="ignore"):
        result = ev(e)
    bad = ~np.isfinite(result)
    if bad.any():
        raise DomainError("non-finite value", _first(bad))
    return result


def evaluate(e: Expr, point: Sequence[float], variables: Sequence[str]) -> float:
    """Evaluate ``e`` at a single point given in ``variables`` order."""
    if len(point) != len(variables):
        raise ValueError(f"point has {len(point)} components, chart has {len(variables)}")
    env = {name: np.array([float(v)]) for name, v in zip(variables, point)}
    try:
        return float(evaluate_many(e, env, 1)[0])
    except DomainError as err:
        raise DomainError(err.message, 0, point) from None

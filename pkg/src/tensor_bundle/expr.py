"""Closed-form scalar expressions in chart coordinates ``x1..xn``.

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' '-'? integer)?
    base   := number | ident | func '(' expr ')' | '(' expr ')'
    func   := sin | cos | exp | log | sqrt
    ident  := x1 | x2 | ... | pi | e

Evaluation returns a :class:`DerivativeTower` holding the value and every
partial derivative up to total order 4, propagated in forward mode through
truncated Taylor series (see :mod:`tensor_bundle.jets`).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownIdentifier
from .jets import Jet, JetSpace, jet_space

__all__ = [
    "Num", "Var", "Const", "Neg", "BinOp", "Pow", "Call",
    "Expression", "DerivativeTower", "parse", "eval_tower", "MAX_ORDER",
]

MAX_ORDER = 4
FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based: x1 -> 0


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(node) -> str:
    """Print an AST back to grammar-conforming source."""
    if isinstance(node, Num):
        v = node.value
        if v == int(v) and abs(v) < 1e15:
            return str(int(v))
        return repr(v)
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Neg):
        arg = node.arg
        if isinstance(arg, (Pow, Neg)):
            return "-" + to_source(arg)
        return "-" + _atom(arg)
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Pow):
        return f"{_atom(node.base)}^{node.exponent}"
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        left = to_source(node.left)
        if isinstance(node.left, BinOp) and _PREC[node.left.op] < p:
            left = f"({left})"
        right = to_source(node.right)
        # left-associative grammar: parenthesise a right operand of equal precedence
        if isinstance(node.right, BinOp) and _PREC[node.right.op] <= p:
            right = f"({right})"
        return f"{left} {node.op} {right}"
    raise TypeError(f"not an expression node: {node!r}")


def _atom(node) -> str:
    s = to_source(node)
    if isinstance(node, (Num, Var, Const, Call)) and not (isinstance(node, Num) and node.value < 0):
        return s
    return f"({s})"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, source: str, nvars: int | None):
        self.source = source
        self.nvars = nvars
        self.tokens = []
        pos = 0
        raw = source.encode()
        while True:
            while pos < len(source) and source[pos].isspace():
                pos += 1
            if pos >= len(source):
                break
            m = _TOKEN.match(source, pos)
            if m is None or m.end() == pos:
                raise ExprSyntaxError(f"unexpected character {source[pos]!r}", source, _byte(source, pos))
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), _byte(source, start)))
            pos = m.end()
        self.end = len(raw)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, self.end)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, val, off = self.take()
        if val != text:
            what = "end of input" if kind is None else repr(val)
            raise ExprSyntaxError(f"expected {text!r}, found {what}", self.source, off)

    def parse(self):
        node = self.expr()
        kind, val, off = self.peek()
        if kind is not None:
            raise ExprSyntaxError(f"unexpected token {val!r}", self.source, off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.factor())
        node = self.base()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, val, off = self.take()
            if kind != "num" or not val.isdigit():
                what = "end of input" if kind is None else repr(val)
                raise ExprSyntaxError(f"expected integer exponent, found {what}", self.source, off)
            node = Pow(node, sign * int(val))
        return node

    def base(self):
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if val in CONSTANTS:
                return Const(val)
            m = re.fullmatch(r"x([1-9]\d*)", val)
            if m:
                idx = int(m.group(1)) - 1
                if self.nvars is not None and idx >= self.nvars:
                    raise UnknownIdentifier(val, off)
                return Var(idx)
            raise UnknownIdentifier(val, off)
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind is None else repr(val)
        raise ExprSyntaxError(f"expected operand, found {what}", self.source, off)


def _byte(source: str, pos: int) -> int:
    return len(source[:pos].encode())


def parse(source: str, nvars: int | None = None) -> "Expression":
    """Parse ``source`` into an :class:`Expression`.

    With ``nvars`` given, variables beyond ``x{nvars}`` raise
    :class:`UnknownIdentifier`.
    """
    return Expression(source, _Parser(source, nvars).parse())


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _max_var(node) -> int:
    if isinstance(node, Var):
        return node.index + 1
    if isinstance(node, (Neg, Call)):
        return _max_var(node.arg)
    if isinstance(node, Pow):
        return _max_var(node.base)
    if isinstance(node, BinOp):
        return max(_max_var(node.left), _max_var(node.right))
    return 0


def _eval(node, xs, space: JetSpace, order: int):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Var):
        return xs[node.index]
    if isinstance(node, Neg):
        return -_eval(node.arg, xs, space, order)
    if isinstance(node, BinOp):
        a = _eval(node.left, xs, space, order)
        b = _eval(node.right, xs, space, order)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if _value(b) == 0.0:
            raise DomainError("division by zero")
        return a / b
    if isinstance(node, Pow):
        a = _eval(node.base, xs, space, order)
        if node.exponent < 0 and _value(a) == 0.0:
            raise DomainError("negative power of zero")
        if isinstance(a, Jet):
            return a ** node.exponent
        return float(a) ** node.exponent
    if isinstance(node, Call):
        a = _eval(node.arg, xs, space, order)
        v = _value(a)
        if node.func == "log" and v <= 0.0:
            raise DomainError(f"log of non-positive value {v}")
        if node.func == "sqrt" and (v < 0.0 or (v == 0.0 and order > 0)):
            raise DomainError(f"sqrt of non-positive value {v}")
        if not isinstance(a, Jet):
            return getattr(math, node.func)(a)
        return getattr(a, node.func)()
    raise TypeError(f"not an expression node: {node!r}")


def _value(a) -> float:
    return float(a.value) if isinstance(a, Jet) else float(a)


@dataclass(frozen=True)
class Expression:
    """Immutable parsed expression; safe to evaluate from several threads."""

    source: str
    ast: object = field(compare=False)

    @property
    def nvars(self) -> int:
        """Highest variable index referenced (``x3`` -> 3)."""
        return _max_var(self.ast)

    def __str__(self) -> str:
        return to_source(self.ast)

    def evaluate(self, x) -> float:
        x = [float(v) for v in x]
        self._check_point(x)
        return float(_value(_eval(self.ast, x, None, 0)))

    def jet(self, xs: list[Jet]) -> Jet:
        """Evaluate with jet arguments (one per coordinate)."""
        if len(xs) < self.nvars:
            raise ValueError(f"expression needs {self.nvars} coordinates, got {len(xs)}")
        space = xs[0].space
        out = _eval(self.ast, xs, space, space.order)
        if not isinstance(out, Jet):
            out = space.constant(out)
        return out

    def _check_point(self, x):
        if len(x) < self.nvars:
            raise ValueError(f"expression needs {self.nvars} coordinates, got {len(x)}")


@dataclass(frozen=True)
class DerivativeTower:
    """Value and partial derivatives up to total order ``order``.

    ``partials`` maps sorted variable tuples, e.g. ``(0, 0, 1)`` for
    ∂³/∂x1²∂x2, to reals; the empty tuple holds the value.
    """

    value: float
    partials: dict
    order: int
    nvars: int

    def __getitem__(self, key) -> float:
        return self.partials[tuple(sorted(key))]

    def partial(self, *indices: int) -> float:
        return self[indices]

    def tensor(self, k: int) -> np.ndarray:
        """All k-th partials as a fully symmetric array of shape (n,)*k."""
        if k > self.order:
            raise ValueError("order exceeds tower order")
        out = np.empty((self.nvars,) * k)
        for idx in np.ndindex(*out.shape):
            out[idx] = self[idx]
        return out

    @classmethod
    def from_jet(cls, j: Jet) -> "DerivativeTower":
        n = j.space.nvars
        parts = {}
        for k in range(j.order + 1):
            for combo in combinations_with_replacement(range(n), k):
                exps = [0] * n
                for v in combo:
                    exps[v] += 1
                parts[combo] = float(j.derivative(exps))
        return cls(float(j.value), parts, j.order, n)


def eval_tower(e: Expression, x, order: int = 2) -> DerivativeTower:
    """Value and every partial of total order <= ``order`` at ``x``."""
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must lie in [0, {MAX_ORDER}]")
    x = np.asarray(x, dtype=float).ravel()
    e._check_point(x)
    space = jet_space(max(len(x), 1), order)
    return DerivativeTower.from_jet(e.jet(space.variables(x)))

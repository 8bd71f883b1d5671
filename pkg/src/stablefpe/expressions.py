"""A small, total arithmetic grammar in one variable ``x`` with symbolic derivatives.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?
    atom   := number | 'x' | 'pi' | 'e' | name '(' expr ')' | '(' expr ')'

Functions: sin, cos, tan, arctan, exp, log, sqrt, abs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = ["ExpressionError", "Expr", "parse", "compile_expression"]


class ExpressionError(ValueError):
    def __init__(self, message: str, source: str = "", pos: int = -1):
        where = f" at position {pos}" if pos >= 0 else ""
        super().__init__(f"{message}{where}: {source!r}" if source else message)
        self.pos = pos


FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "arctan": np.arctan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
CONSTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    v: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Bin:
    op: str
    a: "Node"
    b: "Node"


@dataclass(frozen=True)
class Neg:
    a: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    a: "Node"


Node = Union[Num, Var, Bin, Neg, Call]


def _eval(n: Node, x):
    if isinstance(n, Num):
        return np.full_like(x, n.v)
    if isinstance(n, Var):
        return x
    if isinstance(n, Neg):
        return -_eval(n.a, x)
    if isinstance(n, Call):
        return FUNCS[n.fn](_eval(n.a, x))
    a, b = _eval(n.a, x), _eval(n.b, x)
    if n.op == "+":
        return a + b
    if n.op == "-":
        return a - b
    if n.op == "*":
        return a * b
    if n.op == "/":
        return a / b
    return np.power(a, b)


# --- simplifying constructors keep derivative trees small ---------------------


def _add(a, b):
    if isinstance(a, Num) and a.v == 0:
        return b
    if isinstance(b, Num) and b.v == 0:
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.v + b.v)
    return Bin("+", a, b)


def _sub(a, b):
    if isinstance(b, Num) and b.v == 0:
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.v - b.v)
    if isinstance(a, Num) and a.v == 0:
        return Neg(b)
    return Bin("-", a, b)


def _mul(a, b):
    for p, q in ((a, b), (b, a)):
        if isinstance(p, Num):
            if p.v == 0:
                return Num(0.0)
            if p.v == 1:
                return q
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.v * b.v)
    return Bin("*", a, b)


def _div(a, b):
    if isinstance(a, Num) and a.v == 0:
        return Num(0.0)
    if isinstance(b, Num) and b.v == 1:
        return a
    return Bin("/", a, b)


def _neg(a):
    if isinstance(a, Num):
        return Num(-a.v)
    return Neg(a)


def _const(n: Node) -> bool:
    if isinstance(n, Num):
        return True
    if isinstance(n, Var):
        return False
    if isinstance(n, (Neg, Call)):
        return _const(n.a)
    return _const(n.a) and _const(n.b)


def _diff(n: Node) -> Node:
    if _const(n):
        return Num(0.0)
    if isinstance(n, Var):
        return Num(1.0)
    if isinstance(n, Neg):
        return _neg(_diff(n.a))
    if isinstance(n, Call):
        a, da = n.a, _diff(n.a)
        outer = {
            "sin": lambda: Call("cos", a),
            "cos": lambda: Neg(Call("sin", a)),
            "tan": lambda: _div(Num(1.0), Bin("^", Call("cos", a), Num(2.0))),
            "arctan": lambda: _div(Num(1.0), _add(Num(1.0), Bin("^", a, Num(2.0)))),
            "exp": lambda: Call("exp", a),
            "log": lambda: _div(Num(1.0), a),
            "sqrt": lambda: _div(Num(0.5), Call("sqrt", a)),
            "abs": lambda: _div(a, Call("abs", a)),
        }[n.fn]()
        return _mul(outer, da)
    a, b = n.a, n.b
    if n.op == "+":
        return _add(_diff(a), _diff(b))
    if n.op == "-":
        return _sub(_diff(a), _diff(b))
    if n.op == "*":
        return _add(_mul(_diff(a), b), _mul(a, _diff(b)))
    if n.op == "/":
        return _div(_sub(_mul(_diff(a), b), _mul(a, _diff(b))), Bin("^", b, Num(2.0)))
    # power
    if _const(b):
        return _mul(_mul(b, Bin("^", a, _sub(b, Num(1.0)))), _diff(a))
    # a^b = exp(b log a)
    return _mul(n, _add(_mul(_diff(b), Call("log", a)), _div(_mul(b, _diff(a)), a)))


# --- parser -----------------------------------------------------------------


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(src):
            if src[pos:].strip() == "":
                break
            m = _TOKEN.match(src, pos)
            if not m or m.end() == pos:
                raise ExpressionError("unexpected character", src, pos + len(src[pos:]) - len(src[pos:].lstrip()))
            start = m.start(m.lastindex)
            if m.group(1):
                self.toks.append(("num", m.group(1), start))
            elif m.group(2):
                self.toks.append(("name", m.group(2), start))
            else:
                op = "^" if m.group(3) == "**" else m.group(3)
                self.toks.append(("op", op, start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "", len(self.src))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, value: str):
        kind, v, pos = self.take()
        if v != value:
            raise ExpressionError(f"expected {value!r}", self.src, pos)

    def parse(self) -> Node:
        if not self.toks:
            raise ExpressionError("empty expression", self.src, 0)
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected {v!r}", self.src, pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.unary())
        return node

    def unary(self) -> Node:
        kind, v, _ = self.peek()
        if kind == "op" and v in ("-", "+"):
            self.take()
            inner = self.unary()
            return Neg(inner) if v == "-" else inner
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Bin("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, v, pos = self.take()
        if kind == "num":
            return Num(float(v))
        if kind == "name":
            if v == "x":
                return Var()
            if v in CONSTS:
                return Num(CONSTS[v])
            if v in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(v, arg)
            raise ExpressionError(f"unknown name {v!r}", self.src, pos)
        if v == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ExpressionError("unexpected end of expression", self.src, pos)
        raise ExpressionError(f"unexpected {v!r}", self.src, pos)


class Expr:
    """Compiled expression: callable on floats or arrays, with ``derivative()``."""

    def __init__(self, source: str, node: Node):
        self.source = source
        self.node = node

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = _eval(self.node, np.atleast_1d(arr).astype(float))
        return out.reshape(arr.shape) if arr.ndim else float(out[0])

    def derivative(self) -> "Expr":
        return Expr(f"d/dx[{self.source}]", _diff(self.node))

    def __repr__(self) -> str:
        return f"Expr({self.source!r})"


def parse(source: str) -> Node:
    if not isinstance(source, str):
        raise ExpressionError(f"expression must be a string, got {type(source).__name__}")
    return _Parser(source).parse()


def compile_expression(source: str) -> Expr:
    return Expr(source, parse(source))

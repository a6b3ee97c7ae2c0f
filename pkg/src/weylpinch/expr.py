"""A small arithmetic expression language for metric components.

Grammar (standard precedence, ``^`` right-associative, unary minus binding
looser than ``^`` so that ``-x^2 == -(x^2)``)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := primary ("^" unary)?
    primary := NUMBER | "pi" | IDENT | FUNC "(" expr ")" | "(" expr ")"

There are no conditionals and no user functions, so evaluation is total on
the domain of the transcendental functions involved.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import hyperdual
from .hyperdual import EvaluationError

BINARY_KINDS = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}
FUNCTION_KINDS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt")
NODE_KINDS = ("const", "coord", "neg") + tuple(BINARY_KINDS) + FUNCTION_KINDS


class ExprSyntaxError(ValueError):
    """Malformed expression or metric spec; carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.msg = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Expr:
    """Expression tree node.

    ``value`` is the float of a ``const`` node and the name of a ``coord``
    node; ``children`` holds the operands of every other kind.
    """

    kind: str
    children: tuple["Expr", ...] = ()
    value: float | str | None = None

    def __post_init__(self):
        if self.kind not in NODE_KINDS:
            raise ValueError(f"unknown node kind {self.kind!r}")
        if self.kind == "const":
            v = self.value
            # literals are unsigned; a sign is always a neg node
            if not isinstance(v, float) or not math.isfinite(v) or math.copysign(1.0, v) < 0:
                raise ValueError(f"const nodes hold finite non-negative floats, got {v!r}")

    def __str__(self) -> str:
        return to_text(self)


def const(v: float) -> Expr:
    return Expr("const", value=float(v))


def coord(name: str) -> Expr:
    return Expr("coord", value=name)


# tokenizer -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "op", "eof"
    text: str
    column: int  # 1-based


def tokenize(text: str, line: int = 1, column_offset: int = 0) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", line, column_offset + pos + 1)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), column_offset + pos + 1))
        pos = m.end()
    tokens.append(Token("eof", "", column_offset + len(text) + 1))
    return tokens


# parser ----------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, coords: tuple[str, ...] | None, line: int, column_offset: int):
        self.tokens = tokenize(text, line, column_offset)
        self.i = 0
        self.coords = coords
        self.line = line

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        if tok.kind == "eof" and self.i > 0:
            # an expression that stops early is reported at its dangling token
            prev = self.tokens[self.i - 1]
            raise ExprSyntaxError(f"{message} after {prev.text!r}", self.line, prev.column)
        raise ExprSyntaxError(message, self.line, tok.column)

    def expect(self, text: str):
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            self.error(f"expected {text!r}")
        return self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek().kind != "eof":
            self.error(f"unexpected {self.peek().text!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = Expr("add" if op == "+" else "sub", (node, self.term()))
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = Expr("mul" if op == "*" else "div", (node, self.unary()))
        return node

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Expr("neg", (self.unary(),))
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            return Expr("pow", (base, self.unary()))
        return base

    def primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            v = float(tok.text)
            if not math.isfinite(v):
                raise ExprSyntaxError(f"numeric literal {tok.text!r} overflows", self.line, tok.column)
            return const(v)
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name in FUNCTION_KINDS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Expr(name, (arg,))
            if name == "pi":
                return const(math.pi)
            if self.coords is not None and name not in self.coords:
                raise ExprSyntaxError(f"unknown identifier {name!r}", self.line, tok.column)
            return coord(name)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "eof":
            self.error("expected an operand")
        self.error(f"unexpected {tok.text!r}")


def parse(text: str, coords: tuple[str, ...] | None = None, *, line: int = 1, column_offset: int = 0) -> Expr:
    """Parse ``text``; with ``coords`` given, any other identifier is an error."""
    return _Parser(text, tuple(coords) if coords is not None else None, line, column_offset).parse()


# printer ---------------------------------------------------------------------


def to_text(node: Expr) -> str:
    """Fully parenthesized text that parses back to a structurally equal tree."""
    k = node.kind
    if k == "const":
        return repr(float(node.value))
    if k == "coord":
        return str(node.value)
    if k == "neg":
        return f"(-{to_text(node.children[0])})"
    if k in BINARY_KINDS:
        a, b = node.children
        return f"({to_text(a)} {BINARY_KINDS[k]} {to_text(b)})"
    return f"{k}({to_text(node.children[0])})"


# evaluation ------------------------------------------------------------------


def evaluate(node: Expr, env: Mapping[str, object]):
    """Evaluate over floats, numpy arrays or :class:`~weylpinch.hyperdual.Jet` values."""
    k = node.kind
    if k == "const":
        return node.value
    if k == "coord":
        try:
            return env[node.value]
        except KeyError:
            raise EvaluationError(f"unbound coordinate {node.value!r}") from None
    if k == "neg":
        return -evaluate(node.children[0], env)
    if k in BINARY_KINDS:
        a = evaluate(node.children[0], env)
        b = evaluate(node.children[1], env)
        if k == "add":
            return a + b
        if k == "sub":
            return a - b
        if k == "mul":
            return a * b
        if k == "div":
            if not isinstance(b, hyperdual.Jet) and _any_zero(b):
                raise EvaluationError("division by zero")
            return a / b
        return hyperdual.power(a, b)
    return hyperdual.FUNCTIONS[k](evaluate(node.children[0], env))


def _any_zero(b) -> bool:
    return bool(np.any(np.asarray(b) == 0.0))


def coords_used(node: Expr) -> set[str]:
    if node.kind == "coord":
        return {node.value}
    out: set[str] = set()
    for c in node.children:
        out |= coords_used(c)
    return out


def depth(node: Expr) -> int:
    return 1 + max((depth(c) for c in node.children), default=0)

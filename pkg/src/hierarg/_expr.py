"""Tiny arithmetic expressions for initial data on the command line.

Supported: numbers, ``x``, ``pi``, ``+ - * / **``, parentheses, and the
functions ``sin`` and ``cos``.  That covers profiles like ``0.1*sin(x)``
and ``0.1*(1 - cos(x))`` without pulling in a general parser.
"""

from __future__ import annotations

import math
import re

import numpy as np

from .errors import DomainError

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?|(\*\*)|([-+*/()])|([A-Za-z_]+))")
_NUMBER = re.compile(r"(\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise DomainError(f"cannot parse expression near {text[pos:]!r}")
            break
        tokens.append(m.group(0).strip())
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expect=None):
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise DomainError(f"expected {expect!r}, found {tok!r}")
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            node = (lambda a, b: (lambda x: a(x) + b(x)))(node, rhs) if op == "+" \
                else (lambda a, b: (lambda x: a(x) - b(x)))(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            node = (lambda a, b: (lambda x: a(x) * b(x)))(node, rhs) if op == "*" \
                else (lambda a, b: (lambda x: a(x) / b(x)))(node, rhs)
        return node

    def unary(self):
        sign = 1.0
        while self.peek() in ("+", "-"):
            if self.take() == "-":
                sign = -sign
        node = self.power()
        if sign < 0:
            return (lambda a: (lambda x: -a(x)))(node)
        return node

    def power(self):
        base = self.atom()
        if self.peek() == "**":
            self.take()
            exponent = self.unary()
            return (lambda a, b: (lambda x: a(x) ** b(x)))(base, exponent)
        return base

    def atom(self):
        tok = self.peek()
        if tok is None:
            raise DomainError("unexpected end of expression")
        if _NUMBER.fullmatch(tok) or re.fullmatch(r"(?:\d+\.?\d*|\.\d+)[eE][-+]?\d+", tok):
            self.take()
            val = float(tok)
            return lambda x: val
        if tok == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if tok in ("sin", "cos"):
            fn = np.sin if tok == "sin" else np.cos
            self.take()
            self.take("(")
            node = self.expr()
            self.take(")")
            return (lambda f, a: (lambda x: f(a(x))))(fn, node)
        if tok == "x":
            self.take()
            return lambda x: np.asarray(x, dtype=float)
        if tok == "pi":
            self.take()
            return lambda x: math.pi
        raise DomainError(f"unknown token {tok!r} in expression")


def compile_expression(text: str):
    """Compile a profile expression into a vectorized callable of x."""
    parser = _Parser(_tokenize(text))
    fn = parser.expr()
    if parser.peek() is not None:
        raise DomainError(f"trailing input {parser.peek()!r} in expression")

    def wrapped(x):
        out = fn(x)
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(x)).copy() \
            if np.shape(out) != np.shape(x) else out

    return wrapped

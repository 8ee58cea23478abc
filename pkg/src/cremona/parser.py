"""Recursive-descent parser for polynomial expressions with exact rational coefficients.

The grammar is documented in docs/grammar.md. Juxtaposition (``2x``) is an
error, exponents are non-negative integer literals, and division is allowed
only by nonzero constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .field import QQ, Field
from .poly import Polynomial


class ParseError(ValueError):
    def __init__(self, message: str, src: str, pos: int):
        self.message, self.src, self.pos = message, src, pos
        super().__init__(f"{message} at position {pos}\n  {src}\n  {' ' * pos}^")


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()])|(?P<bad>\S))")


@dataclass(frozen=True)
class Token:
    kind: str  # num | name | op | end
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    out = []
    i = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if m is None:  # only trailing whitespace left
            break
        kind = m.lastgroup
        start = m.start(kind)
        if kind == "bad":
            raise ParseError(f"unexpected character {m.group(kind)!r}", src, start)
        out.append(Token(kind, m.group(kind), start))
        i = m.end()
    out.append(Token("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str, variables: Sequence[str], field: Field):
        self.src = src
        self.vars = {name: i for i, name in enumerate(variables)}
        if len(self.vars) != len(variables):
            raise ValueError("duplicate variable names")
        self.n = len(variables)
        self.field = field
        self.toks = tokenize(src)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, self.src, tok.pos)

    def parse(self) -> Polynomial:
        if self.peek().kind == "end":
            self.fail("empty expression")
        out = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            if tok.kind in ("num", "name") or tok.text == "(":
                self.fail("implicit multiplication is not allowed; write '*'")
            self.fail(f"unexpected {tok.text!r}")
        return out

    def expr(self) -> Polynomial:
        acc = self.term()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            op = self.take().text
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Polynomial:
        acc = self.unary()
        while self.peek().kind == "op" and self.peek().text in ("*", "/"):
            op = self.take()
            rhs_tok = self.peek()
            rhs = self.unary()
            if op.text == "*":
                acc = acc * rhs
            else:
                if not rhs.is_constant():
                    self.fail("division is only allowed by a constant", rhs_tok)
                c = rhs.coefficient((0,) * self.n)
                if c == 0:
                    self.fail("division by zero", rhs_tok)
                acc = acc.scale(self.field.inv(c))
        return acc

    def unary(self) -> Polynomial:
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("+", "-"):
            self.take()
            inner = self.unary()
            return -inner if tok.text == "-" else inner
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            tok = self.peek()
            if tok.kind != "num":
                self.fail("exponent must be a non-negative integer literal", tok)
            self.take()
            base = base ** int(tok.text)
            if self.peek().kind == "op" and self.peek().text == "^":
                self.fail("chained exponents are ambiguous; add parentheses")
        return base

    def atom(self) -> Polynomial:
        tok = self.take()
        if tok.kind == "num":
            return Polynomial.constant(self.field(int(tok.text)), self.n, self.field)
        if tok.kind == "name":
            if tok.text not in self.vars:
                self.fail(f"unknown variable {tok.text!r}", tok)
            return Polynomial.var(self.vars[tok.text], self.n, self.field)
        if tok.kind == "op" and tok.text == "(":
            inner = self.expr()
            close = self.peek()
            if close.kind != "op" or close.text != ")":
                self.fail("expected ')'", close)
            self.take()
            return inner
        if tok.kind == "end":
            self.fail("unexpected end of input", tok)
        self.fail(f"unexpected {tok.text!r}", tok)


def parse_polynomial(src: str, variables: Sequence[str], field: Field = QQ) -> Polynomial:
    """Parse an expression into an exact Polynomial over ``field``."""
    return _Parser(src, variables, field).parse()


def parse_rational(src) -> Fraction:
    """An integer, a "p/q" string, or a number given as a JSON integer."""
    if isinstance(src, bool):
        raise ValueError(f"not a rational: {src!r}")
    if isinstance(src, int):
        return Fraction(src)
    if isinstance(src, str) and re.fullmatch(r"\s*[-+]?\d+(\s*/\s*[-+]?\d+)?\s*", src):
        num, _, den = src.partition("/")
        if den and int(den) == 0:
            raise ValueError(f"zero denominator in {src!r}")
        return Fraction(int(num), int(den) if den else 1)
    raise ValueError(f"not a rational: {src!r} (use an integer or a 'p/q' string)")


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_point(coords: Sequence, nvars: int | None = None) -> tuple:
    pt = tuple(QQ(parse_rational(c)) for c in coords)
    if nvars is not None and len(pt) != nvars:
        raise ValueError(f"point {list(coords)} has {len(pt)} coordinates, expected {nvars}")
    if not any(pt):
        raise ValueError("the zero vector is not a projective point")
    return pt

"""The expression language of the command line.

Class expressions over a space::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | power
    power   := atom ['^' ['-'] INT]
    atom    := INT | 'i' | basis name | '(' expr ')'
             | 'p1' '(' expr ')' | 'p2' '(' expr ')'      on product spaces
             | 'delta'                                    on self products
             | 'ch' '(' kexpr ')' | 'v' '(' kexpr ')'

K-theory expressions::

    kexpr   := kterm ('+' kterm)*
    kterm   := kshift ('*' kshift)*
    kshift  := katom ('[' ['-'] INT ']')*
    katom   := 'O' | 'O' '(' expr ')' | 'T' | 'dual' '(' kexpr ')'
             | 'box' '(' kexpr ',' kexpr ')' | '(' kexpr ')'

Parsing is whitespace insensitive and deterministic; every error carries
the offending position.  Division and negative powers require the constant
term of the divisor to be nonzero, which over a nilpotent positive part is
exactly invertibility.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coeffs import GaussRat, I, ONE, coerce
from .cohomology import CohClass, Space, diagonal_class, pullback
from .charclasses import (
    Dual,
    ExternalTensor,
    KExpr,
    LineBundle,
    Shift,
    Structure,
    Sum,
    Tangent,
    Tensor,
    chern_character,
    mukai_vector,
    series_inverse,
)
from .errors import NotAProductError, ParseError

_KEYWORDS = {"i", "O", "T", "dual", "box", "v", "ch", "p1", "p2", "delta"}

_SYMBOLS = "+-*/^()[],"


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", one of the symbol characters, or "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        c = text[pos]
        if c.isspace():
            pos += 1
            continue
        if c.isdigit():
            start = pos
            while pos < n and text[pos].isdigit():
                pos += 1
            tokens.append(Token("num", text[start:pos], start))
            continue
        if c.isalpha() or c == "_":
            start = pos
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            tokens.append(Token("ident", text[start:pos], start))
            continue
        if c in _SYMBOLS:
            tokens.append(Token(c, c, pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character {c!r}", pos)
    tokens.append(Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0

    # -- token plumbing ---------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, kind: str) -> Token:
        token = self.peek()
        if token.kind != kind:
            raise ParseError(
                f"unexpected token {token.text!r}", token.pos, expected=[kind]
            )
        return self.advance()

    def finish(self) -> None:
        token = self.peek()
        if token.kind != "end":
            raise ParseError(f"trailing input {token.text!r}", token.pos)

    def integer(self) -> int:
        negative = False
        if self.peek().kind == "-":
            self.advance()
            negative = True
        token = self.expect("num")
        value = int(token.text)
        return -value if negative else value

    # -- class expressions --------------------------------------------------

    def expr(self, space: Space) -> CohClass:
        value = self.term(space)
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term(space)
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self, space: Space) -> CohClass:
        value = self.factor(space)
        while self.peek().kind in ("*", "/"):
            op = self.advance()
            rhs = self.factor(space)
            if op.kind == "*":
                value = value * rhs
            else:
                value = value * _invert_class(rhs, op.pos)
        return value

    def factor(self, space: Space) -> CohClass:
        if self.peek().kind == "-":
            self.advance()
            return -self.factor(space)
        return self.power(space)

    def power(self, space: Space) -> CohClass:
        base = self.atom(space)
        if self.peek().kind == "^":
            caret = self.advance()
            exponent = self.integer()
            if exponent < 0:
                base = _invert_class(base, caret.pos)
                exponent = -exponent
            return base**exponent
        return base

    def atom(self, space: Space) -> CohClass:
        token = self.peek()
        if token.kind == "num":
            self.advance()
            return space.scalar(int(token.text))
        if token.kind == "(":
            self.advance()
            value = self.expr(space)
            self.expect(")")
            return value
        if token.kind == "ident":
            return self.named_atom(space)
        raise ParseError(
            f"unexpected token {token.text!r}",
            token.pos,
            expected=["number", "name", "("],
        )

    def named_atom(self, space: Space) -> CohClass:
        token = self.advance()
        name = token.text
        if name == "i":
            return space.scalar(I)
        if name in ("p1", "p2"):
            if space.factors is None:
                raise ParseError(
                    f"{name} requires a product space, not {space.name!r}", token.pos
                )
            which = 1 if name == "p1" else 2
            self.expect("(")
            inner = self.expr(space.factors[which - 1])
            self.expect(")")
            return pullback(space, which, inner)
        if name == "delta":
            if space.factors is None or space.factors[0] is not space.factors[1]:
                raise ParseError(
                    "delta requires a product of a space with itself", token.pos
                )
            return diagonal_class(space.factors[0])
        if name == "ch":
            self.expect("(")
            inner = self.kexpr(space)
            self.expect(")")
            return chern_character(inner)
        if name == "v":
            self.expect("(")
            inner = self.kexpr(space)
            self.expect(")")
            return mukai_vector(inner)
        index = _basis_index(space, name)
        if index is None:
            raise ParseError(f"unknown basis name {name!r}", token.pos)
        return space.basis_class(index)

    # -- K-theory expressions -------------------------------------------------

    def kexpr(self, space: Space) -> KExpr:
        value = self.kterm(space)
        while self.peek().kind == "+":
            self.advance()
            value = Sum(value, self.kterm(space))
        return value

    def kterm(self, space: Space) -> KExpr:
        value = self.kshift(space)
        while self.peek().kind == "*":
            self.advance()
            value = Tensor(value, self.kshift(space))
        return value

    def kshift(self, space: Space) -> KExpr:
        value = self.katom(space)
        while self.peek().kind == "[":
            self.advance()
            steps = self.integer()
            self.expect("]")
            value = Shift(value, steps)
        return value

    def katom(self, space: Space) -> KExpr:
        token = self.peek()
        if token.kind == "(":
            self.advance()
            value = self.kexpr(space)
            self.expect(")")
            return value
        if token.kind != "ident":
            raise ParseError(
                f"unexpected token {token.text!r}",
                token.pos,
                expected=["O", "T", "dual", "box", "("],
            )
        name = token.text
        if name == "O":
            self.advance()
            if self.peek().kind == "(":
                self.advance()
                c1 = self.expr(space)
                self.expect(")")
                return LineBundle(c1)
            return Structure(space)
        if name == "T":
            self.advance()
            return Tangent(space)
        if name == "dual":
            self.advance()
            self.expect("(")
            inner = self.kexpr(space)
            self.expect(")")
            return Dual(inner)
        if name == "box":
            self.advance()
            if space.factors is None:
                raise ParseError(
                    f"box requires a product space, not {space.name!r}", token.pos
                )
            self.expect("(")
            left = self.kexpr(space.factors[0])
            self.expect(",")
            right = self.kexpr(space.factors[1])
            self.expect(")")
            return ExternalTensor(left, right)
        raise ParseError(
            f"unknown expression head {name!r}",
            token.pos,
            expected=["O", "T", "dual", "box"],
        )

    # -- scalar expressions -----------------------------------------------------

    def scalar_expr(self) -> GaussRat:
        value = self.scalar_term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.scalar_term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def scalar_term(self) -> GaussRat:
        value = self.scalar_factor()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.scalar_factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def scalar_factor(self) -> GaussRat:
        if self.peek().kind == "-":
            self.advance()
            return -self.scalar_factor()
        token = self.peek()
        if token.kind == "num":
            self.advance()
            base = GaussRat(int(token.text))
        elif token.kind == "ident" and token.text == "i":
            self.advance()
            base = I
        elif token.kind == "(":
            self.advance()
            base = self.scalar_expr()
            self.expect(")")
        else:
            raise ParseError(
                f"unexpected token {token.text!r}",
                token.pos,
                expected=["number", "i", "("],
            )
        if self.peek().kind == "^":
            self.advance()
            base = base ** self.integer()
        return base


_BASIS_INDEX_CACHE: dict[int, dict[str, int]] = {}


def _basis_index(space: Space, name: str) -> int | None:
    table = _BASIS_INDEX_CACHE.get(id(space))
    if table is None:
        table = {e.name: i for i, e in enumerate(space.basis)}
        _BASIS_INDEX_CACHE[id(space)] = table
    return table.get(name)


def _invert_class(u: CohClass, pos: int) -> CohClass:
    constant = u.constant_term()
    if constant.is_zero:
        raise ParseError("division by a class with zero constant term", pos)
    return (ONE / constant) * series_inverse(u / constant)


def parse_class_expr(text: str, space: Space) -> CohClass:
    """Parse a class expression against a space; exact or a ParseError."""
    parser = _Parser(text)
    value = parser.expr(space)
    parser.finish()
    return value


def parse_kexpr(text: str, space: Space) -> KExpr:
    """Parse a K-theory expression against a space."""
    parser = _Parser(text)
    value = parser.kexpr(space)
    parser.finish()
    return value


def parse_scalar(text: str) -> GaussRat:
    """Parse a scalar expression over Q(i)."""
    parser = _Parser(text)
    value = parser.scalar_expr()
    parser.finish()
    return value

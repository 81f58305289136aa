"""Recursive-descent parser for power-basis expressions.

Grammar (whitespace is insignificant)::

    expr   := [('+'|'-')] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' signed-integer)?
    atom   := integer | constant-name | variable-name | '(' expr ')'

The optional leading sign of ``expr`` is the only extension over the bare
grammar; the canonical printer needs it for leading negative terms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ladderkit.errors import NonMonomialDivisor, NotRepresentable, ParseError, UnknownIdentifier
from ladderkit.symexpr.coefficient import Coefficient
from ladderkit.symexpr.functions import SymbolicFunction, SymbolTable

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        i = m.end()
    toks.append(_Tok("end", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, symbols: SymbolTable):
        self.toks = tokenize(text)
        self.i = 0
        self.symbols = symbols

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", self.tok.pos)
        return self.take()

    def parse(self) -> SymbolicFunction:
        value = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return value

    def expr(self) -> SymbolicFunction:
        sign = 1
        if self.tok.text in "+-" and self.tok.kind == "op":
            sign = -1 if self.take().text == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> SymbolicFunction:
        value = self.factor()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.take()
            rhs = self.factor()
            if op.text == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", op.pos)
                if not rhs.is_monomial():
                    raise NonMonomialDivisor(
                        f"divisor '{rhs}' is not a single coefficient*power term", op.pos
                    )
                value = value.divide(rhs)
        return value

    def factor(self) -> SymbolicFunction:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            caret = self.take()
            k = self.signed_integer()
            if k < 0:
                if base.is_zero():
                    raise ParseError("negative power of zero", caret.pos)
                if not base.is_monomial():
                    raise NonMonomialDivisor("negative power of a sum is not representable", caret.pos)
            try:
                base = base ** k
            except NotRepresentable as exc:
                raise ParseError(str(exc), caret.pos) from exc
        return base

    def signed_integer(self) -> int:
        paren = False
        if self.tok.text == "(":
            self.take()
            paren = True
        sign = 1
        if self.tok.kind == "op" and self.tok.text in "+-":
            sign = -1 if self.take().text == "-" else 1
        if self.tok.kind != "int":
            raise ParseError("expected an integer exponent", self.tok.pos)
        k = sign * int(self.take().text)
        if paren:
            self.expect(")")
        return k

    def atom(self) -> SymbolicFunction:
        t = self.tok
        table = self.symbols
        if t.kind == "int":
            self.take()
            return SymbolicFunction.constant(int(t.text), table)
        if t.kind == "name":
            self.take()
            if t.text == table.variable:
                return SymbolicFunction.monomial(1, 1, table)
            if t.text in table.names:
                return SymbolicFunction.constant(Coefficient.symbol(t.text), table)
            raise UnknownIdentifier(f"unknown identifier {t.text!r}", t.pos)
        if t.text == "(":
            self.take()
            value = self.expr()
            self.expect(")")
            return value
        found = t.text or "end of input"
        raise ParseError(f"unexpected {found!r}", t.pos)


def parse_expr(text: str, symbols: SymbolTable | None = None) -> SymbolicFunction:
    """Parse ``text`` into a SymbolicFunction over ``symbols``."""
    symbols = symbols or SymbolTable()
    return _Parser(text, symbols).parse()

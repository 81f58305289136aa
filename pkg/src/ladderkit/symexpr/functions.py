"""Finite sums  sum_p c_p * x^p  with exact rational-function coefficients."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Union

import numpy as np

from ladderkit.errors import NotRepresentable
from ladderkit.symexpr.coefficient import Coefficient, Number
from ladderkit.symexpr.coefficient import _paren_if_sum as _paren
from ladderkit.symexpr.coefficient import _paren_unless_factor as _den

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class SymbolTable:
    """Ordered constant names plus the reserved name of the variable."""

    names: tuple[str, ...] = ()
    variable: str = "x"

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate constant names in {self.names}")
        for n in self.names + (self.variable,):
            if not _IDENT.match(n):
                raise ValueError(f"invalid identifier {n!r}")
        if self.variable in self.names:
            raise ValueError(f"variable name {self.variable!r} cannot also be a constant")

    def merge(self, other: "SymbolTable") -> "SymbolTable":
        if other is self or other.names == self.names:
            return self
        extra = tuple(n for n in other.names if n not in self.names)
        return SymbolTable(self.names + extra, self.variable)

    def with_names(self, names) -> "SymbolTable":
        extra = tuple(n for n in names if n not in self.names)
        return SymbolTable(self.names + extra, self.variable) if extra else self


Scalar = Union[Coefficient, int, Fraction]


def _coerce_terms(terms) -> tuple[tuple[int, Coefficient], ...]:
    out: dict[int, Coefficient] = {}
    items = terms.items() if isinstance(terms, Mapping) else terms
    for p, c in items:
        if not isinstance(p, int):
            raise TypeError(f"exponent {p!r} is not an integer")
        c = Coefficient.coerce(c)
        out[p] = out[p] + c if p in out else c
    return tuple(sorted(((p, c) for p, c in out.items() if not c.is_zero()), key=lambda t: t[0]))


class SymbolicFunction:
    """f(x) = sum_p c_p x^p over integer p; zero coefficients are never stored."""

    __slots__ = ("_terms", "table")

    def __init__(self, terms=(), table: SymbolTable | None = None):
        t = _coerce_terms(terms)
        if table is None:
            table = SymbolTable()
        used = sorted({n for _, c in t for n in c.free_symbols})
        table = table.with_names(used)
        object.__setattr__(self, "_terms", t)
        object.__setattr__(self, "table", table)

    def __setattr__(self, name, value):
        raise AttributeError("SymbolicFunction is immutable")

    # constructors ---------------------------------------------------------

    @classmethod
    def constant(cls, c: Scalar, table: SymbolTable | None = None) -> "SymbolicFunction":
        return cls({0: c}, table)

    @classmethod
    def monomial(cls, c: Scalar, p: int, table: SymbolTable | None = None) -> "SymbolicFunction":
        return cls({p: c}, table)

    @classmethod
    def zero(cls, table: SymbolTable | None = None) -> "SymbolicFunction":
        return cls((), table)

    # access ---------------------------------------------------------------

    @property
    def terms(self) -> tuple[tuple[int, Coefficient], ...]:
        """(power, coefficient) pairs, most singular power first."""
        return self._terms

    def as_dict(self) -> dict[int, Coefficient]:
        return dict(self._terms)

    def coefficient(self, p: int) -> Coefficient:
        for q, c in self._terms:
            if q == p:
                return c
        return Coefficient(0)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(p for p, _ in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return self.support <= {0}

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    @property
    def free_symbols(self) -> tuple[str, ...]:
        return tuple(sorted({n for _, c in self._terms for n in c.free_symbols}))

    def __iter__(self) -> Iterator[tuple[int, Coefficient]]:
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    # ring operations ------------------------------------------------------

    def _promote(self, other) -> "SymbolicFunction":
        if isinstance(other, SymbolicFunction):
            return other
        return SymbolicFunction.constant(Coefficient.coerce(other), self.table)

    def __add__(self, other):
        try:
            other = self._promote(other)
        except TypeError:
            return NotImplemented
        d = self.as_dict()
        for p, c in other:
            d[p] = d[p] + c if p in d else c
        return SymbolicFunction(d, self.table.merge(other.table))

    __radd__ = __add__

    def __neg__(self):
        return SymbolicFunction({p: -c for p, c in self._terms}, self.table)

    def __sub__(self, other):
        try:
            other = self._promote(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._promote(other) - self

    def __mul__(self, other):
        try:
            other = self._promote(other)
        except TypeError:
            return NotImplemented
        out: dict[int, Coefficient] = {}
        for p, a in self._terms:
            for q, b in other._terms:
                out[p + q] = out[p + q] + a * b if p + q in out else a * b
        return SymbolicFunction(out, self.table.merge(other.table))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if not self.is_monomial():
                raise NotRepresentable(f"negative power of non-monomial {self}")
            (p, c), = self._terms
            return SymbolicFunction({p * k: c ** k}, self.table)
        result = SymbolicFunction.constant(1, self.table)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divide(self, other) -> "SymbolicFunction":
        """Exact division by a single term c*x^q."""
        other = self._promote(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero function")
        if not other.is_monomial():
            raise NotRepresentable(f"cannot divide by non-monomial {other}")
        (q, c), = other.terms
        return SymbolicFunction({p - q: a / c for p, a in self._terms}, self.table.merge(other.table))

    __truediv__ = divide

    def derivative(self) -> "SymbolicFunction":
        return SymbolicFunction({p - 1: c * p for p, c in self._terms if p != 0}, self.table)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Coefficient)):
            other = SymbolicFunction.constant(other)
        if not isinstance(other, SymbolicFunction):
            return NotImplemented
        if self.support != other.support:
            return False
        return all(c == other.coefficient(p) for p, c in self._terms)

    def __hash__(self):
        return hash(tuple((p, hash(c)) for p, c in self._terms))

    # specialization and evaluation -----------------------------------------

    def substitute(self, bindings: Mapping[str, Number]) -> "SymbolicFunction":
        """Exact specialization of every constant; the result has no constants."""
        return SymbolicFunction({p: c.substitute(bindings) for p, c in self._terms}, SymbolTable((), self.table.variable))

    def partial_substitute(self, bindings: Mapping[str, Number]) -> "SymbolicFunction":
        keep = tuple(n for n in self.table.names if n not in bindings)
        return SymbolicFunction(
            {p: c.partial_substitute(bindings) for p, c in self._terms}, SymbolTable(keep, self.table.variable)
        )

    def shift(self, name: str, delta: int) -> "SymbolicFunction":
        return SymbolicFunction({p: c.shift(name, delta) for p, c in self._terms}, self.table)

    def evaluate(self, xi: Number, bindings: Mapping[str, Number] | None = None) -> Fraction:
        """Exact value at a rational point."""
        xi = Fraction(xi)
        total = Fraction(0)
        for p, c in self._terms:
            if p < 0 and xi == 0:
                raise ZeroDivisionError(f"{self} is singular at 0")
            total += c.substitute(bindings or {}) * xi ** p
        return total

    def numeric(self, bindings: Mapping[str, Number] | None = None):
        """Vectorized float evaluator x -> f(x) after exact specialization."""
        pairs = [(p, float(c.substitute(bindings or {}))) for p, c in self._terms]

        def f(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            for p, c in pairs:
                out = out + c * x ** p
            return out

        return f

    def rational_terms(self) -> dict[int, Fraction]:
        return {p: c.to_fraction() for p, c in self._terms}

    # printing -------------------------------------------------------------

    def __str__(self):
        return format_function(self)

    def __repr__(self):
        return f"SymbolicFunction({str(self)!r})"


def format_function(f: SymbolicFunction) -> str:
    """Canonical text: most singular power first, reduced coefficients, parser-compatible."""
    if f.is_zero():
        return "0"
    order = f.table.names
    var = f.table.variable
    out = ""
    for i, (p, c) in enumerate(f.terms):
        negative, num, den = c.parts(order)
        if p == 0:
            if den == "1":
                # a negated sum needs its parentheses: -(s + 1), x - (s + 1)
                body = _paren(num) if negative else num
            else:
                body = f"{_paren(num)}/{_den(den)}"
        else:
            power = var if p == 1 else f"{var}^{p}"
            if num == "1" and den == "1":
                body = power
            elif den == "1":
                body = f"{_paren(num)}*{power}"
            else:
                body = f"{_paren(num)}/{_den(den)}*{power}"
        if i == 0:
            out = ("-" if negative else "") + body
        else:
            out += (" - " if negative else " + ") + body
    return out


def differentiate(f: SymbolicFunction) -> SymbolicFunction:
    return f.derivative()


def multiply(f: SymbolicFunction, g: SymbolicFunction) -> SymbolicFunction:
    return f * g


def substitute_numeric(f: SymbolicFunction, bindings: Mapping[str, Number]) -> SymbolicFunction:
    return f.substitute(bindings)

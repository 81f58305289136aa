"""Exact rational functions over Q in named constants.

Backed by sympy's sparse rational function field.  Every element lives in the
field generated by the *sorted* set of constant names it may depend on, so two
equal coefficients always share a field and compare/hash by their reduced
numerator and denominator.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterable, Mapping, Sequence, Union

from sympy import ZZ, Rational, Symbol, grlex
from sympy.polys.fields import FracElement, FracField, field

from ladderkit.errors import DenominatorVanishes, NotPerfectSquare, UnboundConstant

Number = Union[int, Fraction]


@lru_cache(maxsize=None)
def _field(names: tuple[str, ...]) -> FracField:
    if names:
        return field(",".join(names), ZZ, grlex)[0]
    return field((), ZZ, grlex)[0]


def _names_of(el: FracElement) -> tuple[str, ...]:
    return tuple(str(s) for s in el.field.symbols)


class Coefficient:
    """Immutable element of Q(c1, ..., ck)."""

    __slots__ = ("_el",)

    def __init__(self, value: "Coefficient | Number | FracElement" = 0):
        if isinstance(value, Coefficient):
            el = value._el
        elif isinstance(value, FracElement):
            el = value
        elif isinstance(value, (int, Fraction)):
            F = _field(())
            v = Fraction(value)
            el = F(v.numerator) / F(v.denominator)
        else:
            raise TypeError(f"cannot build a Coefficient from {type(value).__name__}")
        object.__setattr__(self, "_el", el)

    def __setattr__(self, name, value):
        raise AttributeError("Coefficient is immutable")

    # construction -------------------------------------------------------

    @classmethod
    def symbol(cls, name: str) -> "Coefficient":
        F = _field((name,))
        return cls(F.gens[0])

    @classmethod
    def coerce(cls, value) -> "Coefficient":
        return value if isinstance(value, Coefficient) else cls(value)

    # structure ----------------------------------------------------------

    @property
    def names(self) -> tuple[str, ...]:
        """Names of the generating field (a superset of the free symbols)."""
        return _names_of(self._el)

    @property
    def free_symbols(self) -> tuple[str, ...]:
        used = set()
        names = self.names
        for poly in (self._el.numer, self._el.denom):
            for monom, _ in poly.terms():
                used.update(n for n, e in zip(names, monom) if e)
        return tuple(sorted(used))

    def _lift(self, names: tuple[str, ...]) -> FracElement:
        if self.names == names:
            return self._el
        return self._el.set_field(_field(names))

    @staticmethod
    def _common(a: "Coefficient", b: "Coefficient") -> tuple[FracElement, FracElement]:
        if a.names == b.names:
            return a._el, b._el
        names = tuple(sorted(set(a.names) | set(b.names)))
        return a._lift(names), b._lift(names)

    def is_zero(self) -> bool:
        return not self._el.numer

    def is_constant(self) -> bool:
        return not self.free_symbols

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise UnboundConstant(f"coefficient {self} still depends on {self.free_symbols}")
        return self.substitute({})

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        try:
            other = Coefficient.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self._common(self, other)
        return Coefficient(a + b)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient(-self._el)

    def __sub__(self, other):
        try:
            other = Coefficient.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self._common(self, other)
        return Coefficient(a - b)

    def __rsub__(self, other):
        return Coefficient.coerce(other) - self

    def __mul__(self, other):
        try:
            other = Coefficient.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self._common(self, other)
        return Coefficient(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = Coefficient.coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero coefficient")
        a, b = self._common(self, other)
        return Coefficient(a / b)

    def __rtruediv__(self, other):
        return Coefficient.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if self.is_zero():
                raise ZeroDivisionError("negative power of zero")
            return Coefficient(self._el ** k)
        return Coefficient(self._el ** k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Coefficient(other)
        if not isinstance(other, Coefficient):
            return NotImplemented
        a, b = self._common(self, other)
        return not (a - b).numer

    def __hash__(self):
        # fields are keyed by sorted names, so strip unused generators first
        c = self._lift(self.free_symbols)
        return hash((str(c.numer.as_expr()), str(c.denom.as_expr())))

    # specialization -----------------------------------------------------

    def substitute(self, bindings: Mapping[str, Number]) -> Fraction:
        """Exact value after binding every free constant to a rational."""
        names = self.names
        vals: dict[int, Fraction] = {}
        for i, n in enumerate(names):
            if n in bindings:
                vals[i] = Fraction(bindings[n])

        def ev(poly) -> Fraction:
            total = Fraction(0)
            for monom, c in poly.terms():
                term = Fraction(int(c))
                for i, e in enumerate(monom):
                    if e:
                        if i not in vals:
                            raise UnboundConstant(f"constant '{names[i]}' is not bound")
                        term *= vals[i] ** e
                total += term
            return total

        num = ev(self._el.numer)
        den = ev(self._el.denom)
        if den == 0:
            raise DenominatorVanishes(f"denominator of {self} vanishes at {dict(bindings)}")
        return num / den

    def partial_substitute(self, bindings: Mapping[str, Number]) -> "Coefficient":
        """Bind some constants, keep the rest symbolic."""
        bound = {n: v for n, v in bindings.items() if n in self.free_symbols}
        if not bound:
            return self
        rest = tuple(n for n in self.names if n not in bound)
        subs = {Symbol(n): Rational(Fraction(v).numerator, Fraction(v).denominator) for n, v in bound.items()}
        if self._el.denom.as_expr().subs(subs).expand() == 0:
            raise DenominatorVanishes(f"denominator of {self} vanishes at {dict(bound)}")
        expr = self._el.as_expr()
        F = _field(rest)
        return Coefficient(F.from_expr(expr.subs(subs)))

    def shift(self, name: str, delta: Number) -> "Coefficient":
        """Substitute name -> name + delta."""
        if name not in self.names:
            return self
        d = Fraction(delta)
        if d.denominator != 1:
            raise ValueError("shift must be an integer")
        ring = self._el.numer.ring
        g = ring.gens[self.names.index(name)]
        num = self._el.numer.compose(g, g + int(d))
        den = self._el.denom.compose(g, g + int(d))
        return Coefficient(self._el.field(num) / self._el.field(den))

    def sqrt(self) -> "Coefficient":
        """Exact square root when numerator and denominator are squares."""
        if not self.names:
            # sympy's polynomial factoring needs at least one generator
            v = self.to_fraction()
            n, d = isqrt(max(v.numerator, 0)), isqrt(v.denominator)
            if v < 0 or n * n != v.numerator or d * d != v.denominator:
                raise NotPerfectSquare(f"{v} is not the square of a rational")
            return Coefficient(Fraction(n, d))
        return Coefficient(self._el.field(_poly_sqrt(self._el.numer)) / self._el.field(_poly_sqrt(self._el.denom)))

    # printing -----------------------------------------------------------

    def parts(self, order: Sequence[str] | None = None) -> tuple[bool, str, str]:
        """(negative, numerator text, denominator text) with numerator sign pulled out."""
        names = self.names
        order = _full_order(order, names)
        num, den = self._el.numer, self._el.denom
        if _leading_coeff(den, names, order) < 0:
            num, den = -num, -den
        negative = _leading_coeff(num, names, order) < 0
        if negative:
            num = -num
        return negative, _poly_str(num, names, order), _poly_str(den, names, order)

    def to_str(self, order: Sequence[str] | None = None) -> str:
        negative, n, d = self.parts(order)
        if d == "1":
            body = _paren_if_sum(n) if negative else n
        else:
            body = f"{_paren_if_sum(n)}/{_paren_unless_factor(d)}"
        return "-" + body if negative else body

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Coefficient({self})"


def _poly_sqrt(poly):
    if not poly:
        return poly
    content, factors = poly.factor_list()
    content = int(content)
    if content < 0:
        raise NotPerfectSquare(f"{poly.as_expr()} has negative content")
    r = isqrt(content)
    if r * r != content:
        raise NotPerfectSquare(f"content {content} of {poly.as_expr()} is not a square")
    root = poly.ring(r)
    for fac, mult in factors:
        if mult % 2:
            raise NotPerfectSquare(f"{poly.as_expr()} is not a perfect square")
        root *= fac ** (mult // 2)
    return root


def _full_order(order: Sequence[str] | None, names: tuple[str, ...]) -> list[str]:
    out = [n for n in (order or ()) if n in names]
    out += [n for n in names if n not in out]
    return out


def _sorted_terms(poly, names, order):
    idx = [names.index(n) for n in order]

    def key(item):
        monom, _ = item
        exps = tuple(monom[i] for i in idx)
        return (sum(exps), exps)

    return sorted(poly.terms(), key=key, reverse=True)


def _leading_coeff(poly, names, order) -> int:
    terms = _sorted_terms(poly, names, order)
    return int(terms[0][1]) if terms else 0


def _monomial_str(c: int, monom, names, order) -> str:
    factors = []
    for n in order:
        e = monom[names.index(n)]
        if e == 1:
            factors.append(n)
        elif e > 1:
            factors.append(f"{n}^{e}")
    if not factors:
        return str(c)
    if c == 1:
        return "*".join(factors)
    return "*".join([str(c)] + factors)


def _poly_str(poly, names, order) -> str:
    terms = _sorted_terms(poly, names, order)
    if not terms:
        return "0"
    out = ""
    for i, (monom, c) in enumerate(terms):
        c = int(c)
        text = _monomial_str(abs(c), monom, names, order)
        if i == 0:
            out = ("-" if c < 0 else "") + text
        else:
            out += (" - " if c < 0 else " + ") + text
    return out


def _paren_if_sum(text: str) -> str:
    return f"({text})" if (" + " in text or " - " in text) else text


def _paren_unless_factor(text: str) -> str:
    if text.isdigit() or text.isidentifier():
        return text
    if "^" in text and "*" not in text and " " not in text:
        return text
    return f"({text})"


def coefficients_from(values: Iterable[Number]) -> list[Coefficient]:
    return [Coefficient(v) for v in values]

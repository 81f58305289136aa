"""Shared strategies and oracles for the test suite."""

from fractions import Fraction

import sympy as sp
from hypothesis import strategies as st

from ladderkit.symexpr import Coefficient, SymbolicFunction, SymbolTable

T = SymbolTable(("l", "K", "s"))
SX, SL, SK, SS = sp.symbols("x l K s")

# evaluation points (x, l, K, s) away from every pole the strategies can create
POINTS = (
    (Fraction(2, 5), Fraction(3, 7), Fraction(5, 3), Fraction(1, 2)),
    (Fraction(7, 3), Fraction(-5, 2), Fraction(2, 9), Fraction(4)),
)

_monomials = st.tuples(
    st.integers(-5, 5),  # numerator
    st.integers(0, 2),  # power of l
    st.integers(0, 2),  # power of K
    st.integers(0, 1),  # power of s
)

_terms = st.lists(
    st.tuples(
        st.integers(-3, 3),  # power of x
        st.lists(_monomials, min_size=1, max_size=2),
        st.sampled_from([1, 2, 3]),  # denominator
        st.booleans(),  # divide by l
    ),
    max_size=3,
)


@st.composite
def functions_with_oracle(draw):
    """A SymbolicFunction and the independently built sympy expression."""
    terms = draw(_terms)
    l, K, s = (Coefficient.symbol(n) for n in ("l", "K", "s"))
    ours = SymbolicFunction.zero(T)
    theirs = sp.Integer(0)
    for p, monos, den, over_l in terms:
        c = Coefficient(0)
        e = sp.Integer(0)
        for num, el, eK, es in monos:
            c = c + Coefficient(Fraction(num, den)) * l**el * K**eK * s**es
            e += sp.Rational(num, den) * SL**el * SK**eK * SS**es
        if over_l:
            c = c / l
            e = e / SL
        ours = ours + SymbolicFunction({p: c}, T)
        theirs += e * SX**p
    return ours, theirs


def value(f: SymbolicFunction, pt) -> Fraction:
    x, l, K, s = pt
    return f.evaluate(x, {"l": l, "K": K, "s": s})


def sympy_value(expr, pt) -> Fraction:
    x, l, K, s = pt
    q = lambda v: sp.Rational(v.numerator, v.denominator)  # noqa: E731
    out = sp.sympify(expr).xreplace({SX: q(x), SL: q(l), SK: q(K), SS: q(s)})
    assert out.is_Rational, out
    return Fraction(int(out.p), int(out.q))

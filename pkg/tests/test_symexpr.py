from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings

from ladderkit.errors import (
    DenominatorVanishes,
    NonMonomialDivisor,
    OrderOverflow,
    ParseError,
    UnknownIdentifier,
)
from ladderkit.symexpr import (
    Coefficient,
    DiffOperator,
    SymbolicFunction,
    SymbolTable,
    commutator,
    compose_operators,
    parse_expr,
    substitute_numeric,
)

from helpers import (
    POINTS,
    SX,
    functions_with_oracle,
    sympy_value,
    value,
)

T = SymbolTable(("l", "K", "s"))


def P(text):
    return parse_expr(text, T)



# --- examples ------------------------------------------------------------------


def test_parse_coulomb_superpotential():
    R = P("l/x - K/(2*l)")
    assert R.as_dict() == {-1: Coefficient.symbol("l"), 0: -Coefficient.symbol("K") / (2 * Coefficient.symbol("l"))}


def test_parse_zero_is_empty():
    assert P("0").terms == ()


def test_square_of_coulomb_superpotential():
    sq = P("(l/x - K/(2*l))^2")
    assert sq == P("l^2/x^2 - K/x + K^2/(4*l^2)")


def test_derivatives():
    assert P("l/x").derivative() == P("-l/x^2")
    assert P("K/(2*l)").derivative().is_zero()
    assert P("l/x - s*x").derivative() == P("-l/x^2 - s")


def test_products():
    f = P("l/x - s*x")
    assert (f * SymbolicFunction.zero(T)).is_zero()
    assert f * f == P("l^2*x^-2 - 2*l*s + s^2*x^2")
    diff_sq = P("l/x - K/(2*l)") * P("l/x + K/(2*l)")
    assert diff_sq == P("l^2/x^2 - K^2/(4*l^2)")


def test_substitute_numeric():
    R = P("l/x - K/(2*l)")
    assert substitute_numeric(R, {"l": 1, "K": 2}).rational_terms() == {-1: 1, 0: -1}
    with pytest.raises(DenominatorVanishes):
        substitute_numeric(R, {"l": 0, "K": 2})


def test_parse_errors_carry_position():
    with pytest.raises(NonMonomialDivisor):
        P("1/(x+1)")
    with pytest.raises(UnknownIdentifier) as exc:
        P("2*q*x")
    assert exc.value.position == 2
    with pytest.raises(ParseError) as exc:
        P("(x")
    assert exc.value.position == 2


def test_operator_examples():
    D = DiffOperator.d()
    assert compose_operators(D, D) == DiffOperator.from_coefficients(
        [SymbolicFunction.zero(), SymbolicFunction.zero(), SymbolicFunction.constant(1)]
    )
    assert commutator(D, D).is_zero()


def test_coulomb_products_and_commutator():
    A = DiffOperator.first_order(P("1/x - l/x + K/(2*l)"))
    Ap = DiffOperator.first_order(P("1/x + l/x - K/(2*l)"))
    d2 = SymbolicFunction.constant(1, T)
    up = compose_operators(A, Ap)
    down = compose_operators(Ap, A)
    assert up == DiffOperator.from_coefficients([P("-l*(l+1)/x^2 + K/x - K^2/(4*l^2)"), P("2/x"), d2])
    assert down == DiffOperator.from_coefficients([P("-l*(l-1)/x^2 + K/x - K^2/(4*l^2)"), P("2/x"), d2])
    assert commutator(Ap, A) == DiffOperator.multiplier(P("2*l/x^2"))


def test_oscillator_commutator():
    A = DiffOperator.first_order(P("1/x - l/x + s*x"))
    Ap = DiffOperator.first_order(P("1/x + l/x - s*x"))
    assert commutator(Ap, A) == DiffOperator.multiplier(P("2*l/x^2 + 2*s"))


def test_composition_order_limit():
    D = DiffOperator.d()
    with pytest.raises(OrderOverflow):
        compose_operators(compose_operators(D, D), D)


# --- properties ----------------------------------------------------------------
# Each property compares against sympy evaluated at rational points.

PROP = settings(max_examples=100, deadline=None)


@PROP
@given(functions_with_oracle(), functions_with_oracle(), functions_with_oracle())
def test_ring_axioms(fa, fb, fc):
    (f, sf), (g, sg), (h, sh) = fa, fb, fc
    assert (f + g) + h == f + (g + h)
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert (f - f).is_zero()
    assert f * SymbolicFunction.constant(1) == f
    for pt in POINTS:
        assert value(f * g + h, pt) == sympy_value(sf * sg + sh, pt)


@PROP
@given(functions_with_oracle(), functions_with_oracle())
def test_leibniz_rule(fa, fb):
    (f, sf), (g, sg) = fa, fb
    assert (f * g).derivative() == f.derivative() * g + f * g.derivative()
    for pt in POINTS:
        assert value(f.derivative(), pt) == sympy_value(sp.diff(sf, SX), pt)


@PROP
@given(functions_with_oracle())
def test_parser_round_trip(fa):
    f, sf = fa
    text = str(f)
    assert parse_expr(text, f.table) == f
    back = sp.sympify(text.replace("^", "**"), locals={n: sp.Symbol(n) for n in ("l", "K", "s", "x")})
    for pt in POINTS:
        assert sympy_value(back, pt) == sympy_value(sf, pt)


def _apply(op, f):
    a0, a1, a2 = op.coefficients
    return a0 * f + a1 * f.derivative() + a2 * f.derivative().derivative()


@PROP
@given(functions_with_oracle(), functions_with_oracle(), functions_with_oracle(), functions_with_oracle())
def test_commutator_antisymmetry(fa, fb, fc, fd):
    (w, _), (u, _), (v, _), (g, sg) = fa, fb, fc, fd
    first = DiffOperator.first_order(w)
    second = DiffOperator.from_coefficients([u, v, SymbolicFunction.constant(1)])
    c1 = commutator(first, second)
    c2 = commutator(second, first)
    assert c1 == -c2
    # [P, Q] g = P(Q g) - Q(P g)
    assert _apply(c1, g) == _apply(first, _apply(second, g)) - _apply(second, _apply(first, g))


def test_coefficient_from_fraction():
    assert Coefficient(Fraction(3, 4)).to_fraction() == Fraction(3, 4)


def test_negated_sum_constant_prints_with_parentheses():
    f = P("x - s - 1")
    assert str(f) == "-(s + 1) + x"
    assert P(str(f)) == f

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ladderkit.errors import NonPositiveRadicand, NotFactorizableInBasis, NotPerfectSquare
from ladderkit.factorize import (
    Superpotential,
    build_ladder_pair,
    derive_intertwining,
    factorize_equation,
    gamma_of,
    normalization_constant,
    normalization_radicand,
    solve_riccati_power_ansatz,
    verify_riccati_residual,
)
from ladderkit.staeckel import (
    CONSTANT_SYMBOLS,
    assemble_separated_equation,
    builtin_catalog,
    parse_potential,
)
from ladderkit.symexpr import Coefficient, DiffOperator, SymbolicFunction, compose_operators, parse_expr

CAT = builtin_catalog()
SPH = CAT["spherical"]


def P(text):
    return parse_expr(text, CONSTANT_SYMBOLS)


def C(text):
    return P(text).coefficient(0)


def radial(potential):
    return assemble_separated_equation(SPH, 1, parse_potential(potential, SPH, 1))


COULOMB = radial("-K/r")
OSC = radial("s^2*r^2")


def test_gamma_radial():
    assert gamma_of(COULOMB) == P("-l*(l+1)/x^2 + K/x")
    assert gamma_of(OSC) == P("-l*(l+1)/x^2 - s^2*x^2")


def test_gamma_free_axis_is_zero():
    rect = CAT["rectangular"]
    eq = assemble_separated_equation(rect, 1, parse_potential("0", rect, 1), constants=(0, 0, 0))
    assert gamma_of(eq).is_zero()


def test_coulomb_branches():
    first, second = solve_riccati_power_ansatz(gamma_of(COULOMB))
    assert first.R == P("l/x - K/(2*l)")
    assert first.epsilon == C("-K^2/(4*l^2)")
    assert second.R == P("-(l+1)/x + K/(2*(l+1))")
    assert second.epsilon == C("-K^2/(4*(l+1)^2)")


def test_oscillator_first_branch():
    branches = solve_riccati_power_ansatz(gamma_of(OSC))
    assert len(branches) == 4
    assert branches[0].R == P("l/x - s*x")
    assert branches[0].epsilon == C("s*(2*l - 1)")
    for sp in branches:
        assert verify_riccati_residual(sp, gamma_of(OSC)).is_zero()


def test_perturbed_superpotential_has_residual():
    sp = solve_riccati_power_ansatz(gamma_of(COULOMB))[0]
    bad = Superpotential(sp.R + SymbolicFunction.constant(1), sp.epsilon)
    resid = verify_riccati_residual(bad, gamma_of(COULOMB))
    assert not resid.is_zero()
    assert resid.coefficient(-1) == C("-2*l")


def test_gamma_outside_basis():
    with pytest.raises(NotFactorizableInBasis):
        solve_riccati_power_ansatz(P("x^3"))


def test_irrational_discriminant_uses_bindings():
    # Gamma = -m/x^2: 1 + 4m is a square only after specialization
    gamma = P("-m/x^2")
    with pytest.raises(NotPerfectSquare):
        solve_riccati_power_ansatz(gamma)
    branches = solve_riccati_power_ansatz(gamma, {"m": 2})
    assert branches[0].R == parse_expr("1/x")


def test_ladder_operators():
    sp = solve_riccati_power_ansatz(gamma_of(COULOMB))[0]
    pair = build_ladder_pair(COULOMB.f, sp)
    assert pair.A_plus == DiffOperator.first_order(P("1/x + l/x - K/(2*l)"))
    assert pair.A == DiffOperator.first_order(P("1/x - l/x + K/(2*l)"))
    osc = build_ladder_pair(OSC.f, solve_riccati_power_ansatz(gamma_of(OSC))[0])
    assert osc.A == DiffOperator.first_order(P("1/x - l/x + s*x"))
    assert osc.A_plus == DiffOperator.first_order(P("1/x + l/x - s*x"))


def test_trivial_pair():
    one = SymbolicFunction.constant(1)
    pair = build_ladder_pair(one, Superpotential(SymbolicFunction.zero(), Coefficient(0)))
    assert pair.A == pair.A_plus == DiffOperator.d()


def test_coulomb_intertwining():
    pair = build_ladder_pair(COULOMB.f, solve_riccati_power_ansatz(gamma_of(COULOMB))[0])
    rel = derive_intertwining(pair, COULOMB)
    assert rel.identity_holds
    assert rel.shift.is_zero()
    assert rel.c_up == rel.c_down == C("-K^2/(4*l^2)")
    assert compose_operators(pair.A_plus, pair.A) == rel.H_down.plus_constant(rel.c_down)
    assert rel.multiplier == P("2*l/x^2")
    assert rel.role == {"raises": "A", "lowers": "A_plus"}


def test_oscillator_intertwining():
    pair = build_ladder_pair(OSC.f, solve_riccati_power_ansatz(gamma_of(OSC))[0])
    rel = derive_intertwining(pair, OSC)
    assert rel.identity_holds
    assert rel.c_up == C("s*(2*l - 1)")
    assert rel.c_down == C("s*(2*l + 1)")
    assert rel.shift == C("2*s")


def test_normalization_constants():
    sp = solve_riccati_power_ansatz(gamma_of(COULOMB))[0]
    lam = Fraction(-1, 4)  # n = 2 with K = 2, stepping down from l = 1
    rad = normalization_radicand(lam, sp)
    assert rad.substitute({"l": 1, "K": 2}) == Fraction(3, 4)
    assert normalization_constant(lam, sp, {"l": 1, "K": 2}) == pytest.approx(2 / math.sqrt(3), rel=1e-15)
    # the top state of the chain: lambda equals eps, nothing to lower into
    with pytest.raises(NonPositiveRadicand):
        normalization_constant(lam, sp, {"l": 2, "K": 2})


def test_oscillator_normalization_positive():
    sp = solve_riccati_power_ansatz(gamma_of(OSC))[0]
    # top of the n = 2 chain: l = 1, lambda = 5 with s = 1
    assert normalization_constant(5, sp, {"l": 1, "s": 1}) == pytest.approx(0.5)


def test_report_json_schema():
    rep = factorize_equation(COULOMB).to_json()
    assert set(rep) == {"branches", "commutator", "intertwining", "audit_flags"}
    assert set(rep["branches"][0]) == {"R", "epsilon_engine", "epsilon_paper_form"}
    assert rep["branches"][0]["epsilon_engine"] == "-K^2/(4*l^2)"
    assert rep["branches"][0]["epsilon_paper_form"] == "K^2/(4*l^2)"
    assert rep["intertwining"]["shift"] == "0"


@settings(max_examples=60, deadline=None)
@given(
    st.integers(-3, 3),
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
    st.fractions(min_value=0, max_value=4, max_denominator=3),
)
def test_recovers_planted_superpotential(a, b, c2, eps0):
    # build Gamma from a known R so every branch must solve R' - R^2 = eps + Gamma
    a = Fraction(a)
    c = Fraction(0) if c2 == 0 else -abs(c2)
    R = SymbolicFunction({-1: a, 0: b, 1: c})
    gamma = R.derivative() - R * R - SymbolicFunction.constant(eps0)
    branches = solve_riccati_power_ansatz(gamma)
    for sp in branches:
        assert verify_riccati_residual(sp, gamma).is_zero()

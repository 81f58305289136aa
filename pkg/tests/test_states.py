from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from sympy.physics import hydrogen, sho

from ladderkit.errors import NonNormalizable
from ladderkit.numerics import normalize_exact
from ladderkit.states import (
    ExpPolyState,
    PotentialDescriptor,
    apply_ladder,
    apply_operator,
    generate_chain,
    node_count,
    top_state,
)
from ladderkit.symexpr import DiffOperator, parse_expr

R = np.linspace(0.01, 30.0, 400)
_r = sp.Symbol("r", positive=True)


def oracle(expr):
    return sp.lambdify(_r, expr, "numpy")(R)


def op(text):
    return DiffOperator.first_order(parse_expr(text))


def test_coulomb_annihilator_and_top_state():
    A = op("-1/x + 1/2")  # d/dr - 1/r + 1/2
    X = top_state(A, n=2, l=1)
    assert X.exact_equal(ExpPolyState((Fraction(1),), 1, Fraction(-1, 2), 0, 2, 1))
    assert apply_operator(A, X).is_zero()
    assert apply_ladder(A, X).is_zero()


def test_lowering_gives_one_node_state():
    X = ExpPolyState((Fraction(1),), 1, Fraction(-1, 2), 0)
    Y = apply_ladder(op("2/x - 1"), X)
    assert Y.exact_equal(ExpPolyState((Fraction(3), Fraction(-3, 2)), 0, Fraction(-1, 2), 0))
    assert node_count(Y) == 1


def test_ladder_matches_general_application():
    X = ExpPolyState((Fraction(2), Fraction(-1), Fraction(1, 3)), 2, Fraction(-1, 3), Fraction(-1, 5))
    for text in ("3/x - 1/3", "-2/x + 1/3 + x", "x"):
        assert apply_ladder(op(text), X).exact_equal(apply_operator(op(text), X))


def test_derivative_of_exponential():
    X = ExpPolyState((Fraction(1),), 0, -1, 0)
    assert X.derivative().exact_equal(X.times(-1))


def test_non_normalizable_top_state():
    with pytest.raises(NonNormalizable):
        top_state(op("1/x - 1/2"))  # r^-1 e^{r/2}


def test_coulomb_chain_labels_and_eigenvalues():
    chain = generate_chain(PotentialDescriptor.coulomb(2), 2)
    assert chain.labels() == [(1, 0), (2, 0), (2, 1)]
    assert chain.eigenvalues == {(1, 0): -1, (2, 1): Fraction(-1, 4), (2, 0): Fraction(-1, 4)}
    assert chain.state(1, 0).exact_equal(ExpPolyState((Fraction(1),), 0, -1, 0, 1, 0))


def test_coulomb_node_counts():
    chain = generate_chain(PotentialDescriptor.coulomb(2), 4)
    for n, l in chain.labels():
        assert node_count(chain.state(n, l)) == n - 1 - l
    assert node_count(chain.state(3, 0)) == 2


def test_hydrogen_states_match_closed_form():
    # K = 2 is hydrogen with Z = 1, lambda = 2E
    chain = generate_chain(PotentialDescriptor.coulomb(2), 4)
    for n, l in chain.labels():
        ours = normalize_exact(chain.state(n, l)).evaluate(R)
        ref = oracle(hydrogen.R_nl(n, l, _r, 1))
        sign = np.sign(ours[0] * ref[0])
        assert np.max(np.abs(ours - sign * ref)) < 1e-12 * np.max(np.abs(ref))
        assert chain.eigenvalues[(n, l)] == 2 * hydrogen.E_nl(n, 1)


def test_oscillator_states_match_closed_form():
    chain = generate_chain(PotentialDescriptor.oscillator(1), 3)
    assert chain.state(1, 0).exact_equal(ExpPolyState((Fraction(1),), 0, 0, Fraction(-1, 2), 1, 0))
    assert chain.eigenvalues[(1, 0)] == 3
    for n, l in chain.labels():
        nodes = n - 1 - l
        ours = normalize_exact(chain.state(n, l)).evaluate(R)
        ref = oracle(sho.R_nl(nodes, l, sp.Rational(1, 2), _r))
        sign = np.sign(ours[0] * ref[0]) if ref[0] != 0 else np.sign(ours[50] * ref[50])
        assert np.max(np.abs(ours - sign * ref)) < 1e-12 * np.max(np.abs(ref))
        assert chain.eigenvalues[(n, l)] == 4 * nodes + 2 * l + 3


def test_chain_steps_carry_radicands():
    chain = generate_chain(PotentialDescriptor.coulomb(2), 2)
    (step,) = chain.steps
    assert (step.source, step.target) == ((2, 1), (2, 0))
    assert step.radicand == Fraction(3, 4)
    assert step.normalization == pytest.approx(2 / np.sqrt(3), rel=1e-15)


def test_states_satisfy_equation_exactly():
    desc = PotentialDescriptor.coulomb(2)
    chain = generate_chain(desc, 3)
    eq = desc.equation()
    for (n, l), lam in chain.eigenvalues.items():
        H = eq.operator().substitute({"l": l, "K": 2})
        out = apply_operator(H, chain.state(n, l)) + chain.state(n, l).times(lam)
        assert out.is_zero()

from fractions import Fraction

import numpy as np
import pytest

from ladderkit.errors import NoSignChange, NumericsError
from ladderkit.numerics import (
    RadialGrid,
    analytic_norm_squared,
    bracket_eigenvalues,
    count_sign_changes,
    hamiltonian_residual,
    liouville_normal_form,
    normalize_exact,
    normalize_on_grid,
    overlap,
    quadrature_norm,
    rayleigh_quotient,
    shooting_oracle,
)
from ladderkit.states import ExpPolyState, PotentialDescriptor, generate_chain

COULOMB = PotentialDescriptor.coulomb(2)
OSC = PotentialDescriptor.oscillator(1)
K2 = {"K": 2}
S1 = {"s": 1}
E_R = ExpPolyState((Fraction(1),), 0, -1, 0)
GAUSS = ExpPolyState((Fraction(1),), 0, 0, Fraction(-1, 2))


def test_quadrature_examples():
    g = RadialGrid(1e-6, 40.0)
    assert quadrature_norm(np.exp(-g.points), g) == pytest.approx(0.25, rel=1e-12)
    assert quadrature_norm(np.zeros(g.N), g) == 0
    g80 = RadialGrid(1e-6, 80.0)
    r = g80.points
    assert quadrature_norm(r * np.exp(-r / 2), g80) == pytest.approx(24.0, rel=1e-12)


def test_quadrature_converges():
    errors = []
    for N in (65, 129, 257):
        g = RadialGrid(1e-6, 40.0, N)
        errors.append(abs(quadrature_norm(np.exp(-g.points), g) - 0.25))
    # Simpson: fourth order in the log step
    assert errors[1] < errors[0] / 8 and errors[2] < errors[1] / 8


def test_analytic_norm_matches_moments():
    assert analytic_norm_squared(E_R) == pytest.approx(0.25, rel=1e-15)
    # integral of r^2 exp(-r^2) = sqrt(pi)/4
    assert analytic_norm_squared(GAUSS) == pytest.approx(np.sqrt(np.pi) / 4, rel=1e-15)


def test_grid_and_exact_normalization_agree():
    chain = generate_chain(COULOMB, 3)
    g = RadialGrid.for_scale(COULOMB.length_scale(3))
    for n, l in chain.labels():
        a = normalize_exact(chain.state(n, l)).evaluate(g.points)
        assert quadrature_norm(a, g) == pytest.approx(1.0, abs=1e-12)
        b = normalize_on_grid(chain.state(n, l), g).evaluate(g.points)
        assert np.max(np.abs(a - b)) < 1e-10


def test_residual_examples():
    eq = COULOMB.equation()
    g = RadialGrid(1e-6, 40.0)
    assert hamiltonian_residual(E_R, -1, eq, g, {"l": 0, **K2}) < 1e-12
    assert hamiltonian_residual(E_R, -2, eq, g, {"l": 0, **K2}) == pytest.approx(0.5, rel=1e-6)
    osc = OSC.equation()
    g = RadialGrid.for_scale(OSC.length_scale(1))
    assert hamiltonian_residual(GAUSS, 3, osc, g, {"l": 0, **S1}) < 1e-12


def test_rayleigh_quotient():
    g = RadialGrid(1e-6, 40.0)
    assert rayleigh_quotient(E_R, COULOMB.equation(), g, {"l": 0, **K2}) == pytest.approx(-1, rel=1e-9)


def test_shooting_ground_and_excited():
    eq = COULOMB.equation()
    g = RadialGrid.for_scale(COULOMB.length_scale(2))
    sol = shooting_oracle(eq, 0, (-1.5, -0.5), g, K2)
    assert sol.eigenvalue == pytest.approx(-1.0, rel=1e-9)
    assert sol.nodes == 0
    sol2 = shooting_oracle(eq, 0, (-0.3, -0.2), g, K2)
    assert sol2.eigenvalue == pytest.approx(-0.25, rel=1e-9)
    assert sol2.nodes == 1
    a = normalize_exact(E_R).evaluate(g.points)
    assert abs(overlap(a, sol.samples, g)) == pytest.approx(1.0, abs=1e-8)
    assert abs(overlap(sol.samples, sol2.samples, g)) < 1e-8


def test_shooting_oscillator():
    g = RadialGrid.for_scale(OSC.length_scale(1))
    sol = shooting_oracle(OSC.equation(), 0, (2.0, 4.0), g, S1)
    assert sol.eigenvalue == pytest.approx(3.0, rel=1e-9)


def test_shooting_without_root():
    g = RadialGrid.for_scale(COULOMB.length_scale(2))
    with pytest.raises(NoSignChange):
        shooting_oracle(COULOMB.equation(), 0, (-0.9, -0.5), g, K2)


def test_bracketing_finds_bound_states():
    g = RadialGrid.for_scale(COULOMB.length_scale(3))
    windows = bracket_eigenvalues(COULOMB.equation(), 0, -1.2, -0.05, g, K2, samples=300)
    exact = [-1.0, -0.25, -1 / 9, -1 / 16]
    assert len(windows) == 4
    for (a, b), lam in zip(sorted(windows), exact):
        assert a <= lam <= b


def test_overlap_requires_normalized_input():
    g = RadialGrid(1e-6, 40.0)
    with pytest.raises(NumericsError):
        overlap(np.exp(-g.points), np.exp(-g.points), g)
    a = normalize_exact(E_R).evaluate(g.points)
    assert overlap(a, a, g) == pytest.approx(1.0, abs=1e-10)


def test_sign_changes():
    g = RadialGrid(1e-6, 40.0)
    r = g.points
    assert count_sign_changes((1 - r / 2) * np.exp(-r / 2), g) == 1


# --- Liouville normal form ----------------------------------------------------


def _radial_setup(n=1, l=0):
    chain = generate_chain(COULOMB, n)
    state = normalize_exact(chain.state(n, l))
    grid = RadialGrid(1e-6, 40.0, 4096, "uniform")
    psi = state.evaluate(grid.points)
    q = lambda r: 2.0 * r - l * (l + 1)  # noqa: E731  r^2 (K/r) - l(l+1) with K = 2
    return grid, psi, q, float(chain.eigenvalues[(n, l)])


def test_normal_form_quarter_exponent():
    grid, psi, q, lam = _radial_setup()
    sq = lambda r: r * r  # noqa: E731
    res = liouville_normal_form(sq, sq, psi, grid, Fraction(1, 4), q=q, lam=lam)
    assert not res.flagged
    assert res.max_residual < 1e-6
    # y = (p rho)^(1/4) psi = r X, and x = r
    assert np.allclose(res.x, grid.points, rtol=1e-10)
    assert np.allclose(res.y, grid.points * psi, atol=1e-14)


def test_normal_form_half_exponent_flagged():
    grid, psi, q, lam = _radial_setup()
    sq = lambda r: r * r  # noqa: E731
    res = liouville_normal_form(sq, sq, psi, grid, Fraction(1, 2), q=q, lam=lam)
    assert res.flagged
    assert res.max_residual >= 1e-2


def test_normal_form_identity():
    grid = RadialGrid(0.1, 3.0, 2048, "uniform")
    t = grid.points
    psi = np.sin(2.0 * t)
    one = lambda r: np.ones_like(r)  # noqa: E731
    res = liouville_normal_form(one, one, psi, grid, Fraction(1, 4), lam=4.0)
    assert np.allclose(res.x - res.x[0], t - t[0], atol=1e-12)
    assert np.allclose(res.y, psi, atol=1e-14)
    assert res.max_residual < 1e-6


def test_normal_form_rejects_other_exponents():
    grid, psi, q, lam = _radial_setup()
    sq = lambda r: r * r  # noqa: E731
    with pytest.raises(ValueError):
        liouville_normal_form(sq, sq, psi, grid, Fraction(1, 3), q=q, lam=lam)


@pytest.mark.parametrize("desc", [COULOMB, OSC], ids=["coulomb", "oscillator"])
def test_symbolic_derivative_matches_finite_differences(desc):
    chain = generate_chain(desc, 4)
    r = np.linspace(0.05, 30.0 * desc.length_scale(1), 20001)
    h = r[1] - r[0]
    for n, l in chain.labels():
        X = normalize_exact(chain.state(n, l))
        v = X.evaluate(r)
        fd = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
        exact = X.derivative().evaluate(r[2:-2])
        assert np.max(np.abs(fd - exact)) < 1e-6 * np.max(np.abs(exact))

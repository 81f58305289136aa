import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ladderkit.errors import ConfigError, MissingStaeckelData
from ladderkit.staeckel import (
    CONSTANT_SYMBOLS,
    assemble_separated_equation,
    builtin_catalog,
    determinant3,
    load_config,
    parse_config,
    parse_potential,
    robertson_check,
    scale_factors,
    staeckel_determinant,
)
from ladderkit.symexpr import Coefficient, DiffOperator, parse_expr

CAT = builtin_catalog()


def permutation_det(m):
    total = 0
    for perm in itertools.permutations(range(3)):
        inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
        term = (-1) ** inversions
        for row, col in enumerate(perm):
            term *= m[row][col]
        total += term
    return total


def test_scale_factors():
    assert scale_factors(CAT["rectangular"], (0.3, -1.2, 2.0)) == pytest.approx((1, 1, 1), abs=1e-8)
    h = scale_factors(CAT["spherical-paper"], (2.0, math.pi / 3, math.pi / 4))
    assert h == pytest.approx((1, 2, 2 * math.sin(math.pi / 3)), rel=1e-7)
    assert scale_factors(CAT["circular-cylindrical"], (3.0, 1.0, 0.0)) == pytest.approx((1, 3, 1), rel=1e-7)


def test_determinant_identity():
    eye = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    assert determinant3(eye) == 1


@settings(max_examples=200, deadline=None)
@given(st.lists(st.fractions(min_value=-10, max_value=10, max_denominator=20), min_size=9, max_size=9))
def test_determinant_matches_permutation_sum(vals):
    m = [vals[0:3], vals[3:6], vals[6:9]]
    assert determinant3(m) == permutation_det(m)


def test_printed_matrix_determinant():
    r, th, ph = 1.7, 0.9, 1.3
    S = staeckel_determinant(CAT["spherical-paper"].phi, (r, th, ph))
    expected = 1 / ((math.cos(th) ** 2 - 1) * (math.cos(ph) ** 2 - 1))
    assert S == pytest.approx(expected, rel=1e-12)


def test_robertson_verdicts():
    rect = robertson_check(CAT["rectangular"], 20, seed=1)
    assert rect.holds and rect.max_deviation == 0
    sph = robertson_check(CAT["spherical"], 100, seed=0)
    assert sph.holds and sph.max_deviation < 1e-10
    printed = robertson_check(CAT["spherical-paper"], 100, seed=0)
    assert printed.verdict == "violated"


def test_robertson_is_seeded():
    a = robertson_check(CAT["parabolic"], 30, seed=5)
    b = robertson_check(CAT["parabolic"], 30, seed=5)
    assert a.points == b.points and a.max_deviation == b.max_deviation


def test_transform_only_system_has_no_staeckel_data():
    with pytest.raises(MissingStaeckelData):
        robertson_check(CAT["ellipsoidal"], 10, seed=0)


def test_radial_coulomb_equation():
    sph = CAT["spherical"]
    eq = assemble_separated_equation(sph, 1, parse_potential("-K/r", sph, 1))
    T = CONSTANT_SYMBOLS
    a0, a1, a2 = eq.operator().coefficients
    assert a2 == parse_expr("1", T)
    assert a1 == parse_expr("2/x", T)
    assert a0 == parse_expr("-l*(l+1)/x^2 + K/x", T)


def test_radial_oscillator_equation():
    sph = CAT["spherical"]
    eq = assemble_separated_equation(sph, 1, parse_potential("s^2*r^2", sph, 1))
    assert eq.operator().a0 == parse_expr("-l*(l+1)/x^2 - s^2*x^2", CONSTANT_SYMBOLS)


def test_free_particle_on_rectangular_axis():
    rect = CAT["rectangular"]
    eq = assemble_separated_equation(rect, 1, parse_potential("0", rect, 1), constants=(Coefficient.symbol("eps"), 0, 0))
    op = eq.operator()
    assert op == DiffOperator.from_coefficients([op.a0 * 0, op.a0 * 0, parse_expr("1")])


# --- config files ----------------------------------------------------------------

PRINTED_OVERRIDE = """
[system spherical-paper]
coords = r, theta, phi
transform.x = r*sin(theta)*cos(phi)
transform.y = r*sin(theta)*sin(phi)
transform.z = r*cos(theta)
f.1 = r^2
f.2 = 1 - cos(theta)^2
f.3 = sqrt(1 - cos(phi)^2)
phi.1.1 = 1
phi.1.2 = 1/r^2
phi.1.3 = 0
phi.2.1 = 0
phi.2.2 = 1/(cos(theta)^2 - 1)
phi.2.3 = 1/(cos(theta)^2 - 1)^2
phi.3.1 = 0
phi.3.2 = 0
phi.3.3 = 1/(cos(phi)^2 - 1)
domain.1 = 0.5, 3
domain.2 = 0.2, 2.9
domain.3 = 0.2, 2.9
"""

FRESH = """
# spherical coordinates under a new name, written with x as the row variable
[system my-spherical]
coords = r, u, phi
transform.x = r*sqrt(1 - u^2)*cos(phi)
transform.y = r*sqrt(1 - u^2)*sin(phi)
transform.z = r*u
f.1 = x^2
f.2 = 1 - x^2
f.3 = 1
phi.1.1 = 1
phi.1.2 = 1/x^2
phi.1.3 = 0
phi.2.1 = 0
phi.2.2 = -1/(1 - x^2)
phi.2.3 = 1/(1 - x^2)^2
phi.3.1 = 0
phi.3.2 = 0
phi.3.3 = -1
domain.1 = 0.5, 5
domain.2 = -0.9, 0.9
domain.3 = 0.1, 6
"""


def test_config_override_of_printed_reading(tmp_path):
    path = tmp_path / "override.cfg"
    path.write_text(PRINTED_OVERRIDE)
    cat = load_config(path)
    system = cat["spherical-paper"]
    assert system.user_defined
    report = robertson_check(system, 50, seed=0)
    assert report.verdict == "violated"


def test_config_fresh_system(tmp_path):
    path = tmp_path / "fresh.cfg"
    path.write_text(FRESH)
    cat = load_config(path)
    assert "my-spherical" in cat and "spherical" in cat
    report = robertson_check(cat["my-spherical"], 50, seed=2)
    assert report.holds
    assert cat["my-spherical"].f_symbolic[0] == parse_expr("x^2")


def test_empty_config(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("")
    assert len(load_config(path)) == len(CAT)
    assert parse_config("") == []


def test_config_duplicate_names_rejected():
    with pytest.raises(ConfigError):
        parse_config(FRESH + FRESH)


def test_config_error_has_line_number():
    bad = FRESH.replace("f.2 = 1 - x^2", "f.2 = 1 - q^2")
    with pytest.raises(ConfigError) as exc:
        parse_config(bad)
    assert exc.value.line == bad.splitlines().index("f.2 = 1 - q^2") + 1


def test_config_rejects_code():
    bad = FRESH.replace("f.3 = 1", "f.3 = __import__('os')")
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_config_partial_phi_rejected():
    bad = "\n".join(line for line in FRESH.splitlines() if not line.startswith("phi.3.3"))
    with pytest.raises(ConfigError):
        parse_config(bad)

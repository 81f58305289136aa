"""Verification suites: exact identities, oracle comparisons and recorded
discrepancies with printed formulas.

Each check has a stable id.  Status "pass" and "fail" judge the engine's own
results; "flagged" records a reproduced disagreement between a printed
formula and the exact algebra, and never fails a run.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from ladderkit.factorize import (
    build_ladder_pair,
    derive_intertwining,
    gamma_of,
    solve_riccati_power_ansatz,
    verify_riccati_residual,
)
from ladderkit.numerics import (
    RadialGrid,
    bracket_eigenvalues,
    hamiltonian_residual,
    liouville_normal_form,
    normalize_exact,
    operator_norm_ratio,
    overlap,
    rayleigh_quotient,
    shooting_oracle,
)
from ladderkit.staeckel import builtin_catalog, determinant3, robertson_check
from ladderkit.states import ExpPolyState, PotentialDescriptor, apply_ladder, generate_chain, node_count
from ladderkit.symexpr import DiffOperator, SymbolicFunction, commutator, compose_operators, parse_expr
from ladderkit.symexpr.operators import compose_general, subtract_general
from ladderkit.staeckel.systems import CONSTANT_SYMBOLS

SUITES = ("riccati", "commutators", "chains", "robertson", "normalform")


@dataclass(frozen=True)
class Check:
    id: str
    description: str
    status: str
    lhs: str
    rhs: str
    tolerance: str
    detail: str = ""

    def to_json(self) -> dict:
        return asdict(self)


def _exact(id_, description, lhs, rhs, ok: bool, detail="") -> Check:
    return Check(id_, description, "pass" if ok else "fail", str(lhs), str(rhs), "exact", detail)


def _flag(id_, description, printed, engine, reproduced: bool, detail: str, tolerance="exact") -> Check:
    """A printed-vs-engine comparison: flagged when the disagreement is reproduced."""
    status = "flagged" if reproduced else "fail"
    return Check(id_, description, status, str(printed), str(engine), tolerance, detail)


def _num(x: float) -> str:
    return f"{x:.6e}"


def _sym(text: str) -> SymbolicFunction:
    return parse_expr(text, CONSTANT_SYMBOLS)


def _radial(pot: str):
    desc = PotentialDescriptor.coulomb() if pot == "coulomb" else PotentialDescriptor.oscillator()
    eq = desc.equation()
    gamma = gamma_of(eq)
    branches = solve_riccati_power_ansatz(gamma)
    pair = build_ladder_pair(eq.f, branches[0], eq)
    return eq, gamma, branches, pair


# --- riccati -------------------------------------------------------------------


def suite_riccati(seed: int = 0) -> list[Check]:
    out = []
    eq_c, gamma_c, br_c, _ = _radial("coulomb")
    eq_o, gamma_o, br_o, _ = _radial("oscillator")

    spherical_f = eq_c.f
    f1 = spherical_f.derivative()
    geom = (f1 * f1).divide(spherical_f * spherical_f * 4) - f1.derivative().divide(spherical_f * 2)
    out.append(_exact("GAMMA_SPHERICAL_GEOMETRIC", "f = x^2 contributes nothing to Gamma", geom, 0, geom.is_zero()))
    want = _sym("-l*(l+1)*x^-2 + K*x^-1")
    out.append(_exact("GAMMA_COULOMB", "Gamma of the radial Coulomb equation", gamma_c, want, gamma_c == want))
    want = _sym("-l*(l+1)*x^-2 - s^2*x^2")
    out.append(_exact("GAMMA_OSC", "Gamma of the radial oscillator equation", gamma_o, want, gamma_o == want))

    sp = br_c[0]
    res = verify_riccati_residual(sp, gamma_c)
    ok = sp.R == _sym("l*x^-1 - K/(2*l)") and sp.epsilon == _sym("-K^2/(4*l^2)").coefficient(0) and res.is_zero()
    out.append(_exact("RICCATI_COULOMB", f"R = {sp.R}, eps = {sp.epsilon} solves R' - R^2 = eps + Gamma", res, 0, ok))
    sp2 = br_c[1]
    res2 = verify_riccati_residual(sp2, gamma_c)
    ok2 = sp2.R == _sym("-(l+1)*x^-1 + K/(2*(l+1))") and res2.is_zero()
    out.append(_exact("RICCATI_COULOMB_BRANCH2", f"second branch R = {sp2.R}, eps = {sp2.epsilon}", res2, 0, ok2))

    spo = br_o[0]
    reso = verify_riccati_residual(spo, gamma_o)
    oko = spo.R == _sym("l*x^-1 - s*x") and spo.epsilon == _sym("s*(2*l-1)").coefficient(0) and reso.is_zero()
    out.append(_exact("RICCATI_OSC", f"R = {spo.R}, eps = {spo.epsilon} solves the oscillator condition", reso, 0, oko))
    all_zero = all(verify_riccati_residual(b, gamma_o).is_zero() for b in br_o)
    out.append(_exact("RICCATI_OSC_ALL_BRANCHES", f"all {len(br_o)} oscillator branches satisfy the condition",
                      "residuals", 0, all_zero))

    perturbed = type(sp)(sp.R + 1, sp.epsilon)
    pres = verify_riccati_residual(perturbed, gamma_c)
    out.append(_exact("RICCATI_PERTURBED_NONZERO", "R + 1 no longer solves the condition", pres, "nonzero",
                      not pres.is_zero()))

    # printed oscillator superpotential l/r - sqrt(k r): compare at k = s^2 numerically
    s, l, x = 1.0, 1, 2.0
    printed = l / x - math.sqrt(s * s * x)
    engine = float(spo.R.substitute({"l": l, "s": 1}).evaluate(2))
    out.append(_flag(
        "RICCATI_OSC_PAPER_SQRT_KR",
        "printed superpotential l/r - sqrt(k r) versus the solution l/r - sqrt(k) r",
        "l/r - sqrt(k*r)",
        "l/r - sqrt(k)*r",
        abs(printed - engine) > 1e-9,
        f"at l=1, k=1, r=2: printed {printed:.6f}, solution {engine:.6f}; sqrt(k r) is outside the power basis",
    ))
    return out


# --- commutators, products, intertwining ------------------------------------------


def _ops_equal(p, q) -> bool:
    return not subtract_general(p, q)


def _specialized_identities(seed: int) -> tuple[bool, str]:
    """Re-check the operator identities at random rational points and constants."""
    rng = random.Random(seed)
    checked = 0
    for pot in ("coulomb", "oscillator"):
        eq, _, _, pair = _radial(pot)
        rel = derive_intertwining(pair, eq)
        A, Ap = pair.A, pair.A_plus
        pairs = [
            (compose_operators(A, Ap), rel.H_up.plus_constant(rel.c_up)),
            (compose_operators(Ap, A), rel.H_down.plus_constant(rel.c_down)),
            (compose_general(rel.H_up, A), subtract_general(compose_general(A, rel.H_down), A.scale(-rel.shift))),
        ]
        for _ in range(20):
            b = {"l": rng.randint(1, 6), "K": Fraction(rng.randint(1, 40), rng.randint(1, 8)),
                 "s": Fraction(rng.randint(1, 40), rng.randint(1, 8))}
            xi = Fraction(rng.randint(1, 200), rng.randint(1, 50))
            for lhs, rhs in pairs:
                lc = lhs.coefficients if isinstance(lhs, DiffOperator) else lhs
                rc = rhs.coefficients if isinstance(rhs, DiffOperator) else rhs
                n = max(len(lc), len(rc))
                for k in range(n):
                    a = lc[k].evaluate(xi, b) if k < len(lc) else 0
                    c = rc[k].evaluate(xi, b) if k < len(rc) else 0
                    if a != c:
                        return False, f"{pot}: mismatch at xi={xi}, {b}, coefficient {k}"
                checked += 1
    return True, f"{checked} exact rational comparisons"


def suite_commutators(seed: int = 0) -> list[Check]:
    out = []
    eq_c, _, _, pc = _radial("coulomb")
    eq_o, _, _, po = _radial("oscillator")
    rel_c = derive_intertwining(pc, eq_c)
    rel_o = derive_intertwining(po, eq_o)

    cc = commutator(pc.A_plus, pc.A)
    want = DiffOperator.multiplier(_sym("2*l*x^-2"))
    out.append(_exact("COMM_COULOMB", "[A+, A] for the Coulomb pair", cc, want, cc == want))
    co = commutator(po.A_plus, po.A)
    want_o = DiffOperator.multiplier(_sym("2*l*x^-2 + 2*s"))
    out.append(_exact("COMM_OSC", "[A+, A] for the oscillator pair", co, want_o, co == want_o))
    printed = _sym("2*l*x^-1 + 2*s")
    out.append(_flag(
        "COMM_OSC_PAPER",
        "printed oscillator commutator 2l/r + 2 sqrt(k) versus the exact result",
        printed, co.a0, printed != co.a0,
        "the exact multiplier carries 2l/r^2; the printed one has 2l/r",
    ))

    for tag, pair in (("COULOMB", pc), ("OSC", po)):
        diff = subtract_general(compose_operators(pair.A, pair.A_plus), compose_operators(pair.A_plus, pair.A))
        comm = commutator(pair.A, pair.A_plus)
        out.append(_exact(f"COMM_CONSISTENCY_{tag}", "A o A+ - A+ o A equals the commutator [A, A+]",
                          DiffOperator.from_coefficients(diff), comm, _ops_equal(diff, comm)))

    for tag, pair, rel, eps_text in (
        ("COULOMB", pc, rel_c, "-K^2/(4*l^2)"),
        ("OSC", po, rel_o, "s*(2*l-1)"),
    ):
        up = compose_operators(pair.A, pair.A_plus)
        want = rel.H_up.plus_constant(_sym(eps_text).coefficient(0))
        out.append(_exact(f"PRODUCT_{tag}_UP", "A o A+ = H_l + eps", up, want, up == want))
        down = compose_operators(pair.A_plus, pair.A)
        want_d = rel.H_down.plus_constant(rel.c_down)
        ok = down == want_d and rel.index_shift_found
        out.append(_exact(f"PRODUCT_{tag}_DOWN", f"A+ o A = H_(l-1) + ({rel.c_down})", down, want_d, ok))
        fam = subtract_general(rel.H_down, rel.H_up)
        out.append(_exact(f"HFAMILY_SHIFT_{tag}", "H_(l-1) - H_l is multiplication by 2l/x^2",
                          DiffOperator.from_coefficients(fam), "(2*l*x^-2)",
                          _ops_equal(fam, DiffOperator.multiplier(_sym("2*l*x^-2")))))

    out.append(_exact("INTERTWINE_COULOMB_SHIFT", "H_l o A = A o H_(l-1) + delta A with delta = 0",
                      rel_c.shift, 0, rel_c.shift.is_zero() and rel_c.identity_holds))
    two_s = _sym("2*s").coefficient(0)
    out.append(_exact("INTERTWINE_OSC_SHIFT", "H_l o A = A o H_(l-1) + delta A with delta = 2s",
                      rel_o.shift, two_s, rel_o.shift == two_s and rel_o.identity_holds))
    out.append(_flag(
        "INTERTWINE_OSC_PAPER",
        "printed oscillator ladder relations keep the eigenvalue label; the exact shift is 2s",
        0, rel_o.shift, not rel_o.shift.is_zero(),
        "adjacent-l oscillator sectors differ by 2 sqrt(k) in eigenvalue",
    ))

    M = DiffOperator.multiplier(_sym("2*l*x^-2"))
    ham = commutator(rel_c.H_up, pc.A)
    a_left = compose_general(pc.A, M)
    out.append(_exact("HA_ORDER_COULOMB", "[H_l, A] = A o (2l/x^2)", ham,
                      f"A o ({M.a0})", _ops_equal(ham, a_left)))
    m_left = compose_general(M, pc.A)
    gap = subtract_general(m_left, a_left)
    out.append(_flag(
        "HA_ORDER_COULOMB_PAPER",
        "printed ordering (2l/r^2) o A versus the exact A o (2l/r^2)",
        f"({M.a0}) o A", f"A o ({M.a0})", bool(gap),
        f"the two orderings differ by multiplication by {DiffOperator.from_coefficients(gap)}",
    ))
    out.append(_flag(
        "ROLE_ASSIGNMENT",
        "which operator lowers l: the printed chain applies A_l; the intertwining identity makes A+_l the lowering operator",
        "A_l lowers", f"{rel_c.role.get('lowers')} lowers, {rel_c.role.get('raises')} raises",
        rel_c.role.get("lowers") == "A_plus",
        "H_l A = A H_(l-1) + delta A, so A maps sector l-1 to l and A+ maps l to l-1",
    ))
    ok, detail = _specialized_identities(seed)
    out.append(_exact("IDENTITIES_SPECIALIZED", "product and intertwining identities at seeded rational points",
                      "lhs(xi)", "rhs(xi)", ok, detail))
    return out


# --- chains --------------------------------------------------------------------


def _oracle_table(eq, ls, lo, hi, grid, bindings, samples):
    """Oracle eigenpairs per l, ascending, found by scanning [lo, hi]."""
    table = {}
    for l in ls:
        sols = []
        for window in bracket_eigenvalues(eq, l, lo, hi, grid, bindings, samples):
            sols.append(shooting_oracle(eq, l, window, grid, bindings))
        table[l] = sols
    return table


def _chain_checks(tag, desc, n_max, grid, scan, oracle_count=None):
    out = []
    chain = generate_chain(desc, n_max)
    eq = desc.equation()
    b = dict(desc.constants)
    states = list(chain.states)
    if oracle_count is not None:
        states = sorted(states, key=lambda s: (chain.eigenvalues[(s.n, s.l)], s.n, s.l))[:oracle_count]

    worst_res = max(hamiltonian_residual(s, chain.eigenvalues[(s.n, s.l)], eq, grid, b) for s in states)
    out.append(Check(f"CHAIN_{tag}_RESIDUAL", "Hamiltonian residual of every ladder state",
                     "pass" if worst_res < 1e-10 else "fail", _num(worst_res), "< 1e-10", "1e-10",
                     f"{len(states)} states"))

    nodes_ok = all(node_count(s) == s.n - 1 - s.l for s in chain.states)
    out.append(_exact(f"CHAIN_{tag}_NODES", "node count n - 1 - l: one more node per lowering step",
                      [node_count(s) for s in chain.states], [s.n - 1 - s.l for s in chain.states], nodes_ok))

    worst_rq = max(abs(rayleigh_quotient(s, eq, grid, b) / float(chain.eigenvalues[(s.n, s.l)]) - 1) for s in states)
    out.append(Check(f"CHAIN_{tag}_RAYLEIGH", "Rayleigh quotient matches the recorded eigenvalue",
                     "pass" if worst_rq < 1e-6 else "fail", _num(worst_rq), "< 1e-6", "1e-6 relative"))

    table = _oracle_table(eq, sorted({s.l for s in states}), scan[0], scan[1], grid, b, scan[2])
    worst_ov, worst_ev, missing = 0.0, 0.0, []
    for s in states:
        k = s.n - 1 - s.l
        sols = table.get(s.l, [])
        if k >= len(sols):
            missing.append((s.n, s.l))
            continue
        sol = sols[k]
        X = normalize_exact(s).evaluate(grid.points)
        worst_ov = max(worst_ov, 1 - abs(overlap(X, sol.samples, grid)))
        lam = float(chain.eigenvalues[(s.n, s.l)])
        worst_ev = max(worst_ev, abs(sol.eigenvalue - lam) / abs(lam))
    ok = not missing
    out.append(Check(f"CHAIN_{tag}_ORACLE_OVERLAP", "|overlap| with the shooting-oracle eigenfunction",
                     "pass" if ok and worst_ov <= 1e-8 else "fail", _num(1 - worst_ov), ">= 1 - 1e-8", "1e-8",
                     f"missing oracle states {missing}" if missing else ""))
    out.append(Check(f"CHAIN_{tag}_ORACLE_EIGENVALUE", "oracle eigenvalue versus the ladder bookkeeping",
                     "pass" if ok and worst_ev <= 1e-6 else "fail", _num(worst_ev), "<= 1e-6", "1e-6 relative"))

    worst_orth = 0.0
    for a, c in itertools.combinations(chain.states, 2):
        if a.l == c.l:
            va = normalize_exact(a).evaluate(grid.points)
            vc = normalize_exact(c).evaluate(grid.points)
            worst_orth = max(worst_orth, abs(overlap(va, vc, grid)))
    out.append(Check(f"CHAIN_{tag}_ORTHOGONALITY", "same-l states of different chains are orthogonal",
                     "pass" if worst_orth < 1e-8 else "fail", _num(worst_orth), "< 1e-8", "1e-8"))

    steps = chain.steps if oracle_count is None else chain.steps[:2]
    worst_norm = 0.0
    for st in steps:
        X = chain.state(*st.source)
        measured = operator_norm_ratio(st.operator, X, grid)
        worst_norm = max(worst_norm, abs(measured * st.normalization - 1))
    out.append(Check(f"CHAIN_{tag}_NORM_RATIO", "measured ||A+ X|| / ||X|| equals 1/c = sqrt(lambda - eps)",
                     "pass" if worst_norm < 1e-6 else "fail", _num(worst_norm), "< 1e-6", "1e-6 relative",
                     f"{len(steps)} steps"))
    return out, chain


def suite_chains(seed: int = 0) -> list[Check]:
    out = []
    coulomb = PotentialDescriptor.coulomb(2)
    grid_c = RadialGrid.for_scale(coulomb.length_scale(4))
    checks, chain_c = _chain_checks("COULOMB", coulomb, 4, grid_c, (-1.2, -0.05, 300))
    out += checks

    # the concrete n = 2 vectors
    eq = coulomb.equation()
    branch = solve_riccati_power_ansatz(gamma_of(eq))[0]
    top = ExpPolyState((Fraction(1),), 1, Fraction(-1, 2), 0)
    lower = build_ladder_pair(eq.f, branch.partial_substitute({"K": 2, "l": 1})).A_plus
    annih = build_ladder_pair(eq.f, branch.partial_substitute({"K": 2, "l": 2})).A
    lowered = apply_ladder(lower, top)
    target = ExpPolyState((Fraction(1), Fraction(-1, 2)), 0, Fraction(-1, 2), 0)
    k = lowered.proportional_to(target)
    ov = abs(overlap(normalize_exact(lowered).evaluate(grid_c.points),
                     normalize_exact(target).evaluate(grid_c.points), grid_c))
    out.append(Check("CHAIN_CONCRETE_LOWERING", f"({lower}) r e^(-r/2) is proportional to (1 - r/2) e^(-r/2)",
                     "pass" if k is not None and ov >= 1 - 1e-8 else "fail",
                     lowered.describe(), f"{k} * (1 - r/2) e^(-r/2)", "1e-8", f"|overlap| = {ov:.15f}"))
    killed = apply_ladder(annih, top)
    out.append(_exact("CHAIN_CONCRETE_ANNIHILATION", f"({annih}) r e^(-r/2) = 0", killed.describe(), 0,
                      killed.is_zero()))

    # printed normalization radicand lambda + eps turns negative where the engine's is positive
    bad = []
    for st in chain_c.steps:
        lam = chain_c.eigenvalues[st.source]
        printed = lam + st.superpotential.epsilon.to_fraction()
        if printed < 0 < st.radicand:
            bad.append(st.source)
    out.append(_flag("NORMALIZATION_SIGN_COULOMB",
                     "printed radicand lambda - K^2/(4l^2) versus the engine radicand lambda + K^2/(4l^2)",
                     "lambda + eps", "lambda - eps", len(bad) == len(chain_c.steps) and bad != [],
                     f"printed radicand negative for steps from {bad}"))

    osc = PotentialDescriptor.oscillator(1)
    grid_o = RadialGrid.for_scale(osc.length_scale())
    checks, chain_o = _chain_checks("OSC", osc, 3, grid_o, (0.5, 12.0, 300), oracle_count=3)
    out += checks
    ground = chain_o.state(1, 0)
    res = hamiltonian_residual(ground, 3, osc.equation(), grid_o, osc.constants)
    ok = ground.exact_equal(ExpPolyState((Fraction(1),), 0, 0, Fraction(-1, 2))) and res < 1e-10
    out.append(Check("CHAIN_OSC_GROUND", "e^(-r^2/2) satisfies H_0 X = -3 X (s = 1)",
                     "pass" if ok else "fail", _num(res), "< 1e-10", "1e-10", ground.describe()))
    st = chain_o.steps[0]
    lam = chain_o.eigenvalues[st.source]
    printed = lam + st.superpotential.epsilon.to_fraction()
    out.append(_flag("NORMALIZATION_SIGN_OSC",
                     "printed radicand lambda + sqrt(k)(2l - 1) versus the engine radicand lambda - sqrt(k)(2l - 1)",
                     printed, st.radicand, printed != st.radicand,
                     f"step {st.source} -> {st.target} at s = 1"))
    return out


# --- robertson -----------------------------------------------------------------


def _perm_det(m) -> Fraction:
    total = Fraction(0)
    for perm in itertools.permutations(range(3)):
        inv = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
        term = Fraction(-1 if inv % 2 else 1)
        for i in range(3):
            term *= m[i][perm[i]]
        total += term
    return total


def _matrix_9d(r: Fraction, u: Fraction, w: Fraction):
    return [
        [Fraction(1), 1 / (r * r), Fraction(0)],
        [Fraction(0), 1 / (u * u - 1), 1 / (u * u - 1) ** 2],
        [Fraction(0), Fraction(0), 1 / (w * w - 1)],
    ]


def suite_robertson(seed: int = 0, samples: int = 100) -> list[Check]:
    out = []
    rng = random.Random(seed)
    mismatches = 0
    for _ in range(samples):
        r = Fraction(rng.randint(1, 999), rng.randint(1, 99))
        u = Fraction(rng.randint(-98, 98), 99)
        w = Fraction(rng.randint(-98, 98), 99)
        m = _matrix_9d(r, u, w)
        if determinant3(m) != _perm_det(m) or determinant3(m) != 1 / ((u * u - 1) * (w * w - 1)):
            mismatches += 1
    out.append(_exact("STAECKEL_DET_9D", "six-term determinant of the printed matrix versus the permutation sum",
                      f"{mismatches} mismatches", "0 mismatches", mismatches == 0,
                      f"{samples} seeded rational points; both equal 1/((u^2 - 1)(w^2 - 1))"))

    cat = builtin_catalog()
    for name in ("rectangular", "circular-cylindrical", "spherical", "parabolic", "spherical-paper-cos"):
        rep = robertson_check(cat[name], samples, seed)
        cid = "ROBERTSON_" + name.upper().replace("-", "_")
        out.append(Check(cid, f"h1 h2 h3 / S = f1 f2 f3 for {name}", "pass" if rep.holds else "fail",
                         _num(rep.max_deviation), "< 1e-10", "1e-10 relative",
                         f"{len(rep.points)} points, seed {seed}, cofactor deviation {_num(rep.cofactor_max_deviation)}"))
    rep = robertson_check(cat["spherical-paper"], samples, seed)
    out.append(_flag("ROBERTSON_SPHERICAL_PAPER",
                     "printed matrix read with plain (r, theta, phi) arguments and f3 = sqrt(1 - cos^2 phi)",
                     "holds", rep.verdict, rep.verdict == "violated",
                     f"max relative deviation {_num(rep.max_deviation)} over {len(rep.points)} points",
                     tolerance="1e-10 relative"))
    n_full = sum(1 for s in cat.values() if not s.name.startswith("spherical-paper"))
    out.append(_flag("SYSTEMS_COUNT", "number of orthogonal separable systems claimed versus catalogued",
                     12, n_full, n_full != 12,
                     "the catalog ships the eleven classical orthogonal systems of the Helmholtz equation"))
    return out


# --- normal form ---------------------------------------------------------------


def suite_normalform(seed: int = 0) -> list[Check]:
    out = []
    coulomb = PotentialDescriptor.coulomb(2)
    ground = normalize_exact(generate_chain(coulomb, 1).state(1, 0))
    grid = RadialGrid(1e-6, 40.0 * coulomb.length_scale(1), 4096, "uniform")
    psi = ground.evaluate(grid.points)

    def p(t):
        return t * t

    def q(t):
        return 2.0 * t

    quarter = liouville_normal_form(p, p, psi, grid, Fraction(1, 4), q=q, lam=-1.0)
    u_ok = np.allclose(quarter.y, grid.points * psi, rtol=1e-12, atol=0)
    out.append(Check("NORMALFORM_QUARTER", "exponent 1/4 with p = rho = r^2 gives y = r X solving y'' + (r(x) + lam) y = 0",
                     "pass" if quarter.max_residual < 1e-6 and u_ok else "fail",
                     _num(quarter.max_residual), "< 1e-6", "1e-6 relative", "n = 1 Coulomb state, K = 2"))
    half = liouville_normal_form(p, p, psi, grid, Fraction(1, 2), q=q, lam=-1.0)
    out.append(_flag("NORMALFORM_HALF", "printed amplitude exponent 1/2 leaves a first-derivative term",
                     _num(half.max_residual), ">= 1e-2", half.max_residual >= 1e-2,
                     "only (p rho)^(1/4) removes the first-derivative term", tolerance="1e-2"))
    g = RadialGrid(1e-6, 3.0, 200, "uniform")
    ident = liouville_normal_form(lambda t: np.ones_like(t), lambda t: np.ones_like(t), np.sin(g.points), g,
                                  Fraction(1, 4), lam=1.0)
    dev = float(np.max(np.abs(ident.x - g.points)))
    ok = dev < 1e-12 and np.array_equal(ident.y, np.sin(g.points))
    out.append(Check("NORMALFORM_IDENTITY", "p = rho = 1 leaves x = theta and y = psi",
                     "pass" if ok else "fail", _num(dev), "< 1e-12", "1e-12"))
    return out


SUITE_FUNCS: dict[str, Callable[[int], list[Check]]] = {
    "riccati": suite_riccati,
    "commutators": suite_commutators,
    "chains": suite_chains,
    "robertson": suite_robertson,
    "normalform": suite_normalform,
}


def run_suites(names: Iterable[str], seed: int = 0) -> list[Check]:
    checks: list[Check] = []
    for name in names:
        checks += SUITE_FUNCS[name](seed)
    ids = [c.id for c in checks]
    if len(ids) != len(set(ids)):
        raise AssertionError("duplicate check ids")
    return sorted(checks, key=lambda c: c.id)

"""Riccati factorization of separated equations.

For a separated operator H = D^2 + (f'/f) D + q the ladder pair

    A  = D + f'/(2f) - R
    A+ = D + f'/(2f) + R

satisfies A o A+ = H + eps exactly whenever R' - R^2 = eps + Gamma with

    Gamma = (f')^2/(4 f^2) - f''/(2 f) + q.

The superpotential is sought as R = a/x + b + c*x and the constants are found
by matching powers of x.  Everything here is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from ladderkit.errors import (
    NonPositiveRadicand,
    NotFactorizableInBasis,
    NotPerfectSquare,
)
from ladderkit.staeckel.core import SeparatedEquation
from ladderkit.symexpr import Coefficient, DiffOperator, SymbolicFunction, commutator, compose_operators
from ladderkit.symexpr.operators import compose_general, constant_part, subtract_general

GAMMA_SUPPORT = frozenset({-2, -1, 0, 1, 2})


@dataclass(frozen=True, eq=False)
class Superpotential:
    R: SymbolicFunction
    epsilon: Coefficient
    branch: str = ""

    @property
    def a(self) -> Coefficient:
        return self.R.coefficient(-1)

    @property
    def b(self) -> Coefficient:
        return self.R.coefficient(0)

    @property
    def c(self) -> Coefficient:
        return self.R.coefficient(1)

    @property
    def epsilon_paper_form(self) -> Coefficient:
        """The constant the printed normalization radicand effectively subtracts.

        The engine radicand is lambda - eps; the printed one is lambda + eps,
        i.e. lambda - (-eps).
        """
        return -self.epsilon

    def shift(self, name: str, delta: int) -> "Superpotential":
        return Superpotential(self.R.shift(name, delta), self.epsilon.shift(name, delta), self.branch)

    def partial_substitute(self, bindings: Mapping) -> "Superpotential":
        return Superpotential(
            self.R.partial_substitute(bindings), self.epsilon.partial_substitute(bindings), self.branch
        )


def gamma_of(eq: SeparatedEquation) -> SymbolicFunction:
    """Gamma = (f')^2/(4f^2) - f''/(2f) + sum_{n != m} k_n^2 Phi_mn - v."""
    f = eq.f
    f1 = f.derivative()
    f2 = f1.derivative()
    geometric = (f1 * f1).divide(f * f * 4) - f2.divide(f * 2)
    return geometric + eq.q


def verify_riccati_residual(sp: Superpotential, gamma: SymbolicFunction) -> SymbolicFunction:
    """R' - R^2 - Gamma - eps; the zero function iff sp solves the condition."""
    R = sp.R
    return R.derivative() - R * R - gamma - sp.epsilon


def _solve_branches(gamma: SymbolicFunction) -> list[Superpotential]:
    g = {k: gamma.coefficient(k) for k in (-2, -1, 0, 1, 2)}
    table = gamma.table
    disc = 1 - 4 * g[-2]
    root = disc.sqrt()
    a_roots = [(root - 1) / 2]
    if not root.is_zero():
        a_roots.append((-root - 1) / 2)
    if g[2].is_zero():
        c_roots = [Coefficient(0)]
    else:
        sc = (-g[2]).sqrt()
        c_roots = [-sc, sc]

    out = []
    for a in a_roots:
        for c in c_roots:
            if not a.is_zero():
                b = -g[-1] / (2 * a)
            elif not c.is_zero():
                b = -g[1] / (2 * c)
            else:
                # b is free when a = c = 0; the canonical choice is b = 0
                b = Coefficient(0)
            if not (-2 * a * b - g[-1]).is_zero():
                continue
            if not (-2 * b * c - g[1]).is_zero():
                continue
            eps = c - b * b - 2 * a * c - g[0]
            R = SymbolicFunction({-1: a, 0: b, 1: c}, table)
            sp = Superpotential(R, eps, branch=f"a={a}, c={c}")
            if not verify_riccati_residual(sp, gamma).is_zero():
                raise AssertionError(f"internal: branch {sp.branch} fails its own residual")
            out.append(sp)
    return out


def solve_riccati_power_ansatz(
    gamma: SymbolicFunction, bindings: Optional[Mapping[str, Fraction | int]] = None
) -> list[Superpotential]:
    """All R = a/x + b + c*x with R' - R^2 = eps + Gamma, by coefficient matching.

    Branch order: the larger root a = (-1 + sqrt(1 - 4 g_-2))/2 first, then
    c = -sqrt(-g_2) before +sqrt(-g_2).  When a discriminant is not a square
    in the coefficient ring and `bindings` is given, the constants are
    specialized to rationals and the match is retried.
    """
    extra = set(gamma.support) - GAMMA_SUPPORT
    if extra:
        raise NotFactorizableInBasis(
            f"Gamma has powers {sorted(extra)} outside {{-2..2}}; no R = a/x + b + c*x fits"
        )
    try:
        branches = _solve_branches(gamma)
    except NotPerfectSquare:
        if not bindings:
            raise
        branches = _solve_branches(gamma.partial_substitute(bindings))
    if not branches:
        raise NotFactorizableInBasis(f"no consistent power-basis superpotential for Gamma = {gamma}")
    return branches


@dataclass(frozen=True, eq=False)
class Intertwining:
    """H_up o A = A o H_down + shift * A, with H_up + c_up = A o A+ and H_down + c_down = A+ o A."""

    H_up: DiffOperator
    H_down: DiffOperator
    c_up: Coefficient
    c_down: Coefficient
    shift: Coefficient
    multiplier: Optional[SymbolicFunction]
    commutator_HA: DiffOperator
    identity_holds: bool
    ordering: str
    role: Mapping[str, str]
    index_shift_found: bool

    def relation_text(self) -> str:
        return f"H_up o A = A o H_down + ({self.shift})*A"


@dataclass(frozen=True, eq=False)
class LadderPair:
    A: DiffOperator
    A_plus: DiffOperator
    superpotential: Superpotential
    f: SymbolicFunction
    shift: Optional[Coefficient] = None
    role: Mapping[str, str] = field(default_factory=dict)

    def lowering(self) -> DiffOperator:
        """The operator that takes sector l to l - 1 (A+ under the engine's identities)."""
        return self.A_plus if self.role.get("lowers", "A_plus") == "A_plus" else self.A

    def raising(self) -> DiffOperator:
        return self.A if self.role.get("raises", "A") == "A" else self.A_plus


def half_log_derivative(f: SymbolicFunction) -> SymbolicFunction:
    return f.derivative().divide(f * 2)


def build_ladder_pair(
    f: SymbolicFunction, sp: Superpotential, eq: Optional[SeparatedEquation] = None
) -> LadderPair:
    """A = D + f'/(2f) - R, A+ = D + f'/(2f) + R; with `eq`, also the shift and roles."""
    g = half_log_derivative(f)
    A = DiffOperator.first_order(g - sp.R)
    Ap = DiffOperator.first_order(g + sp.R)
    pair = LadderPair(A, Ap, sp, f)
    if eq is None:
        return pair
    rel = derive_intertwining(pair, eq)
    return LadderPair(A, Ap, sp, f, rel.shift, rel.role)


def _as_multiplier(op_coeffs) -> Optional[SymbolicFunction]:
    coeffs = list(op_coeffs)
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    if not coeffs:
        return SymbolicFunction.zero()
    if len(coeffs) > 1:
        return None
    return coeffs[0]


def derive_intertwining(pair: LadderPair, eq: SeparatedEquation) -> Intertwining:
    """Exact intertwining data between the sectors l (up) and l - 1 (down).

    Both products are computed, their constant offsets from H_l and the
    index-shifted H_{l-1} are read off, and the relation is re-verified by
    composing third-order operators.
    """
    A, Ap = pair.A, pair.A_plus
    H_up = eq.operator()
    up = compose_operators(A, Ap)
    down = compose_operators(Ap, A)
    c_up = constant_part(subtract_general(up, H_up))
    if c_up is None:
        raise NotFactorizableInBasis("A o A+ differs from H by a non-constant operator")

    H_down = eq.shifted(-1).operator() if eq.index_symbol else None
    c_down = constant_part(subtract_general(down, H_down)) if H_down is not None else None
    found = c_down is not None
    if not found:
        # no index family to compare against: take A+ o A itself as the partner
        c_down = c_up
        H_down = down.plus_constant(-c_up)
    delta = c_down - c_up

    # H_up o A - A o H_down - delta * A must vanish identically
    lhs = compose_general(H_up, A)
    rhs = compose_general(A, H_down)
    resid = subtract_general(subtract_general(lhs, rhs), A.scale(delta))
    holds = not resid

    comm = commutator(H_up, A)
    M = _as_multiplier(subtract_general(H_down, H_up))
    if M is not None:
        expected = subtract_general(compose_general(A, DiffOperator.multiplier(M)), A.scale(-delta))
        if subtract_general(comm, expected):
            holds = False
        ordering = f"[H_l, A] = A o ({M}) + ({delta})*A"
    else:
        ordering = f"[H_l, A] = {comm}"

    role = {"raises": "A", "lowers": "A_plus"} if found else {}
    return Intertwining(
        H_up=H_up,
        H_down=H_down,
        c_up=c_up,
        c_down=c_down,
        shift=delta,
        multiplier=M,
        commutator_HA=comm,
        identity_holds=holds,
        ordering=ordering,
        role=role,
        index_shift_found=found,
    )


def normalization_radicand(lam, sp: Superpotential) -> Coefficient:
    """lambda - eps: the squared norm of A+ X for a unit eigenfunction X (H X = -lambda X)."""
    return Coefficient.coerce(lam) - sp.epsilon


def normalization_constant(lam, sp: Superpotential, bindings: Optional[Mapping] = None) -> float:
    """c = 1/sqrt(lambda - eps) so that c * A+ X is normalized.

    The square root generally leaves the rational coefficient ring, so the
    value is returned as a float after specialization; the exact radicand is
    available from normalization_radicand.
    """
    lam_c = Coefficient.coerce(lam)
    rad = normalization_radicand(lam_c, sp)
    value = rad.substitute(bindings or {})
    if value <= 0:
        raise NonPositiveRadicand(lam_c, sp.epsilon, rad)
    return 1.0 / math.sqrt(value)


@dataclass(frozen=True, eq=False)
class FactorizationReport:
    gamma: SymbolicFunction
    branches: tuple[Superpotential, ...]
    commutators: tuple[DiffOperator, ...]
    intertwining: Optional[Intertwining]
    audit_flags: tuple[str, ...]

    def to_json(self) -> dict:
        inter = None
        if self.intertwining is not None:
            inter = {"shift": str(self.intertwining.shift), "ordering": self.intertwining.ordering}
        return {
            "branches": [
                {
                    "R": str(sp.R),
                    "epsilon_engine": str(sp.epsilon),
                    "epsilon_paper_form": str(sp.epsilon_paper_form),
                }
                for sp in self.branches
            ],
            "commutator": str(self.commutators[0]) if self.commutators else None,
            "intertwining": inter,
            "audit_flags": list(self.audit_flags),
        }


def factorize_equation(
    eq: SeparatedEquation, bindings: Optional[Mapping] = None
) -> FactorizationReport:
    """Gamma, all branches, [A+, A] per branch and the first branch's intertwining."""
    gamma = gamma_of(eq)
    branches = solve_riccati_power_ansatz(gamma, bindings)
    comms = []
    for sp in branches:
        pair = build_ladder_pair(eq.f, sp)
        comms.append(commutator(pair.A_plus, pair.A))
    pair = build_ladder_pair(eq.f, branches[0])
    inter = derive_intertwining(pair, eq)
    flags = []
    if inter.index_shift_found:
        flags.append("role: A raises the index (l-1 -> l), A+ lowers it (l -> l-1)")
        if not inter.shift.is_zero():
            flags.append(f"adjacent sectors differ in eigenvalue by {inter.shift}; equal labels do not hold")
    flags.append("normalization radicand is lambda - eps (engine sign); printed form uses lambda + eps")
    return FactorizationReport(gamma, tuple(branches), tuple(comms), inter, tuple(flags))

"""Exact radial states P(r) r^alpha exp(beta r + gamma r^2) and ladder chains.

States carry rational data only; every floating-point operation happens in
`evaluate` or in the numerics module.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np
import sympy

from ladderkit.errors import (
    DenominatorVanishes,
    LadderkitError,
    NonNormalizable,
    NotRepresentable,
    UnsupportedSuperpotential,
)
from ladderkit.factorize import (
    Superpotential,
    build_ladder_pair,
    derive_intertwining,
    gamma_of,
    normalization_constant,
    solve_riccati_power_ansatz,
)
from ladderkit.staeckel.core import SeparatedEquation, assemble_separated_equation, parse_potential
from ladderkit.staeckel.systems import CONSTANT_SYMBOLS, SPHERICAL
from ladderkit.symexpr import Coefficient, DiffOperator, SymbolicFunction

Poly = tuple[Fraction, ...]


def _trim(p) -> Poly:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def _pscale(a: Poly, c) -> Poly:
    return _trim([x * c for x in a])


def _pshift(a: Poly, k: int) -> Poly:
    """Multiply by r^k, k >= 0."""
    return _trim([Fraction(0)] * k + list(a)) if a else ()


def _pderiv(a: Poly) -> Poly:
    return _trim([i * a[i] for i in range(1, len(a))])


@dataclass(frozen=True)
class ExpPolyState:
    """X(r) = scale * P(r) * r^alpha * exp(beta r + gamma r^2).

    `poly` holds the coefficients of P in ascending order, with P(0) != 0 for
    a nonzero state (powers of r are moved into alpha).  `scale` is the
    floating normalization factor set by the numerics module; linear
    operations carry it through unchanged.
    """

    poly: Poly
    alpha: int
    beta: Fraction
    gamma: Fraction
    n: int = 0
    l: int = 0
    scale: float = 1.0

    def __post_init__(self):
        p = _trim(self.poly)
        alpha = int(self.alpha)
        k = 0
        while k < len(p) and p[k] == 0:
            k += 1
        if k and k < len(p):
            p = p[k:]
            alpha += k
        object.__setattr__(self, "poly", p)
        object.__setattr__(self, "alpha", alpha if p else 0)
        object.__setattr__(self, "beta", Fraction(self.beta))
        object.__setattr__(self, "gamma", Fraction(self.gamma))

    @classmethod
    def zero_state(cls, beta=0, gamma=0, n: int = 0, l: int = 0) -> "ExpPolyState":
        return cls((), 0, beta, gamma, n, l)

    # structure ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.poly

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def is_normalizable(self) -> bool:
        if self.is_zero():
            return True
        decays = self.gamma < 0 or (self.gamma == 0 and self.beta < 0)
        return decays and self.alpha >= 0

    def same_exponent(self, other: "ExpPolyState") -> bool:
        return self.beta == other.beta and self.gamma == other.gamma

    def with_labels(self, n: int, l: int) -> "ExpPolyState":
        return replace(self, n=n, l=l)

    def with_scale(self, scale: float) -> "ExpPolyState":
        return replace(self, scale=float(scale))

    def exact_equal(self, other: "ExpPolyState") -> bool:
        """Equality of the exact functions (ignores labels and scale)."""
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return (self.poly, self.alpha) == (other.poly, other.alpha) and self.same_exponent(other)

    def proportional_to(self, other: "ExpPolyState") -> Optional[Fraction]:
        """The rational k with self = k * other, or None."""
        if self.is_zero() or other.is_zero() or not self.same_exponent(other):
            return None
        if self.alpha != other.alpha or len(self.poly) != len(other.poly):
            return None
        k = self.poly[0] / other.poly[0]
        return k if all(a == k * b for a, b in zip(self.poly, other.poly)) else None

    # exact algebra --------------------------------------------------------

    def __add__(self, other: "ExpPolyState") -> "ExpPolyState":
        if self.is_zero():
            return replace(other, n=self.n, l=self.l)
        if other.is_zero():
            return self
        if not self.same_exponent(other):
            raise NotRepresentable("cannot add states with different exponential factors")
        if self.scale != other.scale:
            raise NotRepresentable("cannot add states with different floating scales")
        a = min(self.alpha, other.alpha)
        p = _padd(_pshift(self.poly, self.alpha - a), _pshift(other.poly, other.alpha - a))
        return ExpPolyState(p, a, self.beta, self.gamma, self.n, self.l, self.scale)

    def times(self, c) -> "ExpPolyState":
        return ExpPolyState(
            _pscale(self.poly, Fraction(c)), self.alpha, self.beta, self.gamma, self.n, self.l, self.scale
        )

    def times_power(self, c, p: int) -> "ExpPolyState":
        """Multiply by c * r^p."""
        s = self.times(c)
        return replace(s, alpha=s.alpha + p) if not s.is_zero() else s

    def times_function(self, f: SymbolicFunction) -> "ExpPolyState":
        """Multiply by a rational Laurent polynomial (no free constants)."""
        out = ExpPolyState.zero_state(self.beta, self.gamma, self.n, self.l)
        for p, c in f.terms:
            out = out + self.times_power(c.to_fraction(), p)
        return out

    def derivative(self) -> "ExpPolyState":
        """d/dr: P_new = r P' + alpha P + r (beta + 2 gamma r) P, alpha_new = alpha - 1."""
        if self.is_zero():
            return self
        P = self.poly
        new = _padd(_pshift(_pderiv(P), 1), _pscale(P, self.alpha))
        new = _padd(new, _pshift(_pscale(P, self.beta), 1))
        new = _padd(new, _pshift(_pscale(P, 2 * self.gamma), 2))
        return ExpPolyState(new, self.alpha - 1, self.beta, self.gamma, self.n, self.l, self.scale)

    # evaluation -----------------------------------------------------------

    def polynomial_values(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c in reversed(self.poly):
            out = out * r + float(c)
        return out

    def evaluate(self, r, normalized: bool = True) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.is_zero():
            return np.zeros_like(r)
        beta, gamma = float(self.beta), float(self.gamma)
        v = self.polynomial_values(r) * r ** self.alpha * np.exp(beta * r + gamma * r * r)
        return v * self.scale if normalized else v

    def describe(self) -> str:
        if self.is_zero():
            return "0"
        P = " + ".join(f"({c})*r^{i}" if i else f"({c})" for i, c in enumerate(self.poly) if c)
        return f"[{P}] * r^{self.alpha} * exp(({self.beta})*r + ({self.gamma})*r^2)"

    def __str__(self):
        return self.describe()


def _rational_function(f: SymbolicFunction, bindings: Optional[Mapping]) -> SymbolicFunction:
    return f.substitute(bindings or {}) if f.free_symbols or bindings else f


def apply_operator(op: DiffOperator, state: ExpPolyState, bindings: Optional[Mapping] = None) -> ExpPolyState:
    """Exact a2 X'' + a1 X' + a0 X for an operator with power-basis coefficients."""
    a0, a1, a2 = (_rational_function(c, bindings) for c in op.coefficients)
    out = state.times_function(a0)
    if not a1.is_zero() or not a2.is_zero():
        d1 = state.derivative()
        out = out + d1.times_function(a1)
        if not a2.is_zero():
            out = out + d1.derivative().times_function(a2)
    return replace(out, n=state.n, l=state.l) if not out.is_zero() else out


def _ladder_weights(op: DiffOperator, bindings: Optional[Mapping]) -> tuple[Fraction, Fraction, Fraction]:
    if not op.is_monic_first_order():
        raise UnsupportedSuperpotential(f"ladder operator must be d/dr + w(r), got {op}")
    w = _rational_function(op.a0, bindings)
    extra = set(w.support) - {-1, 0, 1}
    if extra:
        raise UnsupportedSuperpotential(f"w(r) = {w} has powers outside {{-1, 0, 1}}")
    return tuple(w.coefficient(k).to_fraction() for k in (-1, 0, 1))


def apply_ladder(op: DiffOperator, state: ExpPolyState, bindings: Optional[Mapping] = None) -> ExpPolyState:
    """(d/dr + w_-1/r + w0 + w1 r) X, exactly.

    P_new = r P' + (alpha + w_-1) P + r (beta + 2 gamma r + w0 + w1 r) P,
    alpha_new = alpha - 1 (before moving any new factor of r into alpha).
    """
    wm1, w0, w1 = _ladder_weights(op, bindings)
    if state.is_zero():
        return state
    P = state.poly
    new = _padd(_pshift(_pderiv(P), 1), _pscale(P, state.alpha + wm1))
    new = _padd(new, _pshift(_pscale(P, state.beta + w0), 1))
    new = _padd(new, _pshift(_pscale(P, 2 * state.gamma + w1), 2))
    return ExpPolyState(new, state.alpha - 1, state.beta, state.gamma, state.n, state.l, state.scale)


def top_state(op: DiffOperator, n: int = 0, l: int = 0, bindings: Optional[Mapping] = None) -> ExpPolyState:
    """The solution of op X = 0 for op = d/dr + w_-1/r + w0 + w1 r.

    X = r^(-w_-1) exp(-w0 r - w1 r^2 / 2), which must be normalizable.
    """
    wm1, w0, w1 = _ladder_weights(op, bindings)
    if wm1.denominator != 1:
        raise UnsupportedSuperpotential(f"power r^{-wm1} is not an integer power")
    X = ExpPolyState((Fraction(1),), int(-wm1), -w0, -w1 / 2, n, l)
    if not X.is_normalizable():
        raise NonNormalizable(f"solution {X} of {op} X = 0 is not normalizable")
    check = apply_ladder(op, X, bindings)
    if not check.is_zero():
        raise AssertionError(f"internal: {op} does not annihilate {X}")
    return X


def node_count(state: ExpPolyState) -> int:
    """Sign changes of the state on (0, inf): positive real roots of P of odd multiplicity."""
    if state.is_zero() or len(state.poly) < 2:
        return 0
    r = sympy.Symbol("r")
    P = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(state.poly)], r, domain="QQ")
    count = 0
    for factor, mult in P.sqf_list()[1]:
        if mult % 2:
            count += factor.count_roots(0, None) - (1 if factor.eval(0) == 0 else 0)
    return count


# --- chains -------------------------------------------------------------------


@dataclass(frozen=True)
class PotentialDescriptor:
    """A radial potential v(r) on the spherical radial axis, plus constants."""

    kind: str
    text: str
    potential: SymbolicFunction
    constants: Mapping[str, Fraction]

    @classmethod
    def coulomb(cls, K=2) -> "PotentialDescriptor":
        return cls.expr("-K/r", {"K": K}, kind="coulomb")

    @classmethod
    def oscillator(cls, s=1) -> "PotentialDescriptor":
        return cls.expr("s^2*r^2", {"s": s}, kind="oscillator")

    @classmethod
    def expr(cls, text: str, constants: Mapping[str, object] | None = None, kind: str = "expr") -> "PotentialDescriptor":
        pot = parse_potential(text, SPHERICAL, 1, CONSTANT_SYMBOLS)
        consts = {k: Fraction(v) for k, v in (constants or {}).items()}
        if "l" in pot.free_symbols:
            raise LadderkitError("the potential may not depend on the angular index l")
        missing = [n for n in pot.free_symbols if n not in consts]
        if missing:
            raise LadderkitError(f"unbound constants in potential: {missing}")
        return cls(kind, text, pot, consts)

    def equation(self) -> SeparatedEquation:
        return assemble_separated_equation(SPHERICAL, 1, self.potential)

    def length_scale(self, n: int = 1) -> float:
        if self.kind == "coulomb":
            return 2.0 * n / float(self.constants["K"])
        if self.kind == "oscillator":
            return 1.0 / float(self.constants["s"]) ** 0.5
        return float(max(n, 1))


@dataclass(frozen=True)
class ChainStep:
    source: tuple[int, int]
    target: tuple[int, int]
    operator: DiffOperator
    superpotential: Superpotential
    normalization: float
    radicand: Fraction


@dataclass(frozen=True)
class LadderChain:
    """All chains n = 1..n_max; states ordered by (n, l)."""

    potential: PotentialDescriptor
    states: tuple[ExpPolyState, ...]
    eigenvalues: Mapping[tuple[int, int], Fraction]
    steps: tuple[ChainStep, ...]
    annihilators: Mapping[int, DiffOperator]
    shift: Coefficient
    norm_ratios: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def state(self, n: int, l: int) -> ExpPolyState:
        for s in self.states:
            if (s.n, s.l) == (n, l):
                return s
        raise KeyError((n, l))

    def labels(self) -> list[tuple[int, int]]:
        return [(s.n, s.l) for s in self.states]


def _at(sp: Superpotential, l: int, bindings: Mapping) -> Superpotential:
    return sp.partial_substitute({**bindings, "l": l})


def _select_branch(branches, f, L: int, bindings) -> tuple[Superpotential, ExpPolyState]:
    last = None
    for sp in branches:
        try:
            pair = build_ladder_pair(f, _at(sp, L, bindings))
            X = top_state(pair.A)
        except (DenominatorVanishes, NonNormalizable, UnsupportedSuperpotential) as exc:
            last = exc
            continue
        return sp, X
    raise NonNormalizable(f"no branch gives a normalizable top state at index {L}: {last}")


def generate_chain(desc: PotentialDescriptor, n_max: int) -> LadderChain:
    """Top states annihilated by A_n, lowered with A+ down to l = 0.

    Chain n starts from the node-less state with l = n - 1 and eigenvalue
    lambda = c_down(n) (H_{n-1} X = -lambda X); each lowering step l -> l - 1
    adds the intertwining shift to lambda.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    bindings = dict(desc.constants)
    eq = desc.equation()
    gamma = gamma_of(eq)
    branches = solve_riccati_power_ansatz(gamma, bindings)
    f = eq.f

    states, eigen, steps, annihilators = [], {}, [], {}
    shift = None
    for n in range(1, n_max + 1):
        sp, X = _select_branch(branches, f, n, bindings)
        rel = derive_intertwining(build_ladder_pair(f, sp), eq)
        if not rel.index_shift_found:
            raise LadderkitError("the equation has no index family to ladder through")
        shift = rel.shift
        lam = rel.c_down.partial_substitute({**bindings, "l": n}).to_fraction()
        annihilators[n] = build_ladder_pair(f, _at(sp, n, bindings)).A
        X = X.with_labels(n, n - 1)
        states.append(X)
        eigen[(n, n - 1)] = lam
        for l in range(n - 1, 0, -1):
            spl = _at(sp, l, bindings)
            lower = build_ladder_pair(f, spl).A_plus
            c = normalization_constant(lam, spl)
            Y = apply_ladder(lower, X).with_labels(n, l - 1)
            if Y.is_zero():
                raise LadderkitError(f"lowering annihilated state ({n}, {l})")
            steps.append(
                ChainStep((n, l), (n, l - 1), lower, spl, c, (Coefficient(lam) - spl.epsilon).to_fraction())
            )
            lam = lam + rel.shift.partial_substitute({**bindings, "l": l}).to_fraction()
            eigen[(n, l - 1)] = lam
            states.append(Y)
            X = Y
    states.sort(key=lambda s: (s.n, s.l))
    return LadderChain(desc, tuple(states), eigen, tuple(steps), annihilators, shift)

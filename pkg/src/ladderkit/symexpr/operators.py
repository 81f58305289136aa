"""Differential operators a2 D^2 + a1 D + a0 with SymbolicFunction coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Mapping, Sequence

from ladderkit.errors import OrderOverflow
from ladderkit.symexpr.coefficient import Coefficient, Number
from ladderkit.symexpr.functions import SymbolicFunction, SymbolTable

MAX_ORDER = 2


@dataclass(frozen=True, eq=False)
class DiffOperator:
    a2: SymbolicFunction
    a1: SymbolicFunction
    a0: SymbolicFunction

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[SymbolicFunction]) -> "DiffOperator":
        """Build from [c0, c1, c2, ...]; trailing zero coefficients are dropped."""
        coeffs = _trim(list(coeffs))
        if len(coeffs) - 1 > MAX_ORDER:
            raise OrderOverflow(f"operator of order {len(coeffs) - 1} exceeds {MAX_ORDER}")
        z = SymbolicFunction.zero()
        coeffs = coeffs + [z] * (3 - len(coeffs))
        return cls(coeffs[2], coeffs[1], coeffs[0])

    @classmethod
    def d(cls) -> "DiffOperator":
        return cls.from_coefficients([SymbolicFunction.zero(), SymbolicFunction.constant(1)])

    @classmethod
    def multiplier(cls, f: SymbolicFunction) -> "DiffOperator":
        return cls.from_coefficients([f])

    @classmethod
    def first_order(cls, w: SymbolicFunction) -> "DiffOperator":
        """D + w."""
        return cls.from_coefficients([w, SymbolicFunction.constant(1, w.table)])

    @classmethod
    def zero(cls) -> "DiffOperator":
        return cls.from_coefficients([])

    @property
    def coefficients(self) -> tuple[SymbolicFunction, SymbolicFunction, SymbolicFunction]:
        """(a0, a1, a2)."""
        return (self.a0, self.a1, self.a2)

    @property
    def order(self) -> int:
        for k in (2, 1):
            if not self.coefficients[k].is_zero():
                return k
        return 0

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def is_multiplicative(self) -> bool:
        return self.order == 0

    def is_monic_first_order(self) -> bool:
        return self.order == 1 and self.a1 == SymbolicFunction.constant(1)

    @property
    def table(self) -> SymbolTable:
        t = self.a0.table
        return t.merge(self.a1.table).merge(self.a2.table)

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        return DiffOperator(self.a2 + other.a2, self.a1 + other.a1, self.a0 + other.a0)

    def __neg__(self) -> "DiffOperator":
        return DiffOperator(-self.a2, -self.a1, -self.a0)

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def scale(self, c) -> "DiffOperator":
        return DiffOperator(self.a2 * c, self.a1 * c, self.a0 * c)

    def plus_constant(self, c) -> "DiffOperator":
        return DiffOperator(self.a2, self.a1, self.a0 + c)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return all(a == b for a, b in zip(self.coefficients, other.coefficients))

    def __hash__(self):
        return hash(tuple(hash(c) for c in self.coefficients))

    def substitute(self, bindings: Mapping[str, Number]) -> "DiffOperator":
        return DiffOperator(*(c.substitute(bindings) for c in (self.a2, self.a1, self.a0)))

    def partial_substitute(self, bindings: Mapping[str, Number]) -> "DiffOperator":
        return DiffOperator(*(c.partial_substitute(bindings) for c in (self.a2, self.a1, self.a0)))

    def shift(self, name: str, delta: int) -> "DiffOperator":
        return DiffOperator(*(c.shift(name, delta) for c in (self.a2, self.a1, self.a0)))

    def __str__(self):
        return format_operator(self.coefficients)

    def __repr__(self):
        return f"DiffOperator({str(self)!r})"


def format_operator(coeffs: Sequence[SymbolicFunction], symbol: str = "D") -> str:
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c.is_zero():
            continue
        if k == 0:
            parts.append(f"({c})")
        else:
            dk = symbol if k == 1 else f"{symbol}^{k}"
            parts.append(dk if c == SymbolicFunction.constant(1) else f"({c})*{dk}")
    return " + ".join(parts) if parts else "0"


def _trim(coeffs: list[SymbolicFunction]) -> list[SymbolicFunction]:
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def _nth_derivative(f: SymbolicFunction, k: int) -> SymbolicFunction:
    for _ in range(k):
        f = f.derivative()
    return f


def compose_coefficients(
    p: Sequence[SymbolicFunction], q: Sequence[SymbolicFunction]
) -> list[SymbolicFunction]:
    """Coefficient list [c0, c1, ...] of P o Q for operators of any order.

    Uses D^i (q D^j) = sum_k C(i, k) q^(k) D^(i-k+j).
    """
    out: list[SymbolicFunction] = [SymbolicFunction.zero() for _ in range(len(p) + len(q))]
    for i, pi in enumerate(p):
        if pi.is_zero():
            continue
        for j, qj in enumerate(q):
            if qj.is_zero():
                continue
            for k in range(i + 1):
                dq = _nth_derivative(qj, k)
                if dq.is_zero():
                    continue
                out[i - k + j] = out[i - k + j] + pi * dq * comb(i, k)
    return _trim(out)


def _coeff_list(op) -> list[SymbolicFunction]:
    if isinstance(op, DiffOperator):
        return _trim(list(op.coefficients))
    return _trim(list(op))


def compose_general(*ops) -> list[SymbolicFunction]:
    """Composition of any number of operators (DiffOperator or coefficient lists)."""
    result = _coeff_list(ops[0])
    for op in ops[1:]:
        result = compose_coefficients(result, _coeff_list(op))
    return result


def subtract_general(p, q) -> list[SymbolicFunction]:
    p, q = _coeff_list(p), _coeff_list(q)
    n = max(len(p), len(q))
    z = SymbolicFunction.zero()
    p = p + [z] * (n - len(p))
    q = q + [z] * (n - len(q))
    return _trim([a - b for a, b in zip(p, q)])


def compose_operators(P: DiffOperator, Q: DiffOperator) -> DiffOperator:
    """Exact P o Q; rejected when order(P) + order(Q) > 2."""
    if P.order + Q.order > MAX_ORDER:
        raise OrderOverflow(f"composition of orders {P.order} and {Q.order} exceeds {MAX_ORDER}")
    return DiffOperator.from_coefficients(compose_coefficients(P.coefficients, Q.coefficients))


def commutator(P: DiffOperator, Q: DiffOperator) -> DiffOperator:
    """[P, Q] = P o Q - Q o P.

    The intermediate products may have order up to 3; only the result has to
    fit in order 2 (always true when order(P) + order(Q) <= 3).
    """
    pq = compose_coefficients(P.coefficients, Q.coefficients)
    qp = compose_coefficients(Q.coefficients, P.coefficients)
    return DiffOperator.from_coefficients(subtract_general(pq, qp))


def constant_part(op_coeffs) -> Coefficient | None:
    """The constant c if the operator is multiplication by c, else None."""
    coeffs = _coeff_list(op_coeffs)
    if not coeffs:
        return Coefficient(0)
    if len(coeffs) > 1 or not coeffs[0].is_constant():
        return None
    return coeffs[0].coefficient(0)

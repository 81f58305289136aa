"""Scale factors, Staeckel determinants, the Robertson condition, and assembly
of the separated one-dimensional equations."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ladderkit.errors import (
    DegeneratePoint,
    DomainError,
    LadderkitError,
    MissingStaeckelData,
    NotRepresentable,
    UndefinedEntry,
)
from ladderkit.staeckel.systems import CONSTANT_SYMBOLS, CoordinateSystem
from ladderkit.symexpr import Coefficient, DiffOperator, SymbolicFunction, SymbolTable, parse_expr

ROBERTSON_TOL = 1e-10
FD_STEP = 1e-3
DEGENERATE_TOL = 1e-12


def _check_inside(system: CoordinateSystem, point: Sequence[float]) -> None:
    if len(point) != 3:
        raise ValueError("a point needs three coordinates")
    for name, x, (lo, hi) in zip(system.coords, point, system.domain):
        if not lo < float(x) < hi:
            raise DomainError(f"{system.name}: {name}={x} outside ({lo}, {hi})")


def fd_jacobian(system: CoordinateSystem, point: Sequence[float], step: float = FD_STEP) -> np.ndarray:
    """Five-point central differences of the transform; column n holds d(x,y,z)/d xi_n."""
    p = [float(v) for v in point]
    J = np.empty((3, 3))

    def at(n, offset):
        q = list(p)
        q[n] += offset
        return np.array(system.transform(*q), dtype=float)

    for n in range(3):
        h = step * max(1.0, abs(p[n]))
        J[:, n] = (at(n, -2 * h) - 8 * at(n, -h) + 8 * at(n, h) - at(n, 2 * h)) / (12 * h)
    return J


def scale_factors(system: CoordinateSystem, point: Sequence[float]) -> tuple[float, float, float]:
    """h_n = |d r / d xi_n|, from closed-form partials when the system has them."""
    _check_inside(system, point)
    p = [float(v) for v in point]
    try:
        J = system.jacobian(*p) if system.jacobian is not None else fd_jacobian(system, p)
    except (ValueError, ZeroDivisionError) as exc:
        raise DegeneratePoint(f"{system.name}: transform undefined at {p}") from exc
    h = np.sqrt(np.sum(np.asarray(J, dtype=float) ** 2, axis=0))
    if not np.all(np.isfinite(h)) or np.any(h <= DEGENERATE_TOL):
        raise DegeneratePoint(f"{system.name}: degenerate scale factors {tuple(h)} at {p}")
    return tuple(float(v) for v in h)


def determinant3(m) -> object:
    """Six-term expansion of a 3x3 determinant (works on floats and Fractions)."""
    return (
        m[0][0] * m[1][1] * m[2][2]
        + m[0][1] * m[1][2] * m[2][0]
        + m[0][2] * m[1][0] * m[2][1]
        - m[0][2] * m[1][1] * m[2][0]
        - m[0][0] * m[1][2] * m[2][1]
        - m[0][1] * m[1][0] * m[2][2]
    )


def staeckel_values(phi, point: Sequence) -> list[list]:
    """Evaluate Phi[m][n](xi_m) at a point; undefined entries raise UndefinedEntry."""
    values = []
    for m in range(3):
        row = []
        for n in range(3):
            try:
                v = phi[m][n](point[m])
            except (ZeroDivisionError, ValueError, OverflowError) as exc:
                raise UndefinedEntry(f"Phi[{m + 1}][{n + 1}] undefined at xi_{m + 1}={point[m]}") from exc
            if isinstance(v, float) and not math.isfinite(v):
                raise UndefinedEntry(f"Phi[{m + 1}][{n + 1}] not finite at xi_{m + 1}={point[m]}")
            row.append(v)
        values.append(row)
    return values


def staeckel_determinant(phi, point: Sequence):
    """S = |Phi_mn| at a point; `phi` is a 3x3 grid of one-argument callables."""
    return determinant3(staeckel_values(phi, point))


def cofactors_first_column(m) -> tuple:
    return (
        m[1][1] * m[2][2] - m[1][2] * m[2][1],
        -(m[0][1] * m[2][2] - m[0][2] * m[2][1]),
        m[0][1] * m[1][2] - m[0][2] * m[1][1],
    )


@dataclass(frozen=True)
class RobertsonReport:
    system: str
    points: tuple[tuple[float, float, float], ...]
    h_over_s: tuple[float, ...]
    f_product: tuple[float, ...]
    max_deviation: float
    verdict: str
    skipped: int = 0
    cofactor_max_deviation: Optional[float] = None
    tolerance: float = ROBERTSON_TOL

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


def sample_points(system: CoordinateSystem, samples: int, seed: int) -> np.ndarray:
    """Uniform points in the 10%-90% sub-box (numpy PCG64 seeded with `seed`)."""
    rng = np.random.default_rng(seed)
    lo = np.array([a + 0.1 * (b - a) for a, b in system.domain])
    hi = np.array([a + 0.9 * (b - a) for a, b in system.domain])
    return rng.uniform(lo, hi, size=(samples, 3))


def robertson_check(system: CoordinateSystem, samples: int = 100, seed: int = 0) -> RobertsonReport:
    """Compare h1 h2 h3 / S with f1 f2 f3 at seeded interior points."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not system.has_staeckel_data:
        raise MissingStaeckelData(f"system {system.name!r} has no f_n / Staeckel matrix data")
    points, lhs, rhs, devs, cof_devs = [], [], [], [], []
    skipped = 0
    for p in sample_points(system, samples, seed):
        p = tuple(float(v) for v in p)
        try:
            h = scale_factors(system, p)
            m = staeckel_values(system.phi, p)
            S = determinant3(m)
            if S == 0:
                raise UndefinedEntry("vanishing Staeckel determinant")
            fprod = system.f[0](p[0]) * system.f[1](p[1]) * system.f[2](p[2])
        except (DegeneratePoint, UndefinedEntry, ZeroDivisionError, ValueError):
            skipped += 1
            continue
        ratio = h[0] * h[1] * h[2] / S
        points.append(p)
        lhs.append(ratio)
        rhs.append(fprod)
        devs.append(abs(ratio - fprod) / max(abs(fprod), abs(ratio), 1e-300))
        # Staeckel's own requirement M_n1 / S = 1 / h_n^2, reported for reference
        M = cofactors_first_column(m)
        cof_devs.append(max(abs(M[n] / S * h[n] ** 2 - 1.0) for n in range(3)))
    if not points:
        raise LadderkitError(f"{system.name}: no valid interior sample points")
    max_dev = max(devs)
    return RobertsonReport(
        system=system.name,
        points=tuple(points),
        h_over_s=tuple(lhs),
        f_product=tuple(rhs),
        max_deviation=max_dev,
        verdict="holds" if max_dev < ROBERTSON_TOL else "violated",
        skipped=skipped,
        cofactor_max_deviation=max(cof_devs),
    )


# --- separated equations ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SeparatedEquation:
    """(1/f) d/dxi (f dX/dxi) + [sum_{n != m} k_n^2 Phi_mn - v] X = -k_m^2 Phi_mm X.

    `q` is the bracket and `weight` is Phi_mm, so the equation reads
    H X = -k_m^2 weight X with H = D^2 + (f'/f) D + q.  For the spherical
    radial axis (weight 1, k_1^2 = eps) this is the H X = -eps X convention.
    """

    system: str
    axis: int
    f: SymbolicFunction
    phi_row: tuple[Optional[SymbolicFunction], Optional[SymbolicFunction], Optional[SymbolicFunction]]
    potential: SymbolicFunction
    constants: tuple[Coefficient, Coefficient, Coefficient]
    index_symbol: Optional[str] = "l"
    convention: str = "H X = -k_m^2 Phi_mm X"

    @property
    def m(self) -> int:
        return self.axis - 1

    @property
    def q(self) -> SymbolicFunction:
        total = -self.potential
        for n in range(3):
            if n == self.m:
                continue
            k2 = self.constants[n]
            if k2.is_zero():
                continue
            phi = self.phi_row[n]
            if phi is None:
                raise NotRepresentable(f"Phi[{self.axis}][{n + 1}] of {self.system} is not in the power basis")
            total = total + phi * k2
        return total

    @property
    def weight(self) -> SymbolicFunction:
        phi = self.phi_row[self.m]
        if phi is None:
            raise NotRepresentable(f"Phi[{self.axis}][{self.axis}] of {self.system} is not in the power basis")
        return phi

    @property
    def eigen_constant(self) -> Coefficient:
        return self.constants[self.m]

    @property
    def log_derivative(self) -> SymbolicFunction:
        """f'/f; requires f to be a single power term."""
        return self.f.derivative().divide(self.f)

    def operator(self) -> DiffOperator:
        one = SymbolicFunction.constant(1)
        return DiffOperator.from_coefficients([self.q, self.log_derivative, one])

    def shifted(self, delta: int) -> "SeparatedEquation":
        """Same equation with the index symbol moved by delta (l -> l + delta)."""
        if self.index_symbol is None:
            return self
        name = self.index_symbol
        return SeparatedEquation(
            self.system,
            self.axis,
            self.f,
            tuple(None if p is None else p.shift(name, delta) for p in self.phi_row),
            self.potential.shift(name, delta),
            tuple(c.shift(name, delta) for c in self.constants),
            self.index_symbol,
            self.convention,
        )

    def lhs_numeric(self, X: float, dX: float, d2X: float, xi: float, bindings) -> float:
        """Direct float assembly of the left side, term by term, for cross-checks."""
        f = self.f.numeric(bindings)
        df = self.f.derivative().numeric(bindings)
        out = d2X + float(df(xi)) / float(f(xi)) * dX
        for n in range(3):
            if n == self.m or self.constants[n].is_zero():
                continue
            out += float(self.constants[n].substitute(bindings)) * float(self.phi_row[n].numeric(bindings)(xi)) * X
        out -= float(self.potential.numeric(bindings)(xi)) * X
        return out

    def describe(self) -> str:
        return f"[{self.operator()}] X = -({self.eigen_constant})*({self.weight}) X"


def parse_potential(text: str, system: CoordinateSystem, axis: int, symbols: SymbolTable | None = None) -> SymbolicFunction:
    """Parse a potential written in the axis coordinate name or in 'x'."""
    symbols = symbols or CONSTANT_SYMBOLS
    own = system.coords[axis - 1]
    others = [c for i, c in enumerate(system.coords) if i != axis - 1 and c != "x"]
    for name in others:
        if name != own and re.search(rf"\b{re.escape(name)}\b", text):
            raise LadderkitError(
                f"potential {text!r} depends on coordinate {name!r}, not on axis {axis} ({own})"
            )
    if own != "x":
        text = re.sub(rf"\b{re.escape(own)}\b", "x", text)
    return parse_expr(text, symbols)


def assemble_separated_equation(
    system: CoordinateSystem,
    axis: int,
    potential: SymbolicFunction,
    constants: Sequence[Coefficient] | None = None,
    index_symbol: Optional[str] = "l",
) -> SeparatedEquation:
    if axis not in (1, 2, 3):
        raise ValueError("axis must be 1, 2 or 3")
    if not system.has_staeckel_data:
        raise MissingStaeckelData(f"system {system.name!r} has no Staeckel data")
    if constants is None:
        if system.constants is None:
            raise LadderkitError(f"system {system.name!r} has no default separation constants")
        constants = system.constants
    constants = tuple(Coefficient.coerce(c) for c in constants)
    if len(constants) != 3:
        raise ValueError("three separation constants are required")
    f = system.f_symbolic[axis - 1]
    if f is None:
        raise NotRepresentable(f"f_{axis} of {system.name} is not in the power basis")
    eq = SeparatedEquation(
        system=system.name,
        axis=axis,
        f=f,
        phi_row=tuple(system.phi_symbolic[axis - 1]),
        potential=potential,
        constants=constants,
        index_symbol=index_symbol,
    )
    # touch the symbolic pieces now so representability errors surface here
    eq.q
    eq.weight
    eq.log_derivative
    return eq

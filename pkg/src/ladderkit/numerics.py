"""Grids, quadrature, residuals, a shooting-method eigenvalue oracle and the
Liouville normal form.

Convention throughout: a separated equation is written H X = -lambda X with
H = D^2 + (f'/f) D + q (weight Phi_mm), so the hydrogen ground state with
K = 2 has lambda = -1 and the s = 1 oscillator ground state has lambda = 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from numba import njit
from scipy import integrate
from scipy.interpolate import CubicSpline

from ladderkit.errors import NoSignChange, NumericsError, StiffnessError
from ladderkit.staeckel.core import SeparatedEquation
from ladderkit.states import ExpPolyState, apply_operator

DEFAULT_R_MIN = 1e-6
DEFAULT_POINTS = 4096
DEFAULT_EXTENT = 40.0
EDGE_EXCLUDE = 2


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    N: int = DEFAULT_POINTS
    spacing: str = "geometric"

    def __post_init__(self):
        if not (self.r_min > 0 and self.r_max > self.r_min):
            raise ValueError(f"need 0 < r_min < r_max, got {self.r_min}, {self.r_max}")
        if self.N < 16:
            raise ValueError("a grid needs at least 16 points")
        if self.spacing not in ("geometric", "uniform"):
            raise ValueError(f"unknown spacing rule {self.spacing!r}")

    @classmethod
    def for_scale(cls, scale: float, N: int = DEFAULT_POINTS) -> "RadialGrid":
        return cls(DEFAULT_R_MIN, DEFAULT_EXTENT * scale, N, "geometric")

    @property
    def points(self) -> np.ndarray:
        if self.spacing == "uniform":
            return np.linspace(self.r_min, self.r_max, self.N)
        return np.geomspace(self.r_min, self.r_max, self.N)

    @property
    def ratio(self) -> float:
        return (self.r_max / self.r_min) ** (1.0 / (self.N - 1))

    @property
    def log_step(self) -> float:
        return math.log(self.r_max / self.r_min) / (self.N - 1)

    def refined(self) -> "RadialGrid":
        """Half the spacing (2N - 1 points, old points retained)."""
        return RadialGrid(self.r_min, self.r_max, 2 * self.N - 1, self.spacing)


# --- quadrature ----------------------------------------------------------------


def integrate_samples(values, grid: RadialGrid) -> float:
    """Composite Simpson estimate of the integral of `values` over r.

    On a geometric grid the integral is taken in t = ln r (dr = r dt), where
    the points are equally spaced.
    """
    y = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(y)):
        raise NumericsError("non-finite samples in quadrature")
    r = grid.points
    if grid.spacing == "geometric":
        return float(integrate.simpson(y * r, dx=grid.log_step))
    return float(integrate.simpson(y, x=r))


def quadrature_norm(samples, grid: RadialGrid, w: int = 2) -> float:
    """Integral of X^2 r^w dr."""
    if w not in (0, 2):
        raise ValueError("weight exponent must be 0 or 2")
    x = np.asarray(samples, dtype=float)
    if not np.all(np.isfinite(x)):
        raise NumericsError("non-finite samples")
    return integrate_samples(x * x * grid.points ** w, grid)


def overlap(a, b, grid: RadialGrid, tol: float = 1e-6) -> float:
    """Integral of a b r^2 dr for inputs normalized under the same quadrature."""
    for name, v in (("a", a), ("b", b)):
        nv = quadrature_norm(v, grid)
        if abs(nv - 1.0) > tol:
            raise NumericsError(f"{name} is not normalized (norm^2 = {nv})")
    return integrate_samples(np.asarray(a, float) * np.asarray(b, float) * grid.points ** 2, grid)


def analytic_norm_squared(state: ExpPolyState) -> float:
    """Closed form of the integral of X^2 r^2 over (0, inf) (unit scale).

    exp(2 beta r) moments give k!/(-2 beta)^(k+1); exp(2 gamma r^2) moments
    give Gamma((k+1)/2) / (2 (-2 gamma)^((k+1)/2)).  Mixed exponents fall
    back to adaptive quadrature.
    """
    if state.is_zero():
        return 0.0
    if not state.is_normalizable():
        raise NumericsError(f"state {state} is not normalizable")
    P = state.poly
    sq = [Fraction(0)] * (2 * len(P) - 1)
    for i, a in enumerate(P):
        for j, b in enumerate(P):
            sq[i + j] += a * b
    shift = 2 * state.alpha + 2
    if state.gamma == 0:
        lam = -2 * state.beta
        total = sum(c * math.factorial(k + shift) / lam ** (k + shift + 1) for k, c in enumerate(sq))
        return float(total)
    if state.beta == 0:
        g = float(-2 * state.gamma)
        return float(
            sum(float(c) * math.gamma((k + shift + 1) / 2) / (2 * g ** ((k + shift + 1) / 2)) for k, c in enumerate(sq))
        )
    val, _ = integrate.quad(lambda r: float(state.evaluate(r, normalized=False)) ** 2 * r * r, 0, np.inf, limit=400)
    return float(val)


def normalize_exact(state: ExpPolyState) -> ExpPolyState:
    return state.with_scale(1.0 / math.sqrt(analytic_norm_squared(state)))


def normalize_on_grid(state: ExpPolyState, grid: RadialGrid) -> ExpPolyState:
    n2 = quadrature_norm(state.evaluate(grid.points, normalized=False), grid)
    if n2 <= 0:
        raise NumericsError("cannot normalize the zero state")
    return state.with_scale(1.0 / math.sqrt(n2))


# --- residuals -----------------------------------------------------------------


def _specialize(eq: SeparatedEquation, l: int, bindings: Mapping | None):
    b = dict(bindings or {})
    if eq.index_symbol:
        b[eq.index_symbol] = l
    return b


def hamiltonian_residual(
    state: ExpPolyState, lam, eq: SeparatedEquation, grid: RadialGrid, bindings: Mapping | None = None
) -> float:
    """max |H X + lambda w X| / max |lambda w X| over the grid (two points nearest r_min excluded).

    H X is formed exactly from symbolic derivatives and only then evaluated.
    For lambda = 0 the absolute residual max |H X| is returned.
    """
    b = _specialize(eq, state.l, bindings)
    H = eq.operator().substitute(b)
    HX = apply_operator(H, state)
    r = grid.points[EDGE_EXCLUDE:]
    weight = eq.weight.substitute(b).numeric()(r)
    hx = HX.evaluate(r, normalized=False)
    lx = float(lam) * weight * state.evaluate(r, normalized=False)
    scale = float(np.max(np.abs(lx)))
    diff = float(np.max(np.abs(hx + lx)))
    return diff if scale == 0.0 else diff / scale


def rayleigh_quotient(
    state: ExpPolyState, eq: SeparatedEquation, grid: RadialGrid, bindings: Mapping | None = None
) -> float:
    """lambda from the integrated-by-parts form [int f X'^2 - int f q X^2] / int f w X^2."""
    b = _specialize(eq, state.l, bindings)
    r = grid.points
    f = eq.f.substitute(b).numeric()(r)
    q = eq.q.substitute(b).numeric()(r)
    w = eq.weight.substitute(b).numeric()(r)
    X = state.evaluate(r, normalized=False)
    dX = state.derivative().evaluate(r, normalized=False)
    num = integrate_samples(f * dX * dX, grid) - integrate_samples(f * q * X * X, grid)
    den = integrate_samples(f * w * X * X, grid)
    return num / den


def operator_norm_ratio(op, state: ExpPolyState, grid: RadialGrid) -> float:
    """||op X|| / ||X|| under the r^2 measure, with op X formed exactly."""
    Y = apply_operator(op, state)
    r = grid.points
    nx = quadrature_norm(state.evaluate(r, normalized=False), grid)
    ny = quadrature_norm(Y.evaluate(r, normalized=False), grid)
    return math.sqrt(ny / nx)


# --- shooting oracle -----------------------------------------------------------


@njit(cache=True)
def _rk4_log(c1, c0, cw, lam, t_step, y0, dy0, start, stop, m):
    """RK4 for X_tt = c1 X_t + (c0 + lam cw) X on a uniform t lattice.

    Coefficient arrays are sampled at half substeps: grid interval k with m
    substeps uses indices 2 m k .. 2 m (k + 1).  Integrates from grid index
    `start` to `stop` (either direction) and returns X, X_t at every grid point.
    """
    n = c1.shape[0] // (2 * m) + 1
    X = np.zeros(n)
    Xt = np.zeros(n)
    direction = 1 if stop >= start else -1
    h = direction * t_step / m
    x = y0
    v = dy0
    X[start] = x
    Xt[start] = v
    k = start
    while k != stop:
        base = 2 * m * k
        for j in range(m):
            i0 = base + direction * 2 * j
            i1 = i0 + direction
            i2 = i0 + 2 * direction
            a0 = c1[i0]
            b0 = c0[i0] + lam * cw[i0]
            a1 = c1[i1]
            b1 = c0[i1] + lam * cw[i1]
            a2 = c1[i2]
            b2 = c0[i2] + lam * cw[i2]
            k1x = v
            k1v = a0 * v + b0 * x
            k2x = v + 0.5 * h * k1v
            k2v = a1 * k2x + b1 * (x + 0.5 * h * k1x)
            k3x = v + 0.5 * h * k2v
            k3v = a1 * k3x + b1 * (x + 0.5 * h * k2x)
            k4x = v + h * k3v
            k4v = a2 * k4x + b2 * (x + h * k3x)
            x = x + h * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
            v = v + h * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        k += direction
        X[k] = x
        Xt[k] = v
    return X, Xt


@dataclass(frozen=True)
class OracleSolution:
    r: np.ndarray
    samples: np.ndarray
    eigenvalue: float
    substeps: int
    matching_radius: float
    cutoff_radius: float
    nodes: int
    meta: dict = field(default_factory=dict)


class _ShootingProblem:
    """X'' + a X' + (q + lam w) X = 0 rewritten in t = ln r."""

    def __init__(self, eq: SeparatedEquation, l: int, grid: RadialGrid, bindings: Mapping | None):
        if grid.spacing != "geometric":
            raise ValueError("the shooting oracle integrates in ln r and needs a geometric grid")
        b = _specialize(eq, l, bindings)
        self.l = l
        self.grid = grid
        self.r = grid.points
        self.a = eq.log_derivative.substitute(b).numeric()
        self.q = eq.q.substitute(b).numeric()
        self.w = eq.weight.substitute(b).numeric()

    def coefficients(self, m: int):
        t = np.linspace(math.log(self.grid.r_min), math.log(self.grid.r_max), 2 * m * (self.grid.N - 1) + 1)
        r = np.exp(t)
        c1 = 1.0 - r * self.a(r)
        c0 = -r * r * self.q(r)
        cw = -r * r * self.w(r)
        return np.ascontiguousarray(c1), np.ascontiguousarray(c0), np.ascontiguousarray(cw)

    def classical_edges(self, lam: float) -> tuple[int, int]:
        """(matching index, cutoff index) for a trial lambda.

        Matching happens at the outermost classically allowed point; the
        inward start sits where the WKB decay exponent from there reaches 40.
        """
        r = self.r
        k2 = self.q(r) + lam * self.w(r)
        allowed = np.nonzero(k2 > 0)[0]
        N = len(r)
        if len(allowed) == 0:
            match = N // 2
        else:
            match = int(allowed[-1])
        match = min(max(match, 8), N - 9)
        kappa = np.sqrt(np.maximum(-k2[match:], 0.0))
        decay = integrate.cumulative_trapezoid(kappa, r[match:], initial=0.0)
        beyond = np.nonzero(decay > 40.0)[0]
        cutoff = match + int(beyond[0]) if len(beyond) else N - 1
        cutoff = max(cutoff, match + 4)
        return match, min(cutoff, N - 1)

    def solve(self, lam: float, coeffs, m: int, match: int, cutoff: int):
        c1, c0, cw = coeffs
        r0 = self.r[0]
        Xo, Xto = _rk4_log(c1, c0, cw, lam, self.grid.log_step, r0 ** self.l, self.l * r0 ** self.l, 0, match, m)
        Xi, Xti = _rk4_log(c1, c0, cw, lam, self.grid.log_step, 0.0, -1e-20, cutoff, match, m)
        return Xo, Xto, Xi, Xti

    def mismatch(self, lam: float, coeffs, m: int, match: int, cutoff: int) -> float:
        Xo, Xto, Xi, Xti = self.solve(lam, coeffs, m, match, cutoff)
        a, at, b, bt = Xo[match], Xto[match], Xi[match], Xti[match]
        norm = math.hypot(a, at) * math.hypot(b, bt)
        return (at * b - a * bt) / norm if norm > 0 else 0.0


def _bisect(fn, lo: float, hi: float, flo: float, fhi: float, rtol: float = 1e-14) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * max(1.0, abs(mid)):
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def shooting_oracle(
    eq: SeparatedEquation,
    l: int,
    window: Sequence[float],
    grid: RadialGrid,
    bindings: Mapping | None = None,
    rtol: float = 1e-11,
    max_substeps: int = 64,
) -> OracleSolution:
    """Eigenvalue and eigenfunction in `window` by two-sided RK4 shooting.

    Outward integration starts from X = r^l at r_min, inward integration from
    X = 0 deep in the forbidden region; lambda is bisected on the sign of the
    normalized Wronskian at the outer classical turning point.  The substep
    count is doubled from 4 until two successive eigenvalues agree to `rtol`.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    prob = _ShootingProblem(eq, l, grid, bindings)
    match, cutoff = prob.classical_edges(0.5 * (lo + hi))

    previous = None
    m = 4
    while m <= max_substeps:
        coeffs = prob.coefficients(m)

        def fn(lam, coeffs=coeffs, m=m):
            return prob.mismatch(lam, coeffs, m, match, cutoff)

        flo, fhi = fn(lo), fn(hi)
        if flo == 0.0:
            lam = lo
        elif fhi == 0.0:
            lam = hi
        elif (flo < 0) == (fhi < 0):
            raise NoSignChange(f"no sign change of the matching condition in [{lo}, {hi}] (l={l})")
        else:
            lam = _bisect(fn, lo, hi, flo, fhi)
        if previous is not None and abs(lam - previous) <= rtol * max(1.0, abs(lam)):
            break
        previous = lam
        m *= 2
    else:
        raise StiffnessError(f"eigenvalue did not settle under step halving up to {max_substeps} substeps")

    Xo, Xto, Xi, Xti = prob.solve(lam, coeffs, m, match, cutoff)
    a, at, b, bt = Xo[match], Xto[match], Xi[match], Xti[match]
    s = (a * b + at * bt) / (b * b + bt * bt)
    X = np.zeros(grid.N)
    X[: match + 1] = Xo[: match + 1]
    X[match:cutoff + 1] = s * Xi[match:cutoff + 1]
    n2 = quadrature_norm(X, grid)
    X = X / math.sqrt(n2)
    imax = int(np.argmax(np.abs(X)))
    if X[imax] < 0:
        X = -X
    nodes = count_sign_changes(X, grid)
    return OracleSolution(
        r=grid.points,
        samples=X,
        eigenvalue=lam,
        substeps=m,
        matching_radius=float(grid.points[match]),
        cutoff_radius=float(grid.points[cutoff]),
        nodes=nodes,
        meta={"window": (lo, hi), "l": l, "log_step": grid.log_step / m},
    )


def count_sign_changes(samples, grid: RadialGrid, rel_floor: float = 1e-8) -> int:
    """Sign changes among samples above a small relative floor (tail noise ignored)."""
    x = np.asarray(samples, dtype=float)
    big = np.abs(x) > rel_floor * np.max(np.abs(x))
    s = np.sign(x[big])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def bracket_eigenvalues(
    eq: SeparatedEquation,
    l: int,
    lo: float,
    hi: float,
    grid: RadialGrid,
    bindings: Mapping | None = None,
    samples: int = 400,
) -> list[tuple[float, float]]:
    """Windows in [lo, hi] over which the matching condition changes sign once.

    The matching point depends on the trial value, so each candidate window
    is re-checked with its own midpoint geometry.
    """
    prob = _ShootingProblem(eq, l, grid, bindings)
    coeffs = prob.coefficients(4)
    lams = np.linspace(lo, hi, samples + 1)
    out = []
    for a, b in zip(lams[:-1], lams[1:]):
        match, cutoff = prob.classical_edges(0.5 * (a + b))
        fa = prob.mismatch(a, coeffs, 4, match, cutoff)
        fb = prob.mismatch(b, coeffs, 4, match, cutoff)
        if (fa < 0) != (fb < 0):
            out.append((float(a), float(b)))
    return out


# --- Liouville normal form -----------------------------------------------------


@dataclass(frozen=True)
class NormalFormResult:
    theta: np.ndarray
    x: np.ndarray
    y: np.ndarray
    r_of_x: np.ndarray
    residual: np.ndarray
    max_residual: float
    exponent: Fraction
    flagged: bool


def _d1_d2(v: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Fourth-order central first and second differences on a uniform lattice (interior only)."""
    d1 = np.full_like(v, np.nan)
    d2 = np.full_like(v, np.nan)
    d1[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    d2[2:-2] = (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * h * h)
    return d1, d2


def _second_derivative_x(v: np.ndarray, x: np.ndarray, h: float):
    """d^2 v / dx^2 through the lattice parameter s: (v_ss - v_x x_ss) / x_s^2."""
    vs, vss = _d1_d2(v, h)
    xs, xss = _d1_d2(x, h)
    vx = vs / xs
    return (vss - vx * xss) / (xs * xs)


def liouville_normal_form(
    p: Callable,
    rho: Callable,
    psi,
    grid: RadialGrid,
    exponent=Fraction(1, 4),
    q: Optional[Callable] = None,
    lam: float = 0.0,
) -> NormalFormResult:
    """Transform (p psi')' + q psi + lam rho psi = 0 into y'' + r(x) y + lam y = 0.

    x = integral of (rho/p)^(1/2) d theta, y = (p rho)^e psi and
    r(x) = q/rho - m''(x)/m with m = (p rho)^e.  Only e = 1/4 removes the
    first-derivative term; other exponents leave an O(1) residual, which is
    reported (and flagged) rather than hidden.
    """
    e = Fraction(exponent)
    if e not in (Fraction(1, 4), Fraction(1, 2)):
        raise ValueError("amplitude exponent must be 1/4 or 1/2")
    theta = grid.points
    pv = np.broadcast_to(np.asarray(p(theta), dtype=float), theta.shape).astype(float)
    rv = np.broadcast_to(np.asarray(rho(theta), dtype=float), theta.shape).astype(float)
    if np.any(pv <= 0) or np.any(rv <= 0):
        raise NumericsError("p and rho must be positive on the grid")
    qv = np.zeros_like(theta) if q is None else np.broadcast_to(np.asarray(q(theta), dtype=float), theta.shape)
    psi = np.asarray(psi, dtype=float)

    # integrate in the lattice parameter so x is accurate on either spacing rule
    if grid.spacing == "geometric":
        s = np.log(theta)
        jac = theta
    else:
        s = theta
        jac = np.ones_like(theta)
    h = s[1] - s[0]
    speed = np.sqrt(rv / pv) * jac
    # a spline antiderivative keeps the quadrature error smooth, so the later
    # finite differences in x do not amplify a point-to-point pattern
    x = theta[0] * math.sqrt(rv[0] / pv[0]) + CubicSpline(s, speed).antiderivative()(s)
    if np.any(np.diff(x) <= 0):
        raise NumericsError("transformed abscissa is not strictly increasing")

    mfac = (pv * rv) ** float(e)
    y = mfac * psi
    m_xx = _second_derivative_x(mfac, x, h)
    r_of_x = qv / rv - m_xx / mfac
    y_xx = _second_derivative_x(y, x, h)
    residual = y_xx + (r_of_x + lam) * y
    interior = slice(EDGE_EXCLUDE + 2, -(EDGE_EXCLUDE + 2))
    scale = float(np.max(np.abs(lam * y[interior]))) if lam else float(np.max(np.abs(y[interior])))
    max_res = float(np.max(np.abs(residual[interior]))) / scale
    return NormalFormResult(
        theta=theta,
        x=x,
        y=y,
        r_of_x=r_of_x,
        residual=residual,
        max_residual=max_res,
        exponent=e,
        flagged=e != Fraction(1, 4),
    )

"""Orthogonal coordinate systems and the built-in catalog.

Row m of a Staeckel matrix belongs to the separated equation of axis m, so
every entry Phi[m][n] is a function of the m-th coordinate only; numeric
evaluators therefore take a single scalar argument.

Four systems carry complete separation data (transform, f_n, Staeckel
matrix): rectangular, circular-cylindrical, spherical and parabolic.  The
spherical system uses u = cos(theta) as its second coordinate.  Seven more
ship with transforms only and accept Staeckel data from a config file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Optional, Sequence

import numpy as np

from ladderkit.symexpr import Coefficient, SymbolicFunction, SymbolTable, parse_expr

ScalarFn = Callable[[float], float]
Transform = Callable[[float, float, float], tuple[float, float, float]]
Jacobian = Callable[[float, float, float], np.ndarray]

# names used by catalog separation constants
CONSTANT_SYMBOLS = SymbolTable(("l", "K", "s", "eps", "m", "k2", "k3"))


def _coef(text: str) -> Coefficient:
    f = parse_expr(text, CONSTANT_SYMBOLS)
    return f.coefficient(0) if not f.is_zero() else Coefficient(0)


def _sym(text: str) -> SymbolicFunction:
    return parse_expr(text)


@dataclass(frozen=True)
class CoordinateSystem:
    name: str
    coords: tuple[str, str, str]
    transform: Transform
    domain: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    jacobian: Optional[Jacobian] = None
    f: Optional[tuple[ScalarFn, ScalarFn, ScalarFn]] = None
    f_symbolic: tuple[Optional[SymbolicFunction], ...] = (None, None, None)
    phi: Optional[tuple[tuple[ScalarFn, ...], ...]] = None
    phi_symbolic: tuple[tuple[Optional[SymbolicFunction], ...], ...] = ((None,) * 3,) * 3
    constants: Optional[tuple[Coefficient, Coefficient, Coefficient]] = None
    description: str = ""
    user_defined: bool = False

    @property
    def has_staeckel_data(self) -> bool:
        return self.f is not None and self.phi is not None

    def inside(self, point: Sequence[float]) -> bool:
        return all(lo < float(x) < hi for x, (lo, hi) in zip(point, self.domain))


class Catalog(Mapping[str, CoordinateSystem]):
    """Immutable name -> system map; extension returns a new catalog."""

    def __init__(self, systems: Mapping[str, CoordinateSystem] | Sequence[CoordinateSystem] = ()):
        if isinstance(systems, Mapping):
            self._systems = dict(systems)
        else:
            self._systems = {s.name: s for s in systems}

    def __getitem__(self, name: str) -> CoordinateSystem:
        return self._systems[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._systems)

    def __len__(self) -> int:
        return len(self._systems)

    def extended(self, systems: Sequence[CoordinateSystem]) -> "Catalog":
        d = dict(self._systems)
        for s in systems:
            d[s.name] = s
        return Catalog(d)


# --- fully specified systems ------------------------------------------------


def _rect_transform(x, y, z):
    return (x, y, z)


def _rect_jac(x, y, z):
    return np.eye(3)


def _cyl_transform(rho, phi, z):
    return (rho * math.cos(phi), rho * math.sin(phi), z)


def _cyl_jac(rho, phi, z):
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -rho * s, 0.0], [s, rho * c, 0.0], [0.0, 0.0, 1.0]])


def _sph_u_transform(r, u, phi):
    w = math.sqrt(1.0 - u * u)
    return (r * w * math.cos(phi), r * w * math.sin(phi), r * u)


def _sph_u_jac(r, u, phi):
    w = math.sqrt(1.0 - u * u)
    c, s = math.cos(phi), math.sin(phi)
    return np.array(
        [
            [w * c, -r * u / w * c, -r * w * s],
            [w * s, -r * u / w * s, r * w * c],
            [u, r, 0.0],
        ]
    )


def _sph_transform(r, theta, phi):
    st = math.sin(theta)
    return (r * st * math.cos(phi), r * st * math.sin(phi), r * math.cos(theta))


def _sph_jac(r, theta, phi):
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    return np.array(
        [
            [st * cp, r * ct * cp, -r * st * sp],
            [st * sp, r * ct * sp, r * st * cp],
            [ct, -r * st, 0.0],
        ]
    )


def _sph_uw_transform(r, u, w):
    a = math.sqrt(1.0 - u * u)
    b = math.sqrt(1.0 - w * w)
    return (r * a * w, r * a * b, r * u)


def _sph_uw_jac(r, u, w):
    a = math.sqrt(1.0 - u * u)
    b = math.sqrt(1.0 - w * w)
    return np.array(
        [
            [a * w, -r * u / a * w, r * a],
            [a * b, -r * u / a * b, -r * a * w / b],
            [u, r, 0.0],
        ]
    )


def _parabolic_transform(mu, nu, phi):
    return (mu * nu * math.cos(phi), mu * nu * math.sin(phi), 0.5 * (mu * mu - nu * nu))


def _parabolic_jac(mu, nu, phi):
    c, s = math.cos(phi), math.sin(phi)
    return np.array(
        [
            [nu * c, mu * c, -mu * nu * s],
            [nu * s, mu * s, mu * nu * c],
            [mu, -nu, 0.0],
        ]
    )


def _const(v: float) -> ScalarFn:
    return lambda _t: v


def _zero_sym() -> SymbolicFunction:
    return SymbolicFunction.zero()


TWO_PI = 2.0 * math.pi

RECTANGULAR = CoordinateSystem(
    name="rectangular",
    coords=("x", "y", "z"),
    transform=_rect_transform,
    jacobian=_rect_jac,
    domain=((-10.0, 10.0),) * 3,
    f=(_const(1.0),) * 3,
    f_symbolic=(_sym("1"),) * 3,
    phi=(
        (_const(1.0), _const(-1.0), _const(-1.0)),
        (_const(0.0), _const(1.0), _const(0.0)),
        (_const(0.0), _const(0.0), _const(1.0)),
    ),
    phi_symbolic=(
        (_sym("1"), _sym("-1"), _sym("-1")),
        (_zero_sym(), _sym("1"), _zero_sym()),
        (_zero_sym(), _zero_sym(), _sym("1")),
    ),
    constants=(_coef("eps"), _coef("k2"), _coef("k3")),
    description="Cartesian coordinates; X'' + (eps - k2 - k3) X = 0 etc.",
)

CIRCULAR_CYLINDRICAL = CoordinateSystem(
    name="circular-cylindrical",
    coords=("rho", "phi", "z"),
    transform=_cyl_transform,
    jacobian=_cyl_jac,
    domain=((0.0, 10.0), (0.0, TWO_PI), (-10.0, 10.0)),
    f=(lambda rho: rho, _const(1.0), _const(1.0)),
    f_symbolic=(_sym("x"), _sym("1"), _sym("1")),
    phi=(
        (_const(1.0), lambda rho: -1.0 / (rho * rho), _const(-1.0)),
        (_const(0.0), _const(1.0), _const(0.0)),
        (_const(0.0), _const(0.0), _const(1.0)),
    ),
    phi_symbolic=(
        (_sym("1"), _sym("-x^-2"), _sym("-1")),
        (_zero_sym(), _sym("1"), _zero_sym()),
        (_zero_sym(), _zero_sym(), _sym("1")),
    ),
    constants=(_coef("eps"), _coef("m^2"), _coef("k3")),
    description="(rho, phi, z); constants (eps, m^2, k_z^2).",
)

SPHERICAL = CoordinateSystem(
    name="spherical",
    coords=("r", "u", "phi"),
    transform=_sph_u_transform,
    jacobian=_sph_u_jac,
    domain=((0.0, 10.0), (-1.0, 1.0), (0.0, TWO_PI)),
    f=(lambda r: r * r, lambda u: 1.0 - u * u, _const(1.0)),
    f_symbolic=(_sym("x^2"), _sym("1 - x^2"), _sym("1")),
    phi=(
        (_const(1.0), lambda r: 1.0 / (r * r), _const(0.0)),
        (_const(0.0), lambda u: -1.0 / (1.0 - u * u), lambda u: 1.0 / (1.0 - u * u) ** 2),
        (_const(0.0), _const(0.0), _const(-1.0)),
    ),
    phi_symbolic=(
        (_sym("1"), _sym("x^-2"), _zero_sym()),
        (_zero_sym(), None, None),
        (_zero_sym(), _zero_sym(), _sym("-1")),
    ),
    constants=(_coef("eps"), _coef("-l*(l+1)"), _coef("-m^2")),
    description="(r, u=cos(theta), phi); constants (eps, -l(l+1), -m^2); S = 1/(1-u^2).",
)

PARABOLIC = CoordinateSystem(
    name="parabolic",
    coords=("mu", "nu", "phi"),
    transform=_parabolic_transform,
    jacobian=_parabolic_jac,
    domain=((0.0, 5.0), (0.0, 5.0), (0.0, TWO_PI)),
    f=(lambda mu: mu, lambda nu: nu, _const(1.0)),
    f_symbolic=(_sym("x"), _sym("x"), _sym("1")),
    phi=(
        (lambda mu: mu * mu, _const(-1.0), lambda mu: -1.0 / (mu * mu)),
        (lambda nu: nu * nu, _const(1.0), lambda nu: -1.0 / (nu * nu)),
        (_const(0.0), _const(0.0), _const(1.0)),
    ),
    phi_symbolic=(
        (_sym("x^2"), _sym("-1"), _sym("-x^-2")),
        (_sym("x^2"), _sym("1"), _sym("-x^-2")),
        (_zero_sym(), _zero_sym(), _sym("1")),
    ),
    constants=(_coef("eps"), _coef("k2"), _coef("m^2")),
    description="x = mu nu cos(phi), y = mu nu sin(phi), z = (mu^2 - nu^2)/2.",
)

# the printed Staeckel matrix, read with plain (r, theta, phi) arguments
SPHERICAL_PAPER = CoordinateSystem(
    name="spherical-paper",
    coords=("r", "theta", "phi"),
    transform=_sph_transform,
    jacobian=_sph_jac,
    domain=((0.0, 10.0), (0.0, math.pi), (0.0, TWO_PI)),
    f=(lambda r: r * r, lambda t: 1.0 - math.cos(t) ** 2, lambda p: math.sqrt(1.0 - math.cos(p) ** 2)),
    f_symbolic=(_sym("x^2"), None, None),
    phi=(
        (_const(1.0), lambda r: 1.0 / (r * r), _const(0.0)),
        (_const(0.0), lambda t: 1.0 / (math.cos(t) ** 2 - 1.0), lambda t: 1.0 / (math.cos(t) ** 2 - 1.0) ** 2),
        (_const(0.0), _const(0.0), lambda p: 1.0 / (math.cos(p) ** 2 - 1.0)),
    ),
    phi_symbolic=(
        (_sym("1"), _sym("x^-2"), _zero_sym()),
        (_zero_sym(), None, None),
        (_zero_sym(), _zero_sym(), None),
    ),
    constants=(_coef("eps"), _coef("-l*(l+1)"), _coef("-m^2")),
    description="literal reading: f3 = sqrt(1 - cos^2 phi) with arguments (r, theta, phi).",
)

# same printed entries, read with u = cos(theta), w = cos(phi) as coordinates
SPHERICAL_PAPER_COS = CoordinateSystem(
    name="spherical-paper-cos",
    coords=("r", "u", "w"),
    transform=_sph_uw_transform,
    jacobian=_sph_uw_jac,
    domain=((0.0, 10.0), (-1.0, 1.0), (-1.0, 1.0)),
    f=(lambda r: r * r, lambda u: 1.0 - u * u, lambda w: math.sqrt(1.0 - w * w)),
    f_symbolic=(_sym("x^2"), _sym("1 - x^2"), None),
    phi=(
        (_const(1.0), lambda r: 1.0 / (r * r), _const(0.0)),
        (_const(0.0), lambda u: 1.0 / (u * u - 1.0), lambda u: 1.0 / (u * u - 1.0) ** 2),
        (_const(0.0), _const(0.0), lambda w: 1.0 / (w * w - 1.0)),
    ),
    phi_symbolic=(
        (_sym("1"), _sym("x^-2"), _zero_sym()),
        (_zero_sym(), None, None),
        (_zero_sym(), _zero_sym(), None),
    ),
    constants=(_coef("eps"), _coef("-l*(l+1)"), _coef("-m^2")),
    description="printed entries with u = cos(theta), w = cos(phi) as the 2nd and 3rd coordinates.",
)


# --- transform-only systems -------------------------------------------------


def _elliptic_cyl(u, v, z, a=1.0):
    return (a * math.cosh(u) * math.cos(v), a * math.sinh(u) * math.sin(v), z)


def _parabolic_cyl(u, v, z):
    return (0.5 * (u * u - v * v), u * v, z)


def _prolate(mu, nu, phi, a=1.0):
    s = a * math.sinh(mu) * math.sin(nu)
    return (s * math.cos(phi), s * math.sin(phi), a * math.cosh(mu) * math.cos(nu))


def _oblate(mu, nu, phi, a=1.0):
    c = a * math.cosh(mu) * math.cos(nu)
    return (c * math.cos(phi), c * math.sin(phi), a * math.sinh(mu) * math.sin(nu))


def _conical(r, mu, nu, b=2.0, c=1.0):
    # nu^2 < c^2 < mu^2 < b^2
    x = r * mu * nu / (b * c)
    y = (r / b) * math.sqrt((mu * mu - b * b) * (nu * nu - b * b) / (b * b - c * c))
    z = (r / c) * math.sqrt((mu * mu - c * c) * (nu * nu - c * c) / (c * c - b * b))
    return (x, y, z)


def _ellipsoidal(lam, mu, nu, a=3.0, b=2.0, c=1.0):
    # -a^2 < nu < -b^2 < mu < -c^2 < lam
    a2, b2, c2 = a * a, b * b, c * c
    x2 = (a2 + lam) * (a2 + mu) * (a2 + nu) / ((a2 - b2) * (a2 - c2))
    y2 = (b2 + lam) * (b2 + mu) * (b2 + nu) / ((b2 - a2) * (b2 - c2))
    z2 = (c2 + lam) * (c2 + mu) * (c2 + nu) / ((c2 - b2) * (c2 - a2))
    return (math.sqrt(x2), math.sqrt(y2), math.sqrt(z2))


def _paraboloidal(lam, mu, nu, a=2.0, b=1.0):
    # lam < b < mu < a < nu
    x2 = 4.0 * (a - lam) * (a - mu) * (a - nu) / (b - a)
    y2 = 4.0 * (b - lam) * (b - mu) * (b - nu) / (a - b)
    return (math.sqrt(x2), math.sqrt(y2), lam + mu + nu - a - b)


TRANSFORM_ONLY = (
    CoordinateSystem("elliptic-cylindrical", ("u", "v", "z"), _elliptic_cyl,
                     ((0.0, 3.0), (0.0, TWO_PI), (-10.0, 10.0)), description="focal distance a = 1"),
    CoordinateSystem("parabolic-cylindrical", ("u", "v", "z"), _parabolic_cyl,
                     ((0.0, 5.0), (0.0, 5.0), (-10.0, 10.0))),
    CoordinateSystem("prolate-spheroidal", ("mu", "nu", "phi"), _prolate,
                     ((0.0, 3.0), (0.0, math.pi), (0.0, TWO_PI)), description="a = 1"),
    CoordinateSystem("oblate-spheroidal", ("mu", "nu", "phi"), _oblate,
                     ((0.0, 3.0), (-math.pi / 2, math.pi / 2), (0.0, TWO_PI)), description="a = 1"),
    CoordinateSystem("conical", ("r", "mu", "nu"), _conical,
                     ((0.0, 10.0), (1.0, 2.0), (0.0, 1.0)), description="b = 2, c = 1"),
    CoordinateSystem("ellipsoidal", ("lam", "mu", "nu"), _ellipsoidal,
                     ((-1.0, 10.0), (-4.0, -1.0), (-9.0, -4.0)), description="a = 3, b = 2, c = 1"),
    CoordinateSystem("paraboloidal", ("lam", "mu", "nu"), _paraboloidal,
                     ((-5.0, 1.0), (1.0, 2.0), (2.0, 8.0)), description="a = 2, b = 1"),
)

FULLY_SPECIFIED = (RECTANGULAR, CIRCULAR_CYLINDRICAL, SPHERICAL, PARABOLIC)
AUDIT_SYSTEMS = (SPHERICAL_PAPER, SPHERICAL_PAPER_COS)


def builtin_catalog() -> Catalog:
    return Catalog(FULLY_SPECIFIED + TRANSFORM_ONLY + AUDIT_SYSTEMS)

"""User-defined coordinate systems from an INI-style config file.

Grammar::

    [system <name>]
    coords      = <c1>, <c2>, <c3>
    transform.x = <numeric expr in c1, c2, c3>
    transform.y = ...
    transform.z = ...
    f.<n>       = <numeric expr in c_n (or x)>          n = 1..3
    phi.<m>.<n> = <numeric expr in c_m (or x)>          all nine or none
    domain.<n>  = <lo>, <hi>                            finite, lo < hi
    constants   = <k1^2>; <k2^2>; <k3^2>                optional, exact expressions

Numeric expressions use + - * / ^ (or **), parentheses, numbers, pi, e and
the functions sin cos tan sinh cosh tanh exp log sqrt abs.  In f and phi
entries the name ``x`` aliases the row's own coordinate; any other name is an
error, which also enforces that row m depends on xi_m alone.  Entries that
happen to be power-basis expressions also get a symbolic form.

A config may replace a built-in system of the same name; two config-defined
systems with one name are rejected.
"""

from __future__ import annotations

import ast
import configparser
import math
import re
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ladderkit.errors import ConfigError, LadderkitError
from ladderkit.staeckel.systems import CONSTANT_SYMBOLS, Catalog, CoordinateSystem, builtin_catalog
from ladderkit.symexpr import Coefficient, SymbolicFunction, parse_expr

_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
_CONSTS = {"pi": math.pi, "e": math.e}
_ALLOWED = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
)


def compile_numeric(text: str, variables: Sequence[str], line: int | None = None) -> Callable[..., float]:
    """Compile a restricted arithmetic expression into f(*variables)."""
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc.msg}", line) from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise ConfigError(f"unsupported syntax {type(node).__name__} in {text!r}", line)
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ConfigError(f"unsupported literal in {text!r}", line)
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS or node.keywords:
                raise ConfigError(f"unsupported function call in {text!r}", line)
        if isinstance(node, ast.Name) and not (
            node.id in variables or node.id in _CONSTS or node.id in _FUNCS
        ):
            raise ConfigError(f"unknown identifier {node.id!r} in {text!r}", line)
    code = compile(tree, "<config>", "eval")
    env = {"__builtins__": {}, **_FUNCS, **_CONSTS}
    names = list(variables)

    def fn(*args):
        return float(eval(code, env, dict(zip(names, args))))

    return fn


def _line_index(text: str) -> dict[tuple[str, str], int]:
    index: dict[tuple[str, str], int] = {}
    section = None
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            index[(section, "")] = i
        elif section and ("=" in s or ":" in s) and not s.startswith(("#", ";")):
            key = re.split(r"[=:]", s, maxsplit=1)[0].strip().lower()
            index.setdefault((section, key), i)
    return index


def _symbolic_or_none(text: str, own: str) -> SymbolicFunction | None:
    if own != "x":
        text = re.sub(rf"\b{re.escape(own)}\b", "x", text)
    try:
        return parse_expr(text.replace("**", "^"))
    except LadderkitError:
        return None


def _parse_system(section: str, body: configparser.SectionProxy, lines: dict) -> CoordinateSystem:
    name = section[len("system"):].strip()
    where = lambda key: lines.get((section, key), lines.get((section, "")))  # noqa: E731
    if not name:
        raise ConfigError("section needs a system name: [system <name>]", where(""))

    def need(key: str) -> str:
        if key not in body:
            raise ConfigError(f"system {name!r}: missing key {key!r}", where(""))
        return body[key]

    coords = tuple(c.strip() for c in need("coords").split(","))
    if len(coords) != 3 or len(set(coords)) != 3 or not all(c.isidentifier() for c in coords):
        raise ConfigError(f"system {name!r}: coords must be three distinct identifiers", where("coords"))

    parts = [compile_numeric(need(f"transform.{a}"), coords, where(f"transform.{a}")) for a in "xyz"]

    def transform(a, b, c):
        return tuple(p(a, b, c) for p in parts)

    domain = []
    for n in range(1, 4):
        key = f"domain.{n}"
        bits = need(key).split(",")
        if len(bits) != 2:
            raise ConfigError(f"system {name!r}: {key} needs 'lo, hi'", where(key))
        lo, hi = (compile_numeric(b.strip(), (), where(key))() for b in bits)
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ConfigError(f"system {name!r}: {key} must be a finite interval lo < hi", where(key))
        domain.append((lo, hi))

    f_keys = [f"f.{n}" for n in range(1, 4)]
    phi_keys = [f"phi.{m}.{n}" for m in range(1, 4) for n in range(1, 4)]
    f = f_sym = phi = None
    phi_sym = ((None,) * 3,) * 3
    if any(k in body for k in f_keys):
        f = tuple(compile_numeric(need(k), (coords[i], "x"), where(k)) for i, k in enumerate(f_keys))
        f = tuple(_one_arg(fn) for fn in f)
        f_sym = tuple(_symbolic_or_none(body[k], coords[i]) for i, k in enumerate(f_keys))
    present = [k in body for k in phi_keys]
    if any(present):
        if not all(present):
            missing = [k for k, p in zip(phi_keys, present) if not p]
            raise ConfigError(f"system {name!r}: incomplete Staeckel matrix, missing {missing}", where(""))
        rows, sym_rows = [], []
        for m in range(3):
            row, sym_row = [], []
            for n in range(3):
                k = f"phi.{m + 1}.{n + 1}"
                row.append(_one_arg(compile_numeric(body[k], (coords[m], "x"), where(k))))
                sym_row.append(_symbolic_or_none(body[k], coords[m]))
            rows.append(tuple(row))
            sym_rows.append(tuple(sym_row))
        phi = tuple(rows)
        phi_sym = tuple(sym_rows)
    if (f is None) != (phi is None):
        raise ConfigError(f"system {name!r}: give both f.n and phi.m.n entries, or neither", where(""))

    constants = None
    if "constants" in body:
        bits = [b.strip() for b in body["constants"].split(";")]
        if len(bits) != 3:
            raise ConfigError(f"system {name!r}: constants needs three ';'-separated entries", where("constants"))
        try:
            cs = [parse_expr(b, CONSTANT_SYMBOLS) for b in bits]
        except LadderkitError as exc:
            raise ConfigError(f"system {name!r}: {exc}", where("constants")) from None
        if not all(c.is_constant() for c in cs):
            raise ConfigError(f"system {name!r}: constants may not depend on x", where("constants"))
        constants = tuple(c.coefficient(0) if not c.is_zero() else Coefficient(0) for c in cs)

    return CoordinateSystem(
        name=name,
        coords=coords,
        transform=transform,
        domain=tuple(domain),
        f=f,
        f_symbolic=f_sym or (None, None, None),
        phi=phi,
        phi_symbolic=phi_sym,
        constants=constants,
        description=body.get("description", "user-defined"),
        user_defined=True,
    )


def _one_arg(fn):
    return lambda t: fn(t, t)


def parse_config(text: str) -> list[CoordinateSystem]:
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str.lower
    try:
        parser.read_string(text)
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate system {exc.section!r}", exc.lineno) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", exc.lineno) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("entries before the first [system <name>] header", exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", lineno) from None
    lines = _line_index(text)
    systems = []
    for section in parser.sections():
        if not section.startswith("system"):
            raise ConfigError(f"unknown section [{section}]", lines.get((section, "")))
        systems.append(_parse_system(section, parser[section], lines))
    names = [s.name for s in systems]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise ConfigError(f"duplicate system name(s) {sorted(dup)}")
    return systems


def load_config(path: str | Path, catalog: Catalog | None = None) -> Catalog:
    """Return `catalog` (default: built-ins) extended with the systems in `path`."""
    catalog = catalog if catalog is not None else builtin_catalog()
    text = Path(path).read_text(encoding="utf-8")
    systems = parse_config(text)
    for s in systems:
        if s.name in catalog and catalog[s.name].user_defined:
            raise ConfigError(f"system {s.name!r} is already defined by another config")
    return catalog.extended(systems)

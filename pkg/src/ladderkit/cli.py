"""Command-line front end.

Exit status: 0 success (flagged checks included), 1 a check or computation
failed, 2 usage or input error, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from ladderkit import __version__
from ladderkit.errors import ConfigError, LadderkitError, MissingStaeckelData, ParseError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("LADDERKIT_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"LADDERKIT_SEED must be an integer, got {raw!r}") from None


def _parse_consts(items: Sequence[str] | None) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or not name.isidentifier():
            raise UsageError(f"--const expects name=value, got {item!r}")
        try:
            out[name] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"constant {name} must be a rational number, got {value!r}") from None
    return out


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


def _catalog(config: str | None):
    from ladderkit.staeckel import builtin_catalog, load_config

    if not config:
        return builtin_catalog()
    try:
        return load_config(config)
    except OSError as exc:
        raise IOError(f"cannot read config {config}: {exc}") from exc


# --- systems -----------------------------------------------------------------


def cmd_systems(args) -> int:
    from ladderkit.staeckel import robertson_check

    cat = _catalog(args.config)
    if args.action == "list":
        for name, s in cat.items():
            data = "staeckel" if s.has_staeckel_data else "transform-only"
            origin = " (config)" if s.user_defined else ""
            print(f"{name:24s} {','.join(s.coords):14s} {data:15s}{origin} {s.description}".rstrip())
        return EXIT_OK
    if not args.name:
        raise UsageError("systems check needs a system name")
    if args.name not in cat:
        raise UsageError(f"unknown system {args.name!r}; try 'systems list'")
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    try:
        rep = robertson_check(cat[args.name], args.samples, args.seed)
    except MissingStaeckelData as exc:
        raise UsageError(str(exc)) from None
    status = "pass" if rep.holds else "flagged"
    print(f"system {rep.system}: Robertson condition {rep.verdict} [{status}]")
    print(f"  max relative deviation {rep.max_deviation:.6e} (tolerance {rep.tolerance:.0e})")
    if rep.cofactor_max_deviation is not None:
        print(f"  cofactor condition deviation {rep.cofactor_max_deviation:.6e}")
    print(f"  {len(rep.points)} points, {rep.skipped} skipped, seed {args.seed}")
    if args.json:
        payload = {
            "system": rep.system,
            "verdict": rep.verdict,
            "status": status,
            "max_deviation": f"{rep.max_deviation:.12e}",
            "cofactor_max_deviation": None
            if rep.cofactor_max_deviation is None
            else f"{rep.cofactor_max_deviation:.12e}",
            "samples": len(rep.points),
            "skipped": rep.skipped,
            "seed": args.seed,
        }
        _write_text(args.json, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


# --- factorize ---------------------------------------------------------------


def cmd_factorize(args) -> int:
    from ladderkit.factorize import factorize_equation
    from ladderkit.staeckel import assemble_separated_equation, parse_potential

    cat = _catalog(args.config)
    if args.system not in cat:
        raise UsageError(f"unknown system {args.system!r}; try 'systems list'")
    system = cat[args.system]
    bindings = _parse_consts(args.const)
    try:
        pot = parse_potential(args.potential, system, args.axis)
    except ParseError as exc:
        raise UsageError(f"potential: {exc}") from None
    eq = assemble_separated_equation(system, args.axis, pot)
    report = factorize_equation(eq, bindings)
    print(f"separated equation: {eq.describe()}")
    print(f"Gamma = {report.gamma}")
    for i, (sp, comm) in enumerate(zip(report.branches, report.commutators), start=1):
        print(f"branch {i} ({sp.branch}): R = {sp.R}; eps_engine = {sp.epsilon}; "
              f"eps_paper_form = {sp.epsilon_paper_form}; [A+, A] = {comm}")
    if report.intertwining is not None:
        rel = report.intertwining
        print(f"intertwining: {rel.relation_text()}; shift = {rel.shift}")
        print(f"ordering: {rel.ordering}")
    for flag in report.audit_flags:
        print(f"flag: {flag}")
    if args.json:
        _write_text(args.json, json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


# --- chain -------------------------------------------------------------------


def _descriptor(potential: str, consts: dict[str, Fraction]):
    from ladderkit.states import PotentialDescriptor

    if potential == "coulomb":
        K = consts.get("K")
        if K is None or K <= 0:
            raise UsageError("the Coulomb chain needs --const K=<positive>")
        return PotentialDescriptor.coulomb(K)
    if potential == "oscillator":
        s = consts.get("s")
        if s is None or s <= 0:
            raise UsageError("the oscillator chain needs --const s=<positive>")
        return PotentialDescriptor.oscillator(s)
    try:
        return PotentialDescriptor.expr(potential, consts)
    except ParseError as exc:
        raise UsageError(f"potential: {exc}") from None


def _parse_grid(text: str | None, default_r1: float) -> np.ndarray:
    if text is None:
        return np.linspace(0.0, default_r1, 401)
    bits = text.split(",")
    if len(bits) != 3:
        raise UsageError("--grid expects r0,r1,steps")
    try:
        r0, r1, steps = float(bits[0]), float(bits[1]), int(bits[2])
    except ValueError:
        raise UsageError(f"bad --grid {text!r}") from None
    if not (r0 >= 0 and r1 > r0 and steps >= 1):
        raise UsageError("--grid needs 0 <= r0 < r1 and steps >= 1")
    return np.linspace(r0, r1, steps + 1)


def chain_csv(chain, r: np.ndarray) -> str:
    from ladderkit.numerics import normalize_exact

    states = sorted(chain.states, key=lambda s: (s.n, s.l))
    cols = [normalize_exact(s).evaluate(r) for s in states]
    lines = [",".join(["r"] + [f"X_{s.n}_{s.l}" for s in states])]
    for i, x in enumerate(r):
        lines.append(",".join([f"{x:.11e}"] + [f"{c[i]:.11e}" for c in cols]))
    return "\n".join(lines) + "\n"


def cmd_chain(args) -> int:
    from ladderkit.states import generate_chain, node_count

    if args.nmax < 1:
        raise UsageError("--nmax must be >= 1")
    desc = _descriptor(args.potential, _parse_consts(args.const))
    chain = generate_chain(desc, args.nmax)
    r = _parse_grid(args.grid, 40.0 * desc.length_scale(args.nmax))
    print(f"potential {desc.text} with {', '.join(f'{k}={v}' for k, v in sorted(desc.constants.items()))}")
    print("convention: H X = -lambda X; the Hamiltonian eigenvalue is -lambda")
    for s in sorted(chain.states, key=lambda s: (s.n, s.l)):
        lam = chain.eigenvalues[(s.n, s.l)]
        print(f"X_{s.n}_{s.l}: lambda = {lam}, -lambda = {-lam}, nodes = {node_count(s)}, X ~ {s.describe()}")
    for st in chain.steps:
        print(f"step {st.source} -> {st.target}: c = 1/sqrt({st.radicand}) = {st.normalization:.12g}, "
              f"operator {st.operator}")
    if args.out:
        _write_text(args.out, chain_csv(chain, r))
    return EXIT_OK


# --- verify ------------------------------------------------------------------


def cmd_verify(args) -> int:
    from ladderkit.audit import SUITES, run_suites

    names = SUITES if args.suite == "all" else (args.suite,)
    checks = run_suites(names, args.seed)
    for c in checks:
        print(f"{c.status.upper():8s} {c.id}: {c.description}")
    if args.json:
        payload = {"checks": [c.to_json() for c in checks]}
        _write_text(args.json, json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    failed = [c.id for c in checks if c.status == "fail"]
    counts = {s: sum(1 for c in checks if c.status == s) for s in ("pass", "flagged", "fail")}
    print(f"{counts['pass']} pass, {counts['flagged']} flagged, {counts['fail']} fail")
    return EXIT_FAIL if failed else EXIT_OK


# --- normalform --------------------------------------------------------------


def cmd_normalform(args) -> int:
    from ladderkit.numerics import RadialGrid, liouville_normal_form, normalize_exact
    from ladderkit.staeckel.config import compile_numeric
    from ladderkit.states import generate_chain

    try:
        exponent = Fraction(args.exponent)
    except (ValueError, ZeroDivisionError):
        raise UsageError("--exponent must be 1/4 or 1/2") from None
    if exponent not in (Fraction(1, 4), Fraction(1, 2)):
        raise UsageError("--exponent must be 1/4 or 1/2")
    desc = _descriptor(args.potential, _parse_consts(args.const))
    if not (0 <= args.l < args.n):
        raise UsageError("need 0 <= l < n")
    chain = generate_chain(desc, args.n)
    state = normalize_exact(chain.state(args.n, args.l))
    lam = float(chain.eigenvalues[(args.n, args.l)]) if args.lam is None else float(Fraction(args.lam))

    def compile_fn(text):
        try:
            fn = compile_numeric(text, ("r", "x"))
        except ConfigError as exc:
            raise UsageError(str(exc)) from None
        return np.vectorize(lambda t: fn(t, t), otypes=[float])

    p = compile_fn(args.p)
    rho = compile_fn(args.rho)
    if args.q is not None:
        q = compile_fn(args.q)
    else:
        # q = r^2 (-v) - l(l+1), matching p = rho = r^2 for the radial equation
        v = desc.potential.numeric(desc.constants)
        l = args.l
        q = lambda t: t * t * (-v(t)) - l * (l + 1)  # noqa: E731
    grid = RadialGrid(args.r_min, 40.0 * desc.length_scale(args.n), args.points, "uniform")
    res = liouville_normal_form(p, rho, state.evaluate(grid.points), grid, exponent, q=q, lam=lam)
    status = "flagged" if res.flagged else ("pass" if res.max_residual < 1e-6 else "fail")
    print(f"state X_{args.n}_{args.l}, lambda = {lam:.12g}, exponent {exponent}")
    print(f"x range [{res.x[0]:.6e}, {res.x[-1]:.6e}], strictly increasing")
    print(f"normal-form residual {res.max_residual:.6e} [{status}]")
    if res.flagged:
        print("flag: only the exponent 1/4 removes the first-derivative term")
    return EXIT_FAIL if status == "fail" else EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ladderkit", description="Riccati ladder operators for separated equations.")
    parser.add_argument("--version", action="version", version=f"ladderkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("systems", help="list coordinate systems or check the Robertson condition")
    p.add_argument("action", choices=("list", "check"))
    p.add_argument("name", nargs="?")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config")
    p.add_argument("--json")
    p.set_defaults(func=cmd_systems)

    p = sub.add_parser("factorize", help="solve the Riccati condition of a separated equation")
    p.add_argument("--system", required=True)
    p.add_argument("--axis", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--potential", required=True)
    p.add_argument("--const", action="append", metavar="NAME=VALUE")
    p.add_argument("--config")
    p.add_argument("--json")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("chain", help="generate ladder chains and write them as CSV")
    p.add_argument("--potential", required=True, help="coulomb, oscillator, or an expression in r")
    p.add_argument("--const", action="append", metavar="NAME=VALUE")
    p.add_argument("--nmax", type=int, default=1)
    p.add_argument("--grid", help="r0,r1,steps (uniform)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=("riccati", "commutators", "chains", "robertson", "normalform", "all"),
                   default="all")
    p.add_argument("--json")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("normalform", help="Liouville normal form of a chain state")
    p.add_argument("--p", default="r^2")
    p.add_argument("--rho", default="r^2")
    p.add_argument("--q", default=None, help="defaults to r^2 (-v) - l(l+1)")
    p.add_argument("--lambda", dest="lam", default=None)
    p.add_argument("--exponent", default="1/4")
    p.add_argument("--potential", default="coulomb")
    p.add_argument("--const", action="append", metavar="NAME=VALUE")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--r-min", dest="r_min", type=float, default=1e-6)
    p.add_argument("--points", type=int, default=4096)
    p.set_defaults(func=cmd_normalform)
    return parser


# options whose values commonly start with a minus sign ("-K/r", "-1/4")
_SIGNED_VALUE_OPTIONS = frozenset({"--potential", "--p", "--rho", "--q", "--lambda", "--const"})


def _join_signed_values(argv: Sequence[str]) -> list[str]:
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _SIGNED_VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and not nxt.startswith("--"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_signed_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if getattr(args, "seed", "absent") is None:
            args.seed = _default_seed()
        if args.command == "normalform" and args.const is None and args.potential == "coulomb":
            args.const = ["K=2"]
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ladderkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"ladderkit: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IOError as exc:
        print(f"ladderkit: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except LadderkitError as exc:
        print(f"ladderkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

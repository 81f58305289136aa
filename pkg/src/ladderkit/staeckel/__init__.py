"""Coordinate systems, Staeckel determinants and separated equations."""

from ladderkit.staeckel.config import load_config, parse_config
from ladderkit.staeckel.core import (
    RobertsonReport,
    SeparatedEquation,
    assemble_separated_equation,
    determinant3,
    parse_potential,
    robertson_check,
    scale_factors,
    staeckel_determinant,
)
from ladderkit.staeckel.systems import (
    CONSTANT_SYMBOLS,
    Catalog,
    CoordinateSystem,
    builtin_catalog,
)

__all__ = [
    "CONSTANT_SYMBOLS",
    "Catalog",
    "CoordinateSystem",
    "RobertsonReport",
    "SeparatedEquation",
    "assemble_separated_equation",
    "builtin_catalog",
    "determinant3",
    "load_config",
    "parse_config",
    "parse_potential",
    "robertson_check",
    "scale_factors",
    "staeckel_determinant",
]

"""Exact power-basis algebra: coefficients, functions, operators, parser."""

from ladderkit.symexpr.coefficient import Coefficient
from ladderkit.symexpr.functions import (
    SymbolicFunction,
    SymbolTable,
    differentiate,
    format_function,
    multiply,
    substitute_numeric,
)
from ladderkit.symexpr.operators import DiffOperator, commutator, compose_operators
from ladderkit.symexpr.parser import parse_expr

__all__ = [
    "Coefficient",
    "DiffOperator",
    "commutator",
    "compose_operators",
    "SymbolicFunction",
    "SymbolTable",
    "differentiate",
    "format_function",
    "multiply",
    "parse_expr",
    "substitute_numeric",
]

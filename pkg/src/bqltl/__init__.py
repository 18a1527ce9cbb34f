"""Decision procedures for prenex QLTL under classic, behavioral and
weak-behavioral semantics."""

from .formula import QuantifiedFormula, parse, parse_matrix
from .trace import LassoTrace, eval_ltl

__all__ = ["QuantifiedFormula", "parse", "parse_matrix", "LassoTrace", "eval_ltl"]
__version__ = "0.1.0"

"""Exact point invariants of systems of ODEs and the cohomology of their symbol algebra."""

from .expr import Expr, ParseError, parse
from .jets import OdeSystem, PointMap, prolong, pullback, total_derivative

__all__ = ["Expr", "ParseError", "parse", "OdeSystem", "PointMap", "prolong", "pullback", "total_derivative"]
__version__ = "0.1.0"

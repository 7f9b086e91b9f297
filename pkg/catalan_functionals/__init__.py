"""
catalan-functionals - moments and limit laws of additive tree functionals

Exact moment tables, limit-law moment sequences, slowly converging series
constants, polylogarithm expansion checks and Monte Carlo experiments for
X_n = sum over nodes of b_{subtree size} on uniform random binary trees.
"""

__version__ = "0.1.0"

from .errors import ArgumentError, CatalanFunctionalError, NumericError
from .types import ExperimentSpec, MomentTable, PolylogId, TollSpec

__all__ = [
    "ArgumentError",
    "CatalanFunctionalError",
    "ExperimentSpec",
    "MomentTable",
    "NumericError",
    "PolylogId",
    "TollSpec",
]

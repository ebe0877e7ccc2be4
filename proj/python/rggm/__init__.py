"""Robust sparse Gaussian graphical models.

Matrices are numpy arrays with one observation per row. Edge lists are
0-based ``(i, j)`` pairs with ``i < j``; the CLI file formats are 1-based.
"""

from ._rggm import *  # noqa: F401,F403
from ._rggm import Error, FitResult, SolutionPath  # noqa: F401

__version__ = "0.1.0"

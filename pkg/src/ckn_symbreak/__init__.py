"""Numerical toolkit for symmetry breaking in weighted fractional
Hardy-Sobolev (Caffarelli-Kohn-Nirenberg type) inequalities."""

__version__ = "0.1.0"

from .constants import ProblemParams, validate_params  # noqa: E402
from .spectral import PolarField, RadialGrid, RadialProfile  # noqa: E402

__all__ = ["__version__", "ProblemParams", "validate_params", "PolarField", "RadialGrid", "RadialProfile"]

"""Numerical laboratory for the staggered tunable-range antiferromagnetic
Ising chain: exact strong-long-range solution, Landau analysis,
susceptibilities, classical two-angle analysis, exact diagonalization, and
variational Monte Carlo."""

from .params import ModelParams

__all__ = ["ModelParams"]
__version__ = "0.1.0"

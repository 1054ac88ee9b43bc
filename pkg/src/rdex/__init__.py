"""Reaction-diffusion exclusion process on the discrete torus.

Simulation, exact small-system solvers, fluctuation analysis, and the
deterministic hydrodynamic/stochastic limits, with machine-checkable
verification of the stationary-state scaling laws.
"""

from .theory import ModelParams

__version__ = "0.1.0"

__all__ = ["ModelParams", "__version__"]

"""Spectral collocation on the half line for Volterra's population model.

Rational Chebyshev and log-sinh-mapped Hermite function bases, Gauss-type
collocation grids, a dense Newton solver and an independent Runge-Kutta
reference integrator.
"""

__version__ = "0.1.0"

from .basis import BasisSpec, EvalTriple, Family
from .errors import (
    DomainError,
    NumericError,
    ParameterError,
    SingularMatrixError,
    SpectralPopError,
    StiffnessError,
)
from .nodes import CollocationGrid
from .oracle import Trajectory, oracle_umax, rk_integrate
from .solver import NewtonConfig, SolveReport, lu_solve, newton_solve
from .volterra import (
    DimensionalParams,
    ModelParams,
    SpectralSolution,
    VolterraReport,
    exact_umax,
    find_umax,
    nondimensionalize,
    solve_hfc,
    solve_rcc,
)

__all__ = [
    "BasisSpec", "EvalTriple", "Family", "CollocationGrid",
    "DomainError", "NumericError", "ParameterError", "SingularMatrixError",
    "SpectralPopError", "StiffnessError",
    "NewtonConfig", "SolveReport", "lu_solve", "newton_solve",
    "DimensionalParams", "ModelParams", "SpectralSolution", "VolterraReport",
    "exact_umax", "find_umax", "nondimensionalize", "solve_hfc", "solve_rcc",
    "Trajectory", "oracle_umax", "rk_integrate",
]

"""Invariant solutions of time-fractional diffusion-wave equations.

The equation :math:`D^\\alpha_t u = u_{\\omega\\omega} + \\bar c(\\omega) u_\\omega`
is studied through its coefficient families (:mod:`fracsym.symmetry`), the
closed-form invariant solutions (:mod:`fracsym.solutions`) built on the
special functions in :mod:`fracsym.specfun`, and residual checks
(:mod:`fracsym.verify`).
"""

from __future__ import annotations

from fracsym._kernels import BACKEND
from fracsym.errors import (
    ConfigError,
    ConvergenceDomainError,
    DomainError,
    FracsymError,
    NumericalError,
    PoleError,
    QuadratureError,
)
from fracsym.fracderiv import FracOrder, TimeGrid, gl_weights, rl_derivative_grid, rl_derivative_power
from fracsym.solutions import (
    SimilarityFrame,
    SolutionSpec,
    classical_limit,
    eval_solution,
    make_spec,
    reduced_ode_rhs,
    similarity_transform,
)
from fracsym.symmetry import CaseMatch, CaseSpec, cbar, classify, generators, solution_generator
from fracsym.verify import (
    Grid2D,
    ResidualReport,
    convergence_study,
    invariant_surface_check,
    pde_residual,
    reduced_ode_residual,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CaseMatch",
    "CaseSpec",
    "ConfigError",
    "ConvergenceDomainError",
    "DomainError",
    "FracOrder",
    "FracsymError",
    "Grid2D",
    "NumericalError",
    "PoleError",
    "QuadratureError",
    "ResidualReport",
    "SimilarityFrame",
    "SolutionSpec",
    "TimeGrid",
    "cbar",
    "classical_limit",
    "classify",
    "convergence_study",
    "eval_solution",
    "generators",
    "gl_weights",
    "invariant_surface_check",
    "make_spec",
    "pde_residual",
    "reduced_ode_residual",
    "reduced_ode_rhs",
    "rl_derivative_grid",
    "rl_derivative_power",
    "similarity_transform",
    "solution_generator",
]

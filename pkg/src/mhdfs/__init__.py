"""Hermite-function pseudospectral solver for the MHD Falkner-Skan equation."""

from .collocation import SolveConfig, SolveReport, continuation_solve, newton_solve
from .shooting import ShootingConfig, shoot
from .trial_solution import ProblemParams, TrialSolution

__all__ = [
    "ProblemParams",
    "TrialSolution",
    "SolveConfig",
    "SolveReport",
    "newton_solve",
    "continuation_solve",
    "ShootingConfig",
    "shoot",
]

__version__ = "0.1.0"

"""Pseudospectral collocation of the MHD Falkner-Skan equation.

The residual

    Res(tau) = F''' + F F'' + beta (1 - F'^2) - M^2 (F' - 1)

is forced to vanish at the N + 2 images tau_j = l exp(k x_j) of the roots of
the degree-(N + 2) Hermite polynomial. The unknowns are a_0..a_N and lam, so
the system is square and solved by damped Newton iteration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .domain_map import transform_nodes, transformed_basis
from .errors import SolverError
from .hermite_basis import QuadratureGrid, gauss_hermite_grid
from .trial_solution import ProblemParams, TrialSolution, combine, rational_derivatives

__all__ = [
    "SolveConfig",
    "SolveReport",
    "CollocationSystem",
    "residual_at",
    "assemble_system",
    "newton_solve",
    "continuation_solve",
    "default_lambda",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveConfig:
    N: int = 20
    k: float = 2.0
    l: float = 1.0
    residual_tol: float = 1e-10
    step_tol: float = 1e-12
    max_iter: int = 100
    damping_min: float = 2.0**-20

    def __post_init__(self):
        if self.N < 4:
            raise ValueError(f"expansion order N must be >= 4, got {self.N}")
        if not (self.k > 0 and self.l > 0):
            raise ValueError("k and l must be positive")
        if not (self.residual_tol > 0 and self.step_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0 < self.damping_min <= 1:
            raise ValueError("damping_min must lie in (0, 1]")


@dataclass(frozen=True)
class SolveReport:
    solution: TrialSolution
    residual_norm: float
    iterations: int
    skin_friction: float
    converged: bool
    history: tuple = field(default=(), repr=False)


def _residual(F, params):
    f, fp, fpp, fppp = F
    M2 = params.M * params.M
    return fppp + f * fpp + params.beta * (1.0 - fp * fp) - M2 * (fp - 1.0)


def residual_at(solution: TrialSolution, params: ProblemParams, tau):
    """Residual of the ODE for ``solution`` at ``tau > 0`` (scalar or array)."""
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr <= 0):
        raise ValueError("residual is evaluated at tau > 0")
    out = _residual(solution.derivatives(tau_arr), params)
    return float(out) if out.ndim == 0 else out


class CollocationSystem:
    """Residual vector at the collocation nodes as a function of (a, lam).

    Basis derivatives at the nodes do not depend on the unknowns, so they
    are computed once.
    """

    def __init__(self, params: ProblemParams, N: int, k: float, l: float, grid: QuadratureGrid = None):
        if grid is None:
            grid = gauss_hermite_grid(N + 2)
        if grid.size != N + 2:
            raise ValueError(f"grid has {grid.size} nodes, expected N + 2 = {N + 2}")
        self.params = params
        self.N, self.k, self.l = N, k, l
        self.grid = grid
        self.tau = l * transform_nodes(grid, k)
        self._s = self.tau / l
        self._basis = transformed_basis(N, self._s, k)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        F = combine(x[:-1], x[-1], self.l, self._s, self._basis)
        return _residual(F, self.params)

    def roundoff_floor(self, x):
        """Per-node residual level reachable in double precision.

        64 eps times the largest partial product entering the residual. Near
        the smallest nodes the Leibniz terms of F''' cancel from magnitudes
        far above the residual itself.
        """
        x = np.asarray(x, dtype=float)
        coeffs, lam, l = x[:-1], x[-1], self.l
        p = rational_derivatives(self._s, lam)
        q = np.abs(rational_derivatives(self._s, 1.0))
        b = np.abs(np.tensordot(coeffs, self._basis, axes=([0], [1])))
        third = np.max(
            [np.abs(p[3]), q[3] * b[0], 3 * q[2] * b[1], 3 * q[1] * b[2], q[0] * b[3]], axis=0
        ) / l**2
        F = combine(coeffs, lam, l, self._s, self._basis)
        M2 = self.params.M**2
        scale = np.max(
            [third, np.abs(F[0] * F[2]), abs(self.params.beta) * (1 + F[1] ** 2), M2 * (np.abs(F[1]) + 1)],
            axis=0,
        )
        return 64 * np.finfo(float).eps * scale

    def jacobian(self, x, r=None):
        """Forward differences, step max(1e-7, 1e-7 |x_j|) per unknown."""
        x = np.asarray(x, dtype=float)
        if r is None:
            r = self(x)
        J = np.empty((r.size, x.size))
        for j in range(x.size):
            h = max(1e-7, 1e-7 * abs(x[j]))
            xp = x.copy()
            xp[j] += h
            J[:, j] = (self(xp) - r) / h
        return J

    def pack(self, solution: TrialSolution):
        return np.append(solution.coeffs, solution.lam)

    def unpack(self, x):
        return TrialSolution(x[:-1], x[-1], self.k, self.l)


def assemble_system(solution: TrialSolution, params: ProblemParams, grid: QuadratureGrid):
    """Residuals at the transformed grid nodes; grid must have N + 2 nodes."""
    if grid.size != solution.N + 2:
        raise ValueError(f"grid has {grid.size} nodes, expected N + 2 = {solution.N + 2}")
    system = CollocationSystem(params, solution.N, solution.k, solution.l, grid)
    return system(system.pack(solution))


def default_lambda(params: ProblemParams, l: float) -> float:
    # f''(0) is close to M for strong fields and f''(0) = 2 / (lam l)
    return 2.0 / (l * max(params.M, 1.0))


def newton_solve(params: ProblemParams, config: SolveConfig, initial: TrialSolution = None) -> SolveReport:
    """Damped Newton iteration for the collocation equations.

    Without ``initial`` the start is a = 0 with lam from ``default_lambda``.
    A node counts as solved once its residual is below ``residual_tol`` or
    below the roundoff floor of its own terms.
    Exceeding ``max_iter`` or stalling returns a report with
    ``converged=False``; a numerically singular Jacobian raises SolverError.
    """
    if initial is not None and (initial.N, initial.k, initial.l) != (config.N, config.k, config.l):
        raise ValueError("initial solution does not match N, k, l of the config")
    system = CollocationSystem(params, config.N, config.k, config.l)
    if initial is None:
        x = np.zeros(config.N + 2)
        x[-1] = default_lambda(params, config.l)
    else:
        x = system.pack(initial)

    def settled(x, r):
        floor = system.roundoff_floor(x)
        return bool(np.all(np.abs(r) <= np.maximum(config.residual_tol, floor)))

    r = system(x)
    rnorm = float(np.max(np.abs(r)))
    history = [rnorm]
    iterations = 0
    while not settled(x, r) and iterations < config.max_iter:
        J = system.jacobian(x, r)
        cond = np.linalg.cond(J)
        if not np.isfinite(cond) or cond * np.finfo(float).eps > 1.0:
            raise SolverError(f"singular collocation Jacobian (condition number {cond:.3e})", condition=cond)
        dx = -lu_solve(lu_factor(J), r)

        alpha = 1.0
        accepted = False
        while alpha >= config.damping_min:
            trial = x + alpha * dx
            if trial[-1] > 0:
                r_trial = system(trial)
                trial_norm = float(np.max(np.abs(r_trial)))
                if trial_norm < rnorm:
                    accepted = True
                    break
            alpha *= 0.5
        iterations += 1
        if not accepted:
            log.debug("newton stalled at iteration %d, residual %.3e", iterations, rnorm)
            break
        step = alpha * float(np.max(np.abs(dx)))
        x, r, rnorm = trial, r_trial, trial_norm
        history.append(rnorm)
        log.debug("newton it %d: residual %.3e step %.3e damping %g", iterations, rnorm, step, alpha)
        if step <= config.step_tol:
            break

    solution = system.unpack(x)
    return SolveReport(
        solution=solution,
        residual_norm=rnorm,
        iterations=iterations,
        skin_friction=solution.skin_friction(),
        converged=settled(x, r),
        history=tuple(history),
    )


def continuation_solve(params_target: ProblemParams, config: SolveConfig, M_steps) -> SolveReport:
    """Solve for increasing M, warm-starting each stage from the previous one.

    Returns the first non-converged intermediate report, if any.
    """
    steps = [float(M) for M in M_steps]
    if not steps:
        raise ValueError("M_steps must not be empty")
    if any(b <= a for a, b in zip(steps, steps[1:])):
        raise ValueError("M_steps must be strictly ascending")
    if steps[-1] != params_target.M:
        raise ValueError(f"M_steps must end at the target M = {params_target.M}")

    current = None
    report = None
    for M in steps:
        report = newton_solve(ProblemParams(params_target.m, M), config, current)
        if not report.converged:
            return report
        current = report.solution
    return report

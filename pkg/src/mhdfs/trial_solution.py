"""Boundary-adapted approximant for the MHD Falkner-Skan equation.

With s = tau / l the approximant is

    F(tau) = l * G(s),   G(s) = s^2/(s + lam) + s^2/(s + 1) * sum_i a_i H^_i(s),

so F(0) = F'(0) = 0 for any coefficients and, because the basis decays at
both ends of (0, inf), F'(tau) -> G'(inf) = 1. Derivatives in tau pick up a
factor l**(1 - p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain_map import transformed_basis

__all__ = [
    "ProblemParams",
    "TrialSolution",
    "rational_derivatives",
    "combine",
    "solution_to_dict",
    "solution_from_dict",
]


@dataclass(frozen=True)
class ProblemParams:
    """Wedge exponent ``m`` and magnetic parameter ``M``."""

    m: float
    M: float

    def __post_init__(self):
        if self.m == -1:
            raise ValueError("m = -1 makes beta = 2m/(m+1) undefined")
        if not self.M >= 0:
            raise ValueError(f"magnetic parameter must be non-negative, got {self.M}")

    @property
    def beta(self) -> float:
        return 2.0 * self.m / (self.m + 1.0)


def rational_derivatives(s, c):
    """s^2/(s+c) and its first three derivatives, stacked on axis 0."""
    s = np.asarray(s, dtype=float)
    d = s + c
    c2 = c * c
    return np.stack([s * s / d, 1.0 - c2 / d**2, 2.0 * c2 / d**3, -6.0 * c2 / d**4])


def combine(coeffs, lam, l, s, basis):
    """F, F', F'', F''' in tau from precomputed basis derivatives at s = tau/l.

    ``basis`` is the output of ``transformed_basis`` at ``s``.
    """
    p = rational_derivatives(s, lam)
    q = rational_derivatives(s, 1.0)
    b = np.tensordot(coeffs, basis, axes=([0], [1]))
    g = np.stack(
        [
            p[0] + q[0] * b[0],
            p[1] + q[1] * b[0] + q[0] * b[1],
            p[2] + q[2] * b[0] + 2.0 * q[1] * b[1] + q[0] * b[2],
            p[3] + q[3] * b[0] + 3.0 * q[2] * b[1] + 3.0 * q[1] * b[2] + q[0] * b[3],
        ]
    )
    scale = np.array([l, 1.0, 1.0 / l, 1.0 / l**2]).reshape((4,) + (1,) * (g.ndim - 1))
    return g * scale


@dataclass(frozen=True)
class TrialSolution:
    """Spectral coefficients ``coeffs``, far-field parameter ``lam``, map
    constant ``k`` and domain scaling ``l``."""

    coeffs: np.ndarray
    lam: float
    k: float = 2.0
    l: float = 1.0

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        if coeffs.size == 0:
            raise ValueError("need at least one coefficient")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not self.k > 0 or not self.l > 0:
            raise ValueError("k and l must be positive")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "l", float(self.l))

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def zero(cls, N, lam, k=2.0, l=1.0):
        return cls(np.zeros(N + 1), lam, k, l)

    def derivatives(self, tau):
        """Array of shape ``(4,) + tau.shape`` holding F, F', F'', F'''."""
        tau = np.asarray(tau, dtype=float)
        if np.any(tau < 0):
            raise ValueError("approximant is defined for tau >= 0")
        s = tau / self.l
        return combine(self.coeffs, self.lam, self.l, s, transformed_basis(self.N, s, self.k))

    def evaluate(self, tau, deriv_order=0):
        if deriv_order not in (0, 1, 2, 3):
            raise ValueError(f"derivative order must be in 0..3, got {deriv_order}")
        out = self.derivatives(tau)[deriv_order]
        return float(out) if out.ndim == 0 else out

    def skin_friction(self) -> float:
        """f''(0) = 2 / (lam * l); the basis term is flat to all orders at 0."""
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        return 2.0 / (self.lam * self.l)

    def with_values(self, coeffs=None, lam=None):
        return TrialSolution(
            self.coeffs if coeffs is None else coeffs,
            self.lam if lam is None else lam,
            self.k,
            self.l,
        )


def solution_to_dict(solution: TrialSolution, params: ProblemParams) -> dict:
    # solution state keeps full precision so a saved run re-evaluates exactly
    return {
        "m": params.m,
        "M": params.M,
        "N": solution.N,
        "k": solution.k,
        "l": solution.l,
        "lambda": solution.lam,
        "coeffs": [float(a) for a in solution.coeffs],
    }


def solution_from_dict(doc: dict) -> tuple[TrialSolution, ProblemParams]:
    try:
        coeffs = [float(a) for a in doc["coeffs"]]
        solution = TrialSolution(coeffs, float(doc["lambda"]), float(doc["k"]), float(doc["l"]))
        params = ProblemParams(float(doc["m"]), float(doc["M"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed solution document: {exc!r}") from exc
    if "N" in doc and int(doc["N"]) != solution.N:
        raise ValueError(f"N = {doc['N']} does not match {len(coeffs)} coefficients")
    if not math.isfinite(solution.lam):
        raise ValueError("lambda must be finite")
    return solution, params

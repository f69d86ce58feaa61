"""Normalized Hermite functions and Hermite-Gauss quadrature.

The functions here are H~_n(x) = exp(-x^2/2) H_n(x) / sqrt(2^n n!), evaluated
with the normalized three-term recurrence so nothing overflows for large n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import NumericalError

__all__ = [
    "HermiteBasis",
    "QuadratureGrid",
    "hermite_values",
    "derivative_table",
    "eval_hermite_function",
    "eval_hermite_function_derivative",
    "gauss_hermite_grid",
]


def hermite_values(nmax, x, envelope=None):
    """Values of H~_0..H~_nmax at ``x``, shape ``(nmax + 1,) + x.shape``.

    ``envelope`` replaces the starting factor exp(-x^2/2). Passing
    exp(-x^2/2 - c*x) yields the functions multiplied by exp(-c*x) without
    ever forming the (possibly overflowing) factor on its own.
    """
    if nmax < 0:
        raise ValueError(f"highest index must be non-negative, got {nmax}")
    x = np.asarray(x, dtype=float)
    if envelope is None:
        envelope = np.exp(-0.5 * x * x)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = envelope
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * x * envelope
    for n in range(1, nmax):
        out[n + 1] = x * math.sqrt(2.0 / (n + 1)) * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def _differentiate(values):
    # H~'_n = sqrt(n/2) H~_{n-1} - sqrt((n+1)/2) H~_{n+1}; loses the top row.
    n = np.arange(values.shape[0] - 1, dtype=float)
    shape = (-1,) + (1,) * (values.ndim - 1)
    up = np.sqrt((n + 1) / 2).reshape(shape) * values[1:]
    down = np.zeros_like(up)
    down[1:] = np.sqrt(n[1:] / 2).reshape(shape) * values[:-2]
    return down - up


def derivative_table(nmax, x, max_order=3, envelope=None):
    """Stack of d^p H~_n / dx^p for p = 0..max_order and n = 0..nmax.

    Returns an array of shape ``(max_order + 1, nmax + 1) + x.shape``.
    Higher derivatives come from repeated use of the symmetric identity,
    which is exact: it only needs the values up to index nmax + max_order.
    """
    values = hermite_values(nmax + max_order, x, envelope)
    table = [values[: nmax + 1]]
    current = values
    for _ in range(max_order):
        current = _differentiate(current)
        table.append(current[: nmax + 1])
    return np.stack(table)


@dataclass(frozen=True)
class HermiteBasis:
    """The normalized Hermite functions H~_0 .. H~_order."""

    order: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"basis order must be non-negative, got {self.order}")

    def __call__(self, x):
        return hermite_values(self.order, x)

    def derivatives(self, x, max_order=3):
        return derivative_table(self.order, x, max_order)


def eval_hermite_function(n: int, x: float) -> float:
    if n < 0:
        raise ValueError(f"Hermite function index must be non-negative, got {n}")
    return float(hermite_values(n, x)[n])


def eval_hermite_function_derivative(n: int, x: float, deriv_order: int) -> float:
    """d^p H~_n / dx^p at ``x`` for p in {1, 2, 3}."""
    if n < 0:
        raise ValueError(f"Hermite function index must be non-negative, got {n}")
    if deriv_order not in (1, 2, 3):
        raise ValueError(f"derivative order must be 1, 2 or 3, got {deriv_order}")
    return float(derivative_table(n, x, deriv_order)[deriv_order, n])


@dataclass(frozen=True)
class QuadratureGrid:
    """Hermite-Gauss nodes with the weights for integrands of the form H~_n H~_m."""

    nodes: np.ndarray
    weights: np.ndarray
    size: int = field(init=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "size", len(nodes))

    def integrate(self, values):
        """Quadrature sum of ``values`` sampled at the nodes (last axis)."""
        return np.asarray(values) @ self.weights


def gauss_hermite_grid(num_nodes: int, polish_steps: int = 2) -> QuadratureGrid:
    """Roots of the degree-``num_nodes`` Hermite polynomial and their weights.

    Nodes are the eigenvalues of the Jacobi matrix of the recurrence
    (zero diagonal, off-diagonal sqrt(j/2)), polished by Newton steps on
    H~_{num_nodes}. Weights are sqrt(pi) / ((N+1) H~_N(x_j)^2) with
    N = num_nodes - 1, so that sum_j w_j H~_n(x_j) H~_m(x_j) = sqrt(pi) delta_nm
    whenever n + m <= 2 num_nodes - 1.
    """
    if num_nodes < 1:
        raise ValueError(f"need at least one node, got {num_nodes}")
    q = num_nodes
    off = np.sqrt(np.arange(1, q) / 2.0)
    try:
        nodes = eigh_tridiagonal(np.zeros(q), off, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"tridiagonal eigensolver failed for {q} nodes: {exc}") from exc
    nodes = np.sort(nodes)

    for _ in range(polish_steps):
        h = hermite_values(q, nodes)
        slope = math.sqrt(2.0 * q) * h[q - 1] - nodes * h[q]
        nodes = nodes - h[q] / slope
    # enforce exact symmetry about 0
    nodes = 0.5 * (nodes - nodes[::-1])
    if not np.all(np.isfinite(nodes)) or np.any(np.diff(nodes) <= 0):
        raise NumericalError(f"node polishing produced a non-monotone grid for {q} nodes")

    last = hermite_values(q - 1, nodes)[q - 1]
    weights = math.sqrt(math.pi) / (q * last * last)
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureGrid(nodes, weights)

"""Logarithmic map between the real line and the half line (0, inf).

omega = ln(z) / k carries (0, inf) onto R; its inverse is z = exp(k omega).
The transformed basis is H^_n(z) = H~_n(ln(z) / k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermite_basis import QuadratureGrid, derivative_table

__all__ = ["LogMap", "transform_nodes", "chain_factors", "transformed_basis", "TINY"]

# Below this the transformed basis and all its derivatives are exactly 0
# in double precision.
TINY = 1e-300


@dataclass(frozen=True)
class LogMap:
    k: float = 2.0

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"map constant k must be positive, got {self.k}")

    def forward(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0):
            raise ValueError("log map is defined for z > 0 only")
        out = np.log(z) / self.k
        return float(out) if out.ndim == 0 else out

    def inverse(self, omega):
        out = np.exp(self.k * np.asarray(omega, dtype=float))
        return float(out) if out.ndim == 0 else out


def transform_nodes(grid: QuadratureGrid, k: float) -> np.ndarray:
    """Images exp(k x_j) of the grid nodes on (0, inf)."""
    return LogMap(k).inverse(grid.nodes)


def chain_factors(z, k, g1, g2, g3):
    """Derivatives of F(z) = g(ln(z)/k) from g', g'', g''' taken at ln(z)/k.

    Returns ``(F', F'', F''')``; works elementwise on arrays.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise ValueError("chain factors need z > 0")
    kz = k * z
    d1 = g1 / kz
    d2 = g2 / (kz * kz) - g1 / (kz * z)
    d3 = g3 / (kz**3) - 3.0 * g2 / (kz * kz * z) + 2.0 * g1 / (kz * z * z)
    return d1, d2, d3


def transformed_basis(order, z, k, max_order=3):
    """d^p/dz^p of H^_0..H^_order at ``z`` for p = 0..max_order.

    Shape ``(max_order + 1, order + 1) + z.shape``. The powers 1/z^j that the
    chain rule produces are folded into the Gaussian envelope as
    exp(-t^2/2 - j k t), so nothing overflows as z -> 0 or z -> inf. Points
    with z < TINY (including z = 0) get exactly 0.
    """
    if not 0 <= max_order <= 3:
        raise ValueError(f"max_order must be in 0..3, got {max_order}")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("transformed basis needs z >= 0")
    live = z >= TINY
    t = np.where(live, np.log(np.where(live, z, 1.0)) / k, 0.0)

    def table(j, p):
        env = np.where(live, np.exp(-0.5 * t * t - j * k * t), 0.0)
        return derivative_table(order, t, p, envelope=env)

    out = np.empty((max_order + 1, order + 1) + z.shape)
    out[0] = table(0, 0)[0]
    if max_order >= 1:
        d = table(1, 1)
        out[1] = d[1] / k
    if max_order >= 2:
        d = table(2, 2)
        out[2] = d[2] / k**2 - d[1] / k
    if max_order >= 3:
        d = table(3, 3)
        out[3] = d[3] / k**3 - 3.0 * d[2] / k**2 + 2.0 * d[1] / k
    return out

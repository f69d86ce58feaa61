"""Shooting-method reference solver for the MHD Falkner-Skan problem.

Integrates f''' = -f f'' - beta (1 - f'^2) + M^2 (f' - 1) from
(f, f', f'')(0) = (0, 0, s) with fixed-step classical RK4 and root-finds s so
that f'(tau_max) = 1. Shares no code with the spectral path.

Away from the root the far-field error grows roughly like exp(M tau), so for
strong fields the trajectory leaves any sane region long before tau_max. The
direction it leaves in still tells which side of the root s is on, and the
root-finder uses exactly that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import BracketError, DivergenceError
from .trial_solution import ProblemParams

__all__ = [
    "ShootingConfig",
    "default_bracket",
    "rhs",
    "integrate_ivp",
    "terminal_mismatch",
    "shoot",
    "step_halving",
]


@dataclass(frozen=True)
class ShootingConfig:
    tau_max: float = 10.0
    h: float = 1e-3
    bracket: Optional[Tuple[float, float]] = None  # None: default_bracket(params)
    root_tol: float = 1e-12
    blowup: float = 1e8
    escape: float = 10.0  # |f' - 1| beyond this decides the side of the root

    def __post_init__(self):
        if self.tau_max < 5:
            raise ValueError(f"tau_max must be >= 5, got {self.tau_max}")
        if not 0 < self.h <= 0.01:
            raise ValueError(f"step h must lie in (0, 0.01], got {self.h}")
        if self.bracket is not None and not self.bracket[0] < self.bracket[1]:
            raise ValueError(f"bracket must satisfy low < high, got {self.bracket}")
        if not self.root_tol > 0:
            raise ValueError("root_tol must be positive")


def default_bracket(params: ProblemParams):
    return 0.1, 1.5 * max(params.M, 1.0) * max(1.0, math.sqrt(1.0 + abs(params.beta)))


def rhs(f, fp, fpp, beta, M2):
    return fp, fpp, -f * fpp - beta * (1.0 - fp * fp) + M2 * (fp - 1.0)


def integrate_ivp(params: ProblemParams, s: float, config: ShootingConfig = ShootingConfig()) -> float:
    """f'(tau_max) for wall shear ``s``.

    Raises DivergenceError once |f|, |f''| exceed ``config.blowup`` or
    |f' - 1| exceeds ``config.escape``.
    """
    beta = params.beta
    M2 = params.M * params.M
    h = config.h
    steps = int(round(config.tau_max / h))
    f, g, q = 0.0, 0.0, float(s)
    half = 0.5 * h
    sixth = h / 6.0
    blowup, escape = config.blowup, config.escape
    for i in range(steps):
        k1 = rhs(f, g, q, beta, M2)
        k2 = rhs(f + half * k1[0], g + half * k1[1], q + half * k1[2], beta, M2)
        k3 = rhs(f + half * k2[0], g + half * k2[1], q + half * k2[2], beta, M2)
        k4 = rhs(f + h * k3[0], g + h * k3[1], q + h * k3[2], beta, M2)
        f += sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        g += sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        q += sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        if not (abs(g - 1.0) <= escape and abs(f) <= blowup and abs(q) <= blowup):
            tau = (i + 1) * h
            sign = 1.0 if g > 1.0 else -1.0
            raise DivergenceError(f"trajectory for s={s!r} diverged at tau={tau:.4g} (f'={g:.4g})", tau, sign)
    return g


def terminal_mismatch(params: ProblemParams, s: float, config: ShootingConfig) -> float:
    """f'(tau_max) - 1, or +-inf when the trajectory diverges on that side."""
    try:
        return integrate_ivp(params, s, config) - 1.0
    except DivergenceError as exc:
        return math.copysign(math.inf, exc.sign)


def shoot(params: ProblemParams, config: ShootingConfig = ShootingConfig(), max_iter: int = 400) -> float:
    """Wall shear s* = f''(0) closing f'(tau_max) = 1.

    Bisection while an end of the bracket diverges, Illinois false position
    once both mismatches are finite. Stops when |mismatch| <= root_tol or the
    bracket has shrunk to a few ulps.
    """
    lo, hi = config.bracket if config.bracket is not None else default_bracket(params)
    m_lo = terminal_mismatch(params, lo, config)
    m_hi = terminal_mismatch(params, hi, config)
    if m_lo == 0.0:
        return lo
    if m_hi == 0.0:
        return hi
    if (m_lo > 0) == (m_hi > 0):
        raise BracketError(
            f"no sign change of f'(tau_max) - 1 on [{lo}, {hi}]: mismatches {m_lo:.4g}, {m_hi:.4g}",
            m_lo,
            m_hi,
        )
    side = 0
    for _ in range(max_iter):
        if math.isfinite(m_lo) and math.isfinite(m_hi):
            mid = (lo * m_hi - hi * m_lo) / (m_hi - m_lo)
            if not lo < mid < hi:
                mid = 0.5 * (lo + hi)
        else:
            mid = 0.5 * (lo + hi)
        m_mid = terminal_mismatch(params, mid, config)
        if abs(m_mid) <= config.root_tol:
            return mid
        if (m_mid > 0) == (m_hi > 0):
            hi, m_hi = mid, m_mid
            if side == 1 and math.isfinite(m_lo):
                m_lo *= 0.5
            side = 1
        else:
            lo, m_lo = mid, m_mid
            if side == -1 and math.isfinite(m_hi):
                m_hi *= 0.5
            side = -1
        if hi - lo <= 4.0 * math.ulp(hi):
            break
    return 0.5 * (lo + hi)


def step_halving(params: ProblemParams, config: ShootingConfig = ShootingConfig()):
    """Shoot with steps 4h, 2h and h; return the three roots and the observed order.

    The order is log2 of the ratio of successive differences; it is nan when
    the differences are at roundoff level.
    """
    roots = []
    for factor in (4.0, 2.0, 1.0):
        cfg = ShootingConfig(config.tau_max, config.h * factor, config.bracket, config.root_tol, config.blowup, config.escape)
        roots.append(shoot(params, cfg))
    d1 = roots[0] - roots[1]
    d2 = roots[1] - roots[2]
    order = math.log2(d1 / d2) if d2 != 0 and d1 / d2 > 0 else math.nan
    return tuple(roots), order

"""Published run settings and skin-friction values (preset "paper-tables")."""

from __future__ import annotations

from typing import NamedTuple, Optional


class TableRow(NamedTuple):
    m: float
    M: float
    N: int
    k: float
    l: float
    skin_friction: float


# m = -0.6 (beta = -3)
ROWS_ADVERSE = (
    TableRow(-0.6, 5, 20, 2, 1.658, 4.60075494),
    TableRow(-0.6, 10, 15, 2, 1.296, 9.80646420),
    TableRow(-0.6, 15, 15, 1, 1.089, 14.87167484),
    TableRow(-0.6, 20, 15, 1, 1.0, 19.90393701),
    TableRow(-0.6, 50, 20, 2, 1.336, 49.96165233),
)

# m = 2 (beta = 4/3)
ROWS_FAVOURABLE = (
    TableRow(2.0, 5, 30, 3, 1.194, 5.19095945),
    TableRow(2.0, 10, 30, 2, 1.112, 10.09677545),
    TableRow(2.0, 50, 30, 2, 0.904, 50.01944071),
    TableRow(2.0, 100, 30, 2, 0.616, 100.00972170),
)

PRESETS = {"paper-tables": ROWS_ADVERSE + ROWS_FAVOURABLE}


def lookup(m: float, M: float, preset: str = "paper-tables") -> Optional[TableRow]:
    for row in PRESETS[preset]:
        if abs(row.m - m) < 1e-12 and abs(row.M - M) < 1e-12:
            return row
    return None

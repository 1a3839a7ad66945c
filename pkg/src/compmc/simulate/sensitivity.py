"""Contribution-to-variance ranking of stochastic inputs.

For each stochastic (variable, day) the Spearman rank correlation ``r`` with
the per-trial total is computed; its contribution is
``sign(r) * r**2 / sum(r**2) * 100``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ..errors import ConfigError
from .engine import TrialMatrix


@dataclass(frozen=True)
class SensitivityEntry:
    variable: str
    day: int  # 1-based forecast day
    rank_correlation: float
    contribution: float  # signed percent
    constant: bool = False

    @property
    def key(self) -> str:
        return f"{self.variable}@day{self.day}"


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    """Spearman correlation (average ranks for ties); 0.0 if either side is constant."""
    rx = rankdata(x)
    ry = rankdata(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    den = float(np.sqrt((dx @ dx) * (dy @ dy)))
    if den == 0.0:
        return 0.0
    return float(np.clip((dx @ dy) / den, -1.0, 1.0))


def sensitivity_chart(trials: TrialMatrix) -> list[SensitivityEntry]:
    valid = trials.valid
    if int(valid.sum()) < 2:
        raise ConfigError("sensitivity needs at least two completed trials")
    if not trials.stochastic:
        raise ConfigError("sensitivity needs at least one stochastic input")
    target = trials.aggregate[valid]
    raw = []
    for var in trials.stochastic:
        cols = trials.draws[var][valid]
        for d in range(trials.horizon):
            x = cols[:, d]
            const = bool(np.all(x == x[0]))
            r = 0.0 if const else spearman(x, target)
            raw.append((var, d + 1, r, const))
    total = sum(r * r for _, _, r, _ in raw)
    entries = [
        SensitivityEntry(
            var, day, r, (float(np.sign(r)) * r * r / total * 100.0) if total > 0 else 0.0, const
        )
        for var, day, r, const in raw
    ]
    # stable: equal magnitudes keep binding/day order
    entries.sort(key=lambda e: -abs(e.contribution))
    return entries


def aggregate_by_variable(entries: list[SensitivityEntry]) -> dict[str, float]:
    """Total |contribution| per variable across days."""
    out: dict[str, float] = {}
    for e in entries:
        out[e.variable] = out.get(e.variable, 0.0) + abs(e.contribution)
    return out

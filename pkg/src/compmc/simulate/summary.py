"""Outcome distribution summaries and certainty intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import ConfigError


def nearest_rank(sorted_values: np.ndarray, p: float) -> float:
    """Smallest value with at least a fraction ``p`` of the data at or below it."""
    n = sorted_values.shape[0]
    # round away float noise such as 0.9 * 100 = 90.00000000000001
    rank = math.ceil(round(p * n, 9))
    rank = min(max(rank, 1), n)
    return float(sorted_values[rank - 1])


def certainty_interval(aggregates, level: float) -> tuple[float, float, float]:
    """Central interval holding ``level`` of the outcomes, plus the overall mean.

    Bounds are the nearest-rank quantiles at ``(1 - level) / 2`` and
    ``(1 + level) / 2``.
    """
    a = np.sort(np.asarray(aggregates, dtype=float).ravel())
    if a.size == 0:
        raise ConfigError("certainty_interval needs at least one value")
    if not 0.0 < level <= 1.0:
        raise ConfigError(f"level must be in (0, 1], got {level}")
    low = nearest_rank(a, (1.0 - level) / 2.0)
    high = nearest_rank(a, (1.0 + level) / 2.0)
    return low, high, float(a.mean())


@dataclass(frozen=True)
class OutcomeSummary:
    n_trials: int
    mean: float
    median: float
    stdev: float
    minimum: float
    maximum: float
    certainty_intervals: dict[float, tuple[float, float]]
    histogram_edges: tuple[float, ...]
    histogram_counts: tuple[int, ...]
    n_aborted: int = 0
    bin_width: float = 0.0

    def to_dict(self) -> dict:
        return {
            "n_trials": self.n_trials,
            "n_aborted": self.n_aborted,
            "mean": self.mean,
            "median": self.median,
            "stdev": self.stdev,
            "min": self.minimum,
            "max": self.maximum,
            "certainty_intervals": [
                {"level": lv, "low": lo, "high": hi}
                for lv, (lo, hi) in sorted(self.certainty_intervals.items())
            ],
            "histogram": {
                "rule": "freedman-diaconis",
                "bin_width": self.bin_width,
                "edges": list(self.histogram_edges),
                "counts": list(self.histogram_counts),
            },
        }


def summarize(aggregates, levels: Sequence[float], n_aborted: int = 0) -> OutcomeSummary:
    a = np.asarray(aggregates, dtype=float)
    if a.size == 0:
        raise ConfigError("no completed trials to summarise")
    intervals = {}
    for lv in sorted(set(float(x) for x in levels)):
        lo, hi, _ = certainty_interval(a, lv)
        intervals[lv] = (lo, hi)
    edges = np.histogram_bin_edges(a, bins="fd")
    counts, edges = np.histogram(a, bins=edges)
    return OutcomeSummary(
        n_trials=int(a.size),
        mean=float(a.mean()),
        median=float(np.median(a)),
        stdev=float(a.std(ddof=1)) if a.size > 1 else 0.0,
        minimum=float(a.min()),
        maximum=float(a.max()),
        certainty_intervals=intervals,
        histogram_edges=tuple(float(e) for e in edges),
        histogram_counts=tuple(int(c) for c in counts),
        n_aborted=n_aborted,
        bin_width=float(edges[1] - edges[0]) if edges.size > 1 else 0.0,
    )

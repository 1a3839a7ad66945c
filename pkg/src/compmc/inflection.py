"""Win/lose scoring of epidemic-control momentum over a 3-day sliding window.

For the window ending on day t each series contributes its clipped relative
change between day t-3 and day t:

    win  = w1*down(ndic) + w2*down(current_confirmed) + w3*up(cured_rate)
    lose = w1*up(ndic)   + w2*up(current_confirmed)   + w3*up(death_rate)

A window is labelled 1 when win is strictly greater than lose.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, InsufficientDataError
from .ingest import SupervisedDataset, TimeSeries

logger = logging.getLogger(__name__)

WINDOW = 3
SCORED_SERIES = ("ndic", "current_confirmed", "cured_rate", "death_rate")
TARGET_NAME = "win"


@dataclass(frozen=True)
class TrendWeights:
    w1: float = 0.1
    w2: float = 0.15
    w3: float = 0.25

    def __post_init__(self):
        ws = (self.w1, self.w2, self.w3)
        if any(not math.isfinite(w) or w < 0 for w in ws) or not any(w > 0 for w in ws):
            raise ConfigError(f"weights must be finite, >= 0 and not all zero, got {ws}")


@dataclass(frozen=True)
class WindowScores:
    date: date | None
    win_score: float
    lose_score: float
    flags: tuple[str, ...] = ()

    @property
    def label(self) -> int:
        return 1 if self.win_score > self.lose_score else 0


def trend_delta(values: Sequence[float], direction: str) -> float:
    """Relative change from the first to the last value of a window, clipped to [0, 1].

    ``"down"`` measures falls and ``"up"`` rises; the other direction gives 0.
    A zero starting value has no relative change and yields 0.
    """
    if len(values) != WINDOW + 1:
        raise ConfigError(f"trend window needs {WINDOW + 1} values, got {len(values)}")
    start, end = float(values[0]), float(values[-1])
    if start == 0.0:
        return 0.0
    if direction == "down":
        rel = (start - end) / abs(start)
    elif direction == "up":
        rel = (end - start) / abs(start)
    else:
        raise ConfigError(f"direction must be 'up' or 'down', got {direction!r}")
    return min(1.0, max(0.0, rel))


def score_window(
    bundle: Mapping[str, Sequence[float]],
    weights: TrendWeights | None = None,
    day: date | None = None,
) -> WindowScores:
    """Scores for one window; ``bundle`` maps each scored series to its last 4 values."""
    w = weights or TrendWeights()
    missing = [n for n in SCORED_SERIES if n not in bundle]
    if missing:
        raise ConfigError(f"window is missing series {missing}")
    flags = tuple(f"undefined-trend:{n}" for n in SCORED_SERIES if float(bundle[n][0]) == 0.0)
    win = (
        w.w1 * trend_delta(bundle["ndic"], "down")
        + w.w2 * trend_delta(bundle["current_confirmed"], "down")
        + w.w3 * trend_delta(bundle["cured_rate"], "up")
    )
    lose = (
        w.w1 * trend_delta(bundle["ndic"], "up")
        + w.w2 * trend_delta(bundle["current_confirmed"], "up")
        + w.w3 * trend_delta(bundle["death_rate"], "up")
    )
    return WindowScores(day, win, lose, flags)


def _arrays(series: Mapping[str, TimeSeries | Sequence[float]]) -> tuple[dict[str, np.ndarray], tuple | None]:
    arrays, dates = {}, None
    for name in SCORED_SERIES:
        if name not in series:
            raise ConfigError(f"series bundle lacks {name!r}")
        s = series[name]
        if isinstance(s, TimeSeries):
            arrays[name] = s.array()
            if dates is None:
                dates = s.dates
            elif s.dates != dates:
                raise ConfigError(f"{name} does not share the date axis of {SCORED_SERIES[0]}")
        else:
            arrays[name] = np.asarray(s, dtype=float)
    lengths = {len(a) for a in arrays.values()}
    if len(lengths) != 1:
        raise ConfigError(f"series lengths differ: {sorted(lengths)}")
    return arrays, dates


def _scored_windows(arrays, dates, weights):
    n = len(arrays[SCORED_SERIES[0]])
    if n < WINDOW + 1:
        raise InsufficientDataError(f"need at least {WINDOW + 1} days, got {n}")
    for t in range(WINDOW, n):
        window = {k: v[t - WINDOW : t + 1] for k, v in arrays.items()}
        if not all(np.all(np.isfinite(v)) for v in window.values()):
            logger.warning("window ending at row %d is incomplete; skipped", t)
            continue
        s = score_window(window, weights, dates[t] if dates else None)
        for flag in s.flags:
            logger.warning("window ending at row %d: %s", t, flag)
        yield t, s


def score_series(series, weights: TrendWeights | None = None) -> list[WindowScores]:
    """Scores for every complete window, oldest first."""
    arrays, dates = _arrays(series)
    return [s for _, s in _scored_windows(arrays, dates, weights)]


def feature_names(series_names: Sequence[str] = SCORED_SERIES) -> tuple[str, ...]:
    """``ndic, yester1days_ndic, yester2days_ndic, yester3days_ndic, current_confirmed, ...``"""
    names = []
    for s in series_names:
        names.append(s)
        names.extend(f"yester{k}days_{s}" for k in range(1, WINDOW + 1))
    return tuple(names)


def label_series(series, weights: TrendWeights | None = None) -> tuple[SupervisedDataset, list[WindowScores]]:
    """Labelled dataset with one row per complete window (``days - 3`` rows).

    Features are each scored series on the window's last day and its three
    previous days; the target is the window's win label.
    """
    arrays, dates = _arrays(series)
    rows, labels, row_dates, scores = [], [], [], []
    for t, s in _scored_windows(arrays, dates, weights):
        row = []
        for name in SCORED_SERIES:
            row.extend(arrays[name][t - k] for k in range(WINDOW + 1))
        rows.append(row)
        labels.append(s.label)
        scores.append(s)
        if dates:
            row_dates.append(dates[t])
    names = feature_names()
    X = np.asarray(rows, dtype=float).reshape(len(rows), len(names))
    data = SupervisedDataset(
        names, X, np.asarray(labels, dtype=float), WINDOW, TARGET_NAME, tuple(row_dates) if dates else None
    )
    return data, scores


def write_labeled_csv(path, data: SupervisedDataset) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        lead = ["date"] if data.dates is not None else []
        w.writerow([*lead, *data.feature_names, data.target_name])
        for i in range(len(data)):
            lead = [data.dates[i].isoformat()] if data.dates is not None else []
            w.writerow([*lead, *(repr(float(v)) for v in data.X[i]), int(data.y[i])])


def write_scores_csv(path, scores: Sequence[WindowScores]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "win_score", "lose_score", "label"])
        for s in scores:
            w.writerow([s.date.isoformat() if s.date else "", repr(s.win_score), repr(s.lose_score), s.label])

"""Loading daily series from CSV and turning them into supervised datasets."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptySelectionError,
    GapError,
    InsufficientDataError,
    OrderingError,
    ParseError,
    RangeError,
    SchemaError,
    ConfigError,
)

logger = logging.getLogger(__name__)

DEFAULT_LAG = 3
DEFAULT_CORRELATION_THRESHOLD = 0.3

RATE_SERIES = frozenset({"cured_rate", "death_rate"})


def is_rate_series(name: str) -> bool:
    return name in RATE_SERIES or name.endswith("_rate")


@dataclass(frozen=True)
class TimeSeries:
    """A named daily series. ``dates`` must be consecutive calendar days."""

    name: str
    dates: tuple[date, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.dates) != len(self.values):
            raise ConfigError(
                f"{self.name}: {len(self.dates)} dates but {len(self.values)} values"
            )
        _check_daily(self.dates)
        if is_rate_series(self.name):
            for d, v in zip(self.dates, self.values):
                if not 0.0 <= v <= 100.0:
                    raise RangeError(f"{self.name} on {d.isoformat()}: rate {v} outside [0, 100]")

    def __len__(self) -> int:
        return len(self.values)

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def _check_daily(dates: Sequence[date]) -> None:
    one_day = timedelta(days=1)
    for prev, cur in zip(dates, dates[1:]):
        if cur <= prev:
            raise OrderingError(f"date {cur.isoformat()} does not follow {prev.isoformat()}")
        if cur - prev != one_day:
            raise GapError(f"missing day(s) between {prev.isoformat()} and {cur.isoformat()}")


@dataclass(frozen=True)
class SupervisedDataset:
    """Feature rows paired with a real (or class-label) target."""

    feature_names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    lag: int = 0
    target_name: str = "target"
    dates: tuple[date, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, len(self.feature_names))
        y = np.asarray(self.y, dtype=float)
        if X.shape[1] != len(self.feature_names):
            raise ConfigError(
                f"rows have {X.shape[1]} features, expected {len(self.feature_names)}"
            )
        if X.shape[0] != y.shape[0]:
            raise ConfigError(f"{X.shape[0]} feature rows but {y.shape[0]} targets")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    def __len__(self) -> int:
        return self.y.shape[0]

    @property
    def rows(self) -> list[tuple[tuple[float, ...], float]]:
        return [(tuple(map(float, x)), float(t)) for x, t in zip(self.X, self.y)]

    def subset(self, index) -> "SupervisedDataset":
        idx = np.arange(len(self))[index]
        dates = None if self.dates is None else tuple(self.dates[i] for i in idx)
        return SupervisedDataset(
            self.feature_names, self.X[idx], self.y[idx], self.lag, self.target_name, dates
        )

    def select(self, names: Iterable[str]) -> "SupervisedDataset":
        names = list(names)
        cols = [self.feature_names.index(n) for n in names]
        return SupervisedDataset(
            tuple(names), self.X[:, cols], self.y, self.lag, self.target_name, self.dates
        )


def chronological_split(
    data: SupervisedDataset, train_fraction: float = 0.7
) -> tuple[SupervisedDataset, SupervisedDataset]:
    """Split without shuffling; the first ``train_fraction`` of rows train."""
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(data)
    cut = int(round(n * train_fraction))
    cut = min(max(cut, 1), n - 1) if n >= 2 else n
    return data.subset(slice(0, cut)), data.subset(slice(cut, n))


def _parse_date(text: str, line: int) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError:
        raise ParseError(line, f"unparseable date {text!r}") from None


def _parse_value(text: str, column: str, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(line, f"column {column!r}: unparseable value {text!r}") from None
    if not math.isfinite(v):
        raise ParseError(line, f"column {column!r}: non-finite value {text!r}")
    return v


def load_csv(path: str | Path, schema: Sequence[str] | None = None) -> dict[str, TimeSeries]:
    """Read a daily CSV (first column ``date``) into one series per column.

    ``schema`` lists columns that must be present; extra columns are loaded too.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError("date", f"{path}: empty file, no header row") from None
        if not header or header[0] != "date":
            raise SchemaError("date", f"{path}: first column must be 'date'")
        for col in schema or ():
            if col not in header:
                raise SchemaError(col)
        columns = header[1:]
        dates: list[date] = []
        values: list[list[float]] = [[] for _ in columns]
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(line, f"expected {len(header)} fields, got {len(row)}")
            dates.append(_parse_date(row[0], line))
            for j, col in enumerate(columns):
                values[j].append(_parse_value(row[j + 1], col, line))

    _check_daily(dates)
    return {
        col: TimeSeries(col, tuple(dates), tuple(vals)) for col, vals in zip(columns, values)
    }


def write_csv(path: str | Path, series: Sequence[TimeSeries]) -> None:
    """Inverse of :func:`load_csv` for series sharing one date axis."""
    dates = series[0].dates
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", *(s.name for s in series)])
        for i, d in enumerate(dates):
            w.writerow([d.isoformat(), *(repr(float(s.values[i])) for s in series)])


def lag_embed(series: TimeSeries, lag: int = DEFAULT_LAG) -> SupervisedDataset:
    """Row ``t`` holds ``v[t-lag .. t-1]`` as features and ``v[t]`` as target."""
    if lag < 1:
        raise ConfigError(f"lag must be a positive integer, got {lag}")
    v = series.array()
    n = v.shape[0]
    if lag >= n:
        raise InsufficientDataError(
            f"{series.name}: {n} observations cannot support lag {lag}"
        )
    X = np.lib.stride_tricks.sliding_window_view(v, lag)[: n - lag]
    names = tuple(f"{series.name}_lag{k}" for k in range(lag, 0, -1))
    return SupervisedDataset(
        names, X.copy(), v[lag:], lag, series.name, series.dates[lag:]
    )


def lag_embed_joint(
    series: Sequence[TimeSeries], target: str, lag: int = DEFAULT_LAG
) -> SupervisedDataset:
    """Multivariate embedding: lags of every series predict one target series."""
    if lag < 1:
        raise ConfigError(f"lag must be a positive integer, got {lag}")
    by_name = {s.name: s for s in series}
    if target not in by_name:
        raise SchemaError(target)
    parts = [lag_embed(s, lag) for s in series]
    X = np.hstack([p.X for p in parts])
    names = tuple(n for p in parts for n in p.feature_names)
    t = by_name[target]
    return SupervisedDataset(names, X, t.array()[lag:], lag, target, t.dates[lag:])


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation; NaN when either side has zero variance."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return math.nan
    return float(dx @ dy) / math.sqrt(sxx * syy)


def correlation_filter(
    dataset: SupervisedDataset, threshold: float = DEFAULT_CORRELATION_THRESHOLD
) -> SupervisedDataset:
    """Keep features with ``|pearson(feature, target)| >= threshold``.

    Dropped features are reported as ``DROPPED <feature> <reason>`` lines on
    the module logger.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ConfigError(f"threshold must be in [0, 1], got {threshold}")
    if len(dataset) == 0:
        raise InsufficientDataError("correlation_filter needs a non-empty dataset")
    keep = []
    for j, name in enumerate(dataset.feature_names):
        col = dataset.X[:, j]
        if np.ptp(col) == 0.0:
            logger.warning("DROPPED %s zero-variance", name)
            continue
        r = pearson(col, dataset.y)
        if math.isnan(r):
            logger.warning("DROPPED %s undefined-correlation", name)
            continue
        # tolerance keeps |r| == 1 features under threshold 1 despite rounding
        if abs(r) + 1e-12 < threshold:
            logger.warning("DROPPED %s below-threshold |r|=%.6g", name, abs(r))
            continue
        keep.append(name)
    if not keep:
        raise EmptySelectionError(f"no feature reaches |r| >= {threshold}")
    return dataset.select(keep)

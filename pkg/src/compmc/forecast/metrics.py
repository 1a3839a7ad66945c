from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from ..errors import ConfigError, DomainError


def rmse_log_median(trial_sets: Iterable[Sequence[float] | float], actuals: Sequence[float]) -> float:
    """Root mean square of ``log(median(trials_i) / actual_i)`` over time points.

    A scalar in place of a trial set is treated as a one-element set, which
    lets deterministic forecasts be scored on the same footing.
    """
    sets = list(trial_sets)
    actuals = [float(a) for a in actuals]
    if len(sets) != len(actuals):
        raise ConfigError(f"{len(sets)} trial sets but {len(actuals)} actual values")
    if not sets:
        raise ConfigError("rmse_log_median needs at least one time point")
    errs = []
    for i, (trials, actual) in enumerate(zip(sets, actuals)):
        med = float(np.median(np.atleast_1d(np.asarray(trials, dtype=float))))
        if not actual > 0.0:
            raise DomainError(f"time point {i}: actual {actual} is not positive")
        if not med > 0.0:
            raise DomainError(f"time point {i}: median {med} is not positive")
        errs.append(math.log(med / actual))
    return math.sqrt(math.fsum(e * e for e in errs) / len(errs))


def rmse(pred: Sequence[float], actual: Sequence[float]) -> float:
    p = np.asarray(pred, dtype=float)
    a = np.asarray(actual, dtype=float)
    if p.shape != a.shape or p.size == 0:
        raise ConfigError("rmse needs equal-length, non-empty inputs")
    return float(np.sqrt(np.mean((p - a) ** 2)))

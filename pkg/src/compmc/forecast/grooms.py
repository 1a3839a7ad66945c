"""Candidate forecaster selection by holdout error."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from ..errors import CompMCError, ConfigError, SelectionError
from ..ingest import SupervisedDataset, TimeSeries, chronological_split, lag_embed
from .horizon import ForecastResult, predict_horizon
from .linear import fit_linear
from .metrics import rmse, rmse_log_median
from .pnn import fit_pnn

logger = logging.getLogger(__name__)

PNN_TRAIN_FRACTION = 0.7


@dataclass(frozen=True)
class Candidate:
    id: str
    kind: str  # "pnn" | "linear"
    params: Mapping[str, Any] = field(default_factory=dict)


DEFAULT_CANDIDATES = (Candidate("pnn", "pnn"), Candidate("linreg", "linear"))


def fit_candidate(candidate: Candidate, train: SupervisedDataset):
    if candidate.kind == "linear":
        return fit_linear(train)
    if candidate.kind == "pnn":
        params = dict(candidate.params)
        frac = params.pop("train_fraction", PNN_TRAIN_FRACTION)
        fit_part, val_part = chronological_split(train, frac)
        return fit_pnn(fit_part, val_part, **params)
    raise ConfigError(f"unknown forecaster kind {candidate.kind!r}")


@dataclass(frozen=True)
class RankEntry:
    id: str
    score: float
    rank: int


@dataclass
class Selection:
    winner: str
    ranking: list[RankEntry]
    metric: str
    models: dict[str, Any] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)


def _score(model, holdout: SupervisedDataset, metric: str) -> float:
    pred = model.predict(holdout.X)
    if metric == "log_median":
        return rmse_log_median(list(pred), list(holdout.y))
    return rmse(pred, holdout.y)


def grooms_select(
    candidates: Sequence[Candidate],
    train: SupervisedDataset,
    holdout: SupervisedDataset,
    metric: str = "auto",
    max_workers: int = 1,
) -> Selection:
    """Fit every candidate on ``train`` and rank by holdout error.

    ``metric`` is ``"log_median"``, ``"rmse"`` or ``"auto"`` (log-median when
    every holdout target is positive). Lowest score wins; exact ties go to
    the earlier candidate. Candidates that fail to fit or score are left out
    of the ranking and listed in ``failures``.
    """
    if not candidates:
        raise ConfigError("grooms_select needs at least one candidate")
    if len(holdout) == 0:
        raise ConfigError("holdout set is empty")
    ids = [c.id for c in candidates]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"duplicate candidate ids in {ids}")
    if metric == "auto":
        metric = "log_median" if bool(np.all(holdout.y > 0)) else "rmse"
    if metric not in ("log_median", "rmse"):
        raise ConfigError(f"unknown metric {metric!r}")

    def run(c: Candidate):
        try:
            model = fit_candidate(c, train)
            score = _score(model, holdout, metric)
            if not math.isfinite(score):
                raise SelectionError("non-finite holdout score")
            return model, score, None
        except (CompMCError, np.linalg.LinAlgError) as exc:
            return None, math.nan, f"{type(exc).__name__}: {exc}"

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(run, candidates))
    else:
        outcomes = [run(c) for c in candidates]

    models, failures, scored = {}, {}, []
    for pos, (c, (model, score, err)) in enumerate(zip(candidates, outcomes)):
        if err is not None:
            logger.warning("candidate %s excluded: %s", c.id, err)
            failures[c.id] = err
            continue
        models[c.id] = model
        scored.append((score, pos, c.id))
    if not scored:
        raise SelectionError(f"every candidate failed: {failures}")
    scored.sort()
    ranking = [RankEntry(cid, score, r) for r, (score, _, cid) in enumerate(scored, start=1)]
    return Selection(ranking[0].id, ranking, metric, models, failures)


@dataclass
class SeriesForecast:
    series: str
    result: ForecastResult
    model: Any
    selection: Selection


def forecast_series(
    series: TimeSeries,
    horizon: int,
    lag: int = 3,
    model: str = "grooms",
    candidates: Sequence[Candidate] = DEFAULT_CANDIDATES,
    holdout_fraction: float = 0.3,
    metric: str = "auto",
) -> SeriesForecast:
    """Select (or take) a forecaster for one series, refit on all rows and forecast.

    ``model`` is ``"grooms"`` to choose among ``candidates``, or the id of a
    single candidate. The ranking is always computed on a chronological
    holdout so every run reports comparable errors.
    """
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    data = lag_embed(series, lag)
    pool = list(candidates)
    if model != "grooms":
        pool = [c for c in candidates if c.id == model or c.kind == model]
        if not pool:
            raise ConfigError(f"unknown model {model!r}")
        pool = pool[:1]
    train, holdout = chronological_split(data, 1.0 - holdout_fraction)
    selection = grooms_select(pool, train, holdout, metric=metric)
    winner = next(c for c in pool if c.id == selection.winner)
    final = fit_candidate(winner, data)
    seed = series.values[-lag:]
    result = predict_horizon(final, seed, horizon, model_id=winner.id)
    result = ForecastResult(
        result.model_id, result.horizon, result.values, result.training_rmse, series.name
    )
    return SeriesForecast(series.name, result, final, selection)

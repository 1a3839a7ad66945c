"""Ordinary least squares baseline forecaster."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import RankDeficiencyError
from ..ingest import SupervisedDataset


@dataclass(frozen=True)
class LinearModel:
    feature_names: tuple[str, ...]
    intercept: float
    slopes: tuple[float, ...]
    training_rmse: float = math.nan

    kind = "linear"

    @property
    def n_features(self) -> int:
        return len(self.slopes)

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self.intercept + X @ np.asarray(self.slopes)


def fit_linear(train: SupervisedDataset) -> LinearModel:
    """Least-squares fit of ``y ~ intercept + X @ slopes``.

    Raises :class:`RankDeficiencyError` when the design matrix (with the
    intercept column) is not of full column rank.
    """
    n, k = train.X.shape
    if n < k + 1:
        raise RankDeficiencyError(f"{n} rows cannot determine {k + 1} coefficients")
    A = np.column_stack([np.ones(n), train.X])
    # column scaling keeps the rank test meaningful for large-valued features
    scale = np.abs(A).max(axis=0)
    scale[scale == 0.0] = 1.0
    As = A / scale
    if np.linalg.matrix_rank(As) < k + 1:
        raise RankDeficiencyError("design matrix is singular")
    coef, *_ = np.linalg.lstsq(As, train.y, rcond=None)
    coef = coef / scale
    resid = train.y - A @ coef
    return LinearModel(
        feature_names=tuple(train.feature_names),
        intercept=float(coef[0]),
        slopes=tuple(float(c) for c in coef[1:]),
        training_rmse=float(np.sqrt(np.mean(resid**2))),
    )

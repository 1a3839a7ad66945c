"""Recursive multi-step forecasting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..errors import ConfigError, PropagationError


@dataclass(frozen=True)
class ForecastResult:
    model_id: str
    horizon: int
    values: tuple[float, ...]
    training_rmse: float = 0.0
    series: str = ""

    def __post_init__(self):
        if len(self.values) != self.horizon:
            raise ConfigError(f"{len(self.values)} values for horizon {self.horizon}")


def predict_horizon(
    model, seed_window: Sequence[float], horizon: int, model_id: str | None = None
) -> ForecastResult:
    """Forecast ``horizon`` steps, feeding each prediction back into the window.

    ``seed_window`` holds the last ``lag`` observations, oldest first.
    """
    if horizon < 0:
        raise ConfigError(f"horizon must be non-negative, got {horizon}")
    window = [float(v) for v in seed_window]
    if len(window) != model.n_features:
        raise ConfigError(
            f"seed window has {len(window)} values, model expects {model.n_features}"
        )
    out = []
    for step in range(1, horizon + 1):
        value = float(model.predict(np.asarray(window)[None, :])[0])
        if not math.isfinite(value):
            raise PropagationError(step, "prediction is not finite")
        out.append(value)
        window = window[1:] + [value]
    return ForecastResult(
        model_id=model_id or model.kind,
        horizon=horizon,
        values=tuple(out),
        training_rmse=float(getattr(model, "training_rmse", 0.0)),
    )


def predict_horizon_joint(
    models: Mapping[str, object],
    seed_windows: Mapping[str, Sequence[float]],
    order: Sequence[str],
    horizon: int,
) -> dict[str, ForecastResult]:
    """Joint recursion for multivariate models.

    Each model takes the concatenated windows of ``order`` (as produced by
    ``lag_embed_joint``); all series advance one step together.
    """
    if horizon < 0:
        raise ConfigError(f"horizon must be non-negative, got {horizon}")
    windows = {name: [float(v) for v in seed_windows[name]] for name in order}
    outputs: dict[str, list[float]] = {name: [] for name in models}
    for step in range(1, horizon + 1):
        x = np.asarray([v for name in order for v in windows[name]])[None, :]
        nxt = {}
        for name, model in models.items():
            value = float(model.predict(x)[0])
            if not math.isfinite(value):
                raise PropagationError(step, f"{name}: prediction is not finite")
            nxt[name] = value
            outputs[name].append(value)
        for name in order:
            if name in nxt:
                windows[name] = windows[name][1:] + [nxt[name]]
            else:
                raise ConfigError(f"series {name!r} in the joint window has no model")
    return {
        name: ForecastResult(
            model_id=models[name].kind,
            horizon=horizon,
            values=tuple(vals),
            training_rmse=float(getattr(models[name], "training_rmse", 0.0)),
            series=name,
        )
        for name, vals in outputs.items()
    }

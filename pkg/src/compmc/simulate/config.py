"""Simulation config documents.

::

    {"model": "covid_direct_cost", "horizon": 14, "trials": 10000, "seed": 42,
     "levels": [0.5, 0.8, 0.98],
     "bindings": [
        {"variable": "ndic", "source": {"forecast": "ndic"}},
        {"variable": "cured_rate", "source": {"deterministic": [3.1, 3.4]}},
        {"variable": "days_for_recovery", "source": {"uniform": {"min": 11, "max": 26}}},
        {"variable": "ppi_per_day", "source": {"growth_normal":
            {"initial": 1000, "daily_rate": 0.05, "stdev": 9}}, "clamp_negative": true}]}

``{"forecast": name}`` refers to a deterministic series supplied by the
caller (usually the forecast stage's output); every other source is a
distribution literal.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Sequence

from ..errors import BindingError, ConfigError
from ..stochastic import parse_distribution
from .engine import DEFAULT_LEVELS, Deterministic, InputBinding, SimulationSpec, Stochastic


def _int(doc: Mapping, key: str, default=None) -> int:
    if key not in doc:
        if default is None:
            raise ConfigError(f"simulation config: missing field {key!r}")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"simulation config: {key!r} must be an integer, got {v!r}")
    return v


def parse_binding(doc: Any, forecasts: Mapping[str, Sequence[float]] | None = None) -> InputBinding:
    if not isinstance(doc, Mapping) or "variable" not in doc or "source" not in doc:
        raise ConfigError(f"binding needs 'variable' and 'source': {doc!r}")
    var = str(doc["variable"])
    src = doc["source"]
    if isinstance(src, Mapping) and "forecast" in src:
        name = src["forecast"]
        if forecasts is None or name not in forecasts:
            raise BindingError(f"{var}: no forecast series named {name!r} was supplied")
        return InputBinding(var, Deterministic(tuple(forecasts[name]), origin=f"forecast:{name}"))
    if isinstance(src, Mapping) and "deterministic" in src:
        values = src["deterministic"]
        if not isinstance(values, list) or not values:
            raise ConfigError(f"{var}: 'deterministic' must be a non-empty list")
        try:
            return InputBinding(var, Deterministic(tuple(float(v) for v in values), origin="literal"))
        except (TypeError, ValueError):
            raise ConfigError(f"{var}: deterministic values must be numbers") from None
    clamp = doc.get("clamp_negative", True)
    if not isinstance(clamp, bool):
        raise ConfigError(f"{var}: clamp_negative must be true or false")
    try:
        schedule = parse_distribution(src)
    except ConfigError as exc:
        raise ConfigError(f"{var}: {exc}") from None
    return InputBinding(var, Stochastic(schedule, clamp))


def parse_config(
    doc: Mapping[str, Any],
    forecasts: Mapping[str, Sequence[float]] | None = None,
    **overrides,
) -> SimulationSpec:
    """Build a :class:`SimulationSpec`; ``overrides`` (trials, seed, horizon,
    levels) replace document values when not ``None``."""
    if not isinstance(doc, Mapping):
        raise ConfigError("simulation config must be a JSON object")
    if "model" not in doc:
        raise ConfigError("simulation config: missing field 'model'")
    bindings = doc.get("bindings")
    if not isinstance(bindings, list):
        raise ConfigError("simulation config: 'bindings' must be a list")
    levels = doc.get("levels", list(DEFAULT_LEVELS))
    if not isinstance(levels, list) or not all(isinstance(v, (int, float)) for v in levels):
        raise ConfigError("simulation config: 'levels' must be a list of numbers")
    fields = {
        "model": str(doc["model"]),
        "bindings": tuple(parse_binding(b, forecasts) for b in bindings),
        "horizon": _int(doc, "horizon"),
        "trials": _int(doc, "trials", 10_000),
        "seed": _int(doc, "seed", 0),
        "levels": tuple(float(v) for v in levels),
    }
    for key, value in overrides.items():
        if value is not None:
            fields[key] = tuple(value) if key == "levels" else value
    levels = fields["levels"]
    fields["levels"] = tuple(sorted(set(DEFAULT_LEVELS) | set(levels)))
    return SimulationSpec(**fields)


def load_config(path: str | Path, forecasts=None, **overrides) -> SimulationSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(doc, forecasts, **overrides)

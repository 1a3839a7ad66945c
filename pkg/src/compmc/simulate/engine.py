"""Seeded composite Monte Carlo runs.

Deterministic bindings feed one forecast value per day; stochastic bindings
draw from their distribution on the counter-based stream
``(seed, trial, variable, day)``. Because every draw is addressed rather
than generated sequentially, trials can be split across worker threads in
any way and still produce the same matrix bit for bit.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .. import costmodel
from ..errors import BindingError, ConfigError, SimulationError
from ..stochastic import FixedSchedule, Normal, PointMass, Schedule, uniform_open, variable_id

logger = logging.getLogger(__name__)

MAX_ABORT_FRACTION = 0.001
DEFAULT_LEVELS = (0.50, 0.80, 0.98)


@dataclass(frozen=True)
class Deterministic:
    values: tuple[float, ...]
    origin: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


@dataclass(frozen=True)
class Stochastic:
    schedule: Schedule
    clamp_negative: bool = True


@dataclass(frozen=True)
class InputBinding:
    variable: str
    source: Union[Deterministic, Stochastic]


@dataclass(frozen=True)
class ModelDef:
    """A per-day model: maps input arrays (one entry per trial) to outcomes."""

    name: str
    inputs: tuple[str, ...]
    fn: Callable[[Mapping[str, np.ndarray]], np.ndarray]


MODELS: dict[str, ModelDef] = {}


def register_model(name: str, inputs: Sequence[str], fn) -> ModelDef:
    model = ModelDef(name, tuple(inputs), fn)
    MODELS[name] = model
    return model


register_model(costmodel.MODEL_NAME, costmodel.INPUTS, costmodel.simulation_model)


@dataclass(frozen=True)
class SimulationSpec:
    model: str
    bindings: tuple[InputBinding, ...]
    horizon: int
    trials: int
    seed: int
    levels: tuple[float, ...] = DEFAULT_LEVELS

    def __post_init__(self):
        object.__setattr__(self, "bindings", tuple(self.bindings))
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        for lv in self.levels:
            if not 0.0 < lv <= 1.0:
                raise ConfigError(f"certainty level {lv} outside (0, 1]")

    def resolve_model(self) -> ModelDef:
        try:
            model = MODELS[self.model]
        except KeyError:
            raise ConfigError(f"model {self.model!r} is not registered") from None
        seen: dict[str, int] = {}
        for b in self.bindings:
            seen[b.variable] = seen.get(b.variable, 0) + 1
        dup = sorted(v for v, n in seen.items() if n > 1)
        if dup:
            raise BindingError(f"variables bound more than once: {', '.join(dup)}")
        missing = [v for v in model.inputs if v not in seen]
        if missing:
            raise BindingError(f"unbound model variables: {', '.join(missing)}")
        for b in self.bindings:
            if isinstance(b.source, Deterministic) and len(b.source.values) < self.horizon:
                raise BindingError(
                    f"{b.variable}: deterministic series covers {len(b.source.values)} days, "
                    f"horizon is {self.horizon}"
                )
        return model


@dataclass
class TrialMatrix:
    """All trial outcomes plus every input value that produced them.

    ``outcomes`` and each ``draws`` entry are ``trials x horizon``. Rows
    flagged in ``aborted`` had a non-finite outcome on some day.
    """

    outcomes: np.ndarray
    draws: dict[str, np.ndarray]
    aggregate: np.ndarray
    aborted: np.ndarray
    stochastic: tuple[str, ...]
    deterministic: tuple[str, ...]
    clamped: dict[str, int] = field(default_factory=dict)

    @property
    def n_trials(self) -> int:
        return self.outcomes.shape[0]

    @property
    def horizon(self) -> int:
        return self.outcomes.shape[1]

    @property
    def valid(self) -> np.ndarray:
        return ~self.aborted


def _left_sum(outcomes: np.ndarray) -> np.ndarray:
    # left-to-right per row, identical to Python's sum() over the day values
    total = np.zeros(outcomes.shape[0])
    for d in range(outcomes.shape[1]):
        total = total + outcomes[:, d]
    return total


def _run_chunk(spec: SimulationSpec, model: ModelDef, var_ids, lo: int, hi: int):
    idx = np.arange(lo, hi, dtype=np.uint64)
    n = hi - lo
    outcomes = np.empty((n, spec.horizon))
    draws = {b.variable: np.empty((n, spec.horizon)) for b in spec.bindings}
    clamped = {b.variable: 0 for b in spec.bindings}
    for d in range(spec.horizon):
        inputs = {}
        for b in spec.bindings:
            src = b.source
            if isinstance(src, Deterministic):
                x = np.full(n, src.values[d])
            else:
                dist = src.schedule.at(d)
                x = dist.from_uniform(uniform_open(spec.seed, idx, var_ids[b.variable], d))
                if src.clamp_negative and isinstance(dist, Normal):
                    neg = x < 0.0
                    if neg.any():
                        clamped[b.variable] += int(neg.sum())
                        x = np.where(neg, 0.0, x)
            draws[b.variable][:, d] = x
            inputs[b.variable] = x
        with np.errstate(all="ignore"):
            out = np.asarray(model.fn(inputs), dtype=float)
        outcomes[:, d] = np.broadcast_to(out, (n,))
    return outcomes, draws, clamped


def simulate_trials(spec: SimulationSpec, workers: int = 1, chunk_size: int | None = None) -> TrialMatrix:
    """Evaluate every trial of ``spec``; see :func:`run_simulation`."""
    model = spec.resolve_model()
    var_ids = {b.variable: variable_id(b.variable) for b in spec.bindings}
    if len(set(var_ids.values())) != len(var_ids):
        raise BindingError("two variable names hash to the same stream id; rename one")
    workers = max(1, int(workers))
    if chunk_size is None:
        chunk_size = max(1, math.ceil(spec.trials / workers))
    bounds = [(lo, min(lo + chunk_size, spec.trials)) for lo in range(0, spec.trials, chunk_size)]

    if workers == 1:
        parts = [_run_chunk(spec, model, var_ids, lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _run_chunk(spec, model, var_ids, *b), bounds))

    outcomes = np.concatenate([p[0] for p in parts], axis=0)
    draws = {v: np.concatenate([p[1][v] for p in parts], axis=0) for v in var_ids}
    clamped = {v: sum(p[2][v] for p in parts) for v in var_ids}
    for v, c in clamped.items():
        if c:
            logger.warning("%s: %d negative normal draws clamped to 0", v, c)
    aborted = ~np.all(np.isfinite(outcomes), axis=1)
    stochastic = tuple(b.variable for b in spec.bindings if isinstance(b.source, Stochastic))
    deterministic = tuple(b.variable for b in spec.bindings if isinstance(b.source, Deterministic))
    return TrialMatrix(
        outcomes=outcomes,
        draws=draws,
        aggregate=_left_sum(outcomes),
        aborted=aborted,
        stochastic=stochastic,
        deterministic=deterministic,
        clamped=clamped,
    )


def run_simulation(spec: SimulationSpec, workers: int = 1, chunk_size: int | None = None):
    """Run all trials and summarise the per-trial horizon totals.

    Returns ``(TrialMatrix, OutcomeSummary)``. Trials with a non-finite
    outcome are aborted and excluded from the summary; more than 0.1% of
    them raises :class:`SimulationError`.
    """
    from .summary import summarize

    tm = simulate_trials(spec, workers, chunk_size)
    n_abort = int(tm.aborted.sum())
    if n_abort > MAX_ABORT_FRACTION * spec.trials:
        raise SimulationError(
            f"{n_abort} of {spec.trials} trials aborted (limit {MAX_ABORT_FRACTION:.1%})"
        )
    if n_abort:
        logger.warning("%d trials aborted and excluded", n_abort)
    return tm, summarize(tm.aggregate[tm.valid], spec.levels, n_aborted=n_abort)


def constant(value: float) -> Stochastic:
    """Stochastic binding that always draws ``value``."""
    return Stochastic(FixedSchedule(PointMass(value)))

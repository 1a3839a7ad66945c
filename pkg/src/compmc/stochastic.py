"""Distributions and counter-based random streams.

Every draw is a pure function of ``(seed, trial, variable, day)``: the
Philox4x32-10 block cipher maps that counter to 128 random bits, two words of
which become one double in (0, 1). Normal variates come from the inverse
normal CDF applied to that double, so no generator state is ever carried
between draws and trials can be evaluated in any order.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Union

import numpy as np
from scipy.special import ndtri

from .errors import ConfigError

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
PHILOX_ROUNDS = 10


def philox4x32(counter, key, rounds: int = PHILOX_ROUNDS) -> np.ndarray:
    """Philox4x32 block function, vectorised over leading dimensions.

    ``counter`` has shape ``(..., 4)`` and ``key`` shape ``(..., 2)`` (both
    32-bit words, broadcastable). Returns uint32 words of shape ``(..., 4)``.
    """
    ctr = np.asarray(counter, dtype=np.uint64) & _MASK32
    k = np.asarray(key, dtype=np.uint64) & _MASK32
    c0, c1, c2, c3 = (ctr[..., i] for i in range(4))
    k0, k1 = k[..., 0], k[..., 1]
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & _MASK32
            k1 = (k1 + _W1) & _MASK32
        p0 = c0 * _M0  # < 2**64, exact in uint64
        p1 = c2 * _M1
        hi0, lo0 = p0 >> _SHIFT32, p0 & _MASK32
        hi1, lo1 = p1 >> _SHIFT32, p1 & _MASK32
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    c0, c1, c2, c3 = np.broadcast_arrays(c0, c1, c2, c3)
    return np.stack([c0, c1, c2, c3], axis=-1).astype(np.uint32)


def variable_id(name: str) -> int:
    """Stable 32-bit id for a variable name (independent of binding order)."""
    return int.from_bytes(hashlib.blake2b(name.encode("utf-8"), digest_size=4).digest(), "little")


def _key_words(seed: int) -> tuple[int, int]:
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed & 0xFFFFFFFF, seed >> 32


def uniform_open(seed: int, trials, var_id: int, day: int, block: int = 0) -> np.ndarray:
    """Doubles in (0, 1) for each trial index, one per (trial, var, day, block) counter.

    53 random bits are taken from the first two output words and centred in
    their bucket, so neither 0 nor 1 can occur.
    """
    trials = np.asarray(trials, dtype=np.uint64)
    ctr = np.empty(trials.shape + (4,), dtype=np.uint64)
    ctr[..., 0] = trials
    ctr[..., 1] = day
    ctr[..., 2] = var_id
    ctr[..., 3] = block
    words = philox4x32(ctr, np.array(_key_words(seed), dtype=np.uint64)).astype(np.uint64)
    bits = ((words[..., 0] >> np.uint64(5)) << np.uint64(26)) | (words[..., 1] >> np.uint64(6))
    return (bits.astype(np.float64) + 0.5) * 2.0**-53


@dataclass(frozen=True)
class RngStream:
    """Identifies one reproducible stream; ``variable`` may be a name or an id."""

    seed: int
    trial: int
    variable: Union[int, str]
    day: int

    @property
    def var_id(self) -> int:
        return self.variable if isinstance(self.variable, int) else variable_id(self.variable)

    def uniform(self, index: int = 0) -> float:
        """``index``-th double of the stream."""
        return float(uniform_open(self.seed, [self.trial], self.var_id, self.day, index)[0])


class Distribution:
    kind = "distribution"

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def to_literal(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Normal(Distribution):
    mu: float
    sigma: float
    kind = "normal"

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)) or self.sigma < 0:
            raise ConfigError(f"Normal needs finite mean and stdev >= 0, got ({self.mu}, {self.sigma})")

    def from_uniform(self, u):
        if self.sigma == 0.0:
            return np.full(np.shape(u), self.mu, dtype=float)
        return self.mu + self.sigma * ndtri(u)

    def mean(self) -> float:
        return self.mu

    def to_literal(self) -> dict:
        return {"normal": {"mean": self.mu, "stdev": self.sigma}}


@dataclass(frozen=True)
class Uniform(Distribution):
    low: float
    high: float
    kind = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high)) or self.low > self.high:
            raise ConfigError(f"Uniform needs finite min <= max, got ({self.low}, {self.high})")

    def from_uniform(self, u):
        x = self.low + (self.high - self.low) * np.asarray(u, dtype=float)
        return np.clip(x, self.low, self.high)

    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    def to_literal(self) -> dict:
        return {"uniform": {"min": self.low, "max": self.high}}


@dataclass(frozen=True)
class PointMass(Distribution):
    value: float
    kind = "point"

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ConfigError(f"PointMass needs a finite value, got {self.value}")

    def from_uniform(self, u):
        return np.full(np.shape(u), self.value, dtype=float)

    def mean(self) -> float:
        return self.value

    def to_literal(self) -> dict:
        return {"point": self.value}


def sample(dist: Distribution, stream: RngStream) -> float:
    return float(dist.from_uniform(np.array([stream.uniform()]))[0])


def growth_normal(initial: float, daily_rate: float, day: int, stdev: float) -> Normal:
    """Normal whose mean compounds at ``daily_rate`` per day from ``initial``."""
    if not initial > 0:
        raise ConfigError(f"initial must be > 0, got {initial}")
    if not daily_rate > -1:
        raise ConfigError(f"daily_rate must be > -1, got {daily_rate}")
    if day < 0:
        raise ConfigError(f"day must be >= 0, got {day}")
    return Normal(initial * (1.0 + daily_rate) ** day, stdev)


@dataclass(frozen=True)
class GrowthSchedule:
    """Per-day :func:`growth_normal`; day 0 is the first forecast day."""

    initial: float
    daily_rate: float
    stdev: float

    def __post_init__(self):
        growth_normal(self.initial, self.daily_rate, 0, self.stdev)

    def at(self, day: int) -> Normal:
        return growth_normal(self.initial, self.daily_rate, day, self.stdev)

    def to_literal(self) -> dict:
        return {
            "growth_normal": {"initial": self.initial, "daily_rate": self.daily_rate, "stdev": self.stdev}
        }


@dataclass(frozen=True)
class FixedSchedule:
    dist: Distribution

    def at(self, day: int) -> Distribution:
        return self.dist

    def to_literal(self) -> dict:
        return self.dist.to_literal()


@dataclass(frozen=True)
class DailySchedule:
    """Explicit list of distributions, one per day."""

    days: tuple[Distribution, ...]

    def at(self, day: int) -> Distribution:
        if not 0 <= day < len(self.days):
            raise ConfigError(f"schedule covers {len(self.days)} days, day {day} requested")
        return self.days[day]

    def to_literal(self) -> dict:
        return {"daily": [d.to_literal() for d in self.days]}


Schedule = Union[GrowthSchedule, FixedSchedule, DailySchedule]


def _num(doc: Mapping, key: str, ctx: str) -> float:
    try:
        return float(doc[key])
    except KeyError:
        raise ConfigError(f"{ctx}: missing field {key!r}") from None
    except (TypeError, ValueError):
        raise ConfigError(f"{ctx}: field {key!r} must be a number") from None


def parse_distribution(doc: Any) -> Schedule:
    """Build a schedule from a config literal.

    Accepted forms: ``{"normal": {"mean", "stdev"}}``, ``{"uniform": {"min",
    "max"}}``, ``{"growth_normal": {"initial", "daily_rate", "stdev"}}``,
    ``{"point": v}`` and ``{"daily": [literal, ...]}``.
    """
    if not isinstance(doc, Mapping) or len(doc) != 1:
        raise ConfigError(f"distribution literal must be a single-key object, got {doc!r}")
    (kind, body), = doc.items()
    if kind == "normal":
        return FixedSchedule(Normal(_num(body, "mean", kind), _num(body, "stdev", kind)))
    if kind == "uniform":
        return FixedSchedule(Uniform(_num(body, "min", kind), _num(body, "max", kind)))
    if kind == "point":
        try:
            return FixedSchedule(PointMass(float(body)))
        except (TypeError, ValueError):
            raise ConfigError(f"point: value must be a number, got {body!r}") from None
    if kind == "growth_normal":
        return GrowthSchedule(
            _num(body, "initial", kind), _num(body, "daily_rate", kind), _num(body, "stdev", kind)
        )
    if kind == "daily":
        days = []
        for item in body:
            sched = parse_distribution(item)
            if not isinstance(sched, FixedSchedule):
                raise ConfigError("daily schedules must list plain distributions")
            days.append(sched.dist)
        return DailySchedule(tuple(days))
    raise ConfigError(f"unknown distribution kind {kind!r}")


DistributionFactory = Callable[[int], Distribution]

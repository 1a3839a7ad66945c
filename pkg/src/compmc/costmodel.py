"""Direct daily cost of quarantine and isolation.

    recovery   = cured/(cured+death) * ndic * ppi * days_for_recovery
    death      = death/(cured+death) * ndic * ppi * days_till_death
    quarantine = ndis * ppq
    total      = quarantine + recovery + death

Only the ratio of the two rates enters, so they may be given as fractions or
as percentages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError, DegenerateRatesError

MODEL_NAME = "covid_direct_cost"

INPUTS = (
    "ndic",
    "ndis",
    "cured_rate",
    "death_rate",
    "ppi_per_day",
    "ppq_per_day",
    "days_for_recovery",
    "days_till_death",
)

COMPONENTS = (
    "cost_for_quarantine",
    "cost_for_isolation_till_recovery",
    "cost_for_isolation_till_death",
)


@dataclass(frozen=True)
class DayCostInputs:
    ndic: float
    ndis: float
    cured_rate: float
    death_rate: float
    ppi_per_day: float
    ppq_per_day: float
    days_for_recovery: float
    days_till_death: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v) or v < 0:
                raise ConfigError(f"{f.name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class DayCostBreakdown:
    cost_for_quarantine: float
    cost_for_isolation_till_recovery: float
    cost_for_isolation_till_death: float
    total_daily_cost: float

    @classmethod
    def from_components(cls, quarantine: float, recovery: float, death: float) -> "DayCostBreakdown":
        return cls(quarantine, recovery, death, aggregate_components(quarantine, recovery, death))


def aggregate_components(quarantine: float, recovery: float, death: float) -> float:
    """Total daily cost from its three components, summed left to right."""
    return quarantine + recovery + death


def total_daily_cost(inputs: DayCostInputs) -> DayCostBreakdown:
    rates = inputs.cured_rate + inputs.death_rate
    if rates == 0:
        raise DegenerateRatesError("cured_rate + death_rate is zero")
    w_recover = inputs.cured_rate / rates
    w_death = inputs.death_rate / rates
    recovery = w_recover * (inputs.ndic * inputs.ppi_per_day * inputs.days_for_recovery)
    death = w_death * (inputs.ndic * inputs.ppi_per_day * inputs.days_till_death)
    quarantine = inputs.ndis * inputs.ppq_per_day
    return DayCostBreakdown.from_components(quarantine, recovery, death)


def daily_cost_arrays(
    ndic, ndis, cured_rate, death_rate, ppi_per_day, ppq_per_day, days_for_recovery, days_till_death
) -> dict[str, np.ndarray]:
    """Vectorised :func:`total_daily_cost`.

    Elements with degenerate rates come back as NaN instead of raising, so a
    simulation can count them as aborted trials.
    """
    cured = np.asarray(cured_rate, dtype=float)
    died = np.asarray(death_rate, dtype=float)
    rates = cured + died
    with np.errstate(divide="ignore", invalid="ignore"):
        w_recover = np.where(rates != 0, cured / rates, np.nan)
        w_death = np.where(rates != 0, died / rates, np.nan)
    ndic = np.asarray(ndic, dtype=float)
    ppi = np.asarray(ppi_per_day, dtype=float)
    recovery = w_recover * (ndic * ppi * np.asarray(days_for_recovery, dtype=float))
    death = w_death * (ndic * ppi * np.asarray(days_till_death, dtype=float))
    quarantine = np.asarray(ndis, dtype=float) * np.asarray(ppq_per_day, dtype=float)
    quarantine, recovery, death = np.broadcast_arrays(quarantine, recovery, death)
    return {
        "cost_for_quarantine": quarantine,
        "cost_for_isolation_till_recovery": recovery,
        "cost_for_isolation_till_death": death,
        "total_daily_cost": aggregate_components(quarantine, recovery, death),
    }


def expected_daily_cost(
    ndic: float,
    ndis: float,
    cured_rate: float,
    death_rate: float,
    mean_ppi: float,
    mean_ppq: float,
    mean_days_for_recovery: float,
    mean_days_till_death: float,
) -> float:
    """Closed-form mean of the daily total when ppi, ppq and both durations
    are independent and counts and rates are fixed."""
    rates = cured_rate + death_rate
    if rates == 0:
        raise DegenerateRatesError("cured_rate + death_rate is zero")
    w_r = cured_rate / rates
    w_d = death_rate / rates
    return ndis * mean_ppq + ndic * mean_ppi * (w_r * mean_days_for_recovery + w_d * mean_days_till_death)


def simulation_model(inputs: dict[str, np.ndarray]) -> np.ndarray:
    """Adapter used by the simulation registry."""
    return daily_cost_arrays(**{name: inputs[name] for name in INPUTS})["total_daily_cost"]

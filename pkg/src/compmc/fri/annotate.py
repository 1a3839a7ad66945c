"""Attach simulation sensitivity scores to rule conditions and filter rules by CF."""

from __future__ import annotations

import logging
import re
from dataclasses import replace
from typing import Hashable, Iterable, Mapping, Sequence

from ..errors import ConfigError
from .fuzzy import FuzzyRule

logger = logging.getLogger(__name__)

DEFAULT_DISPLAY_THRESHOLD = 0.82

# rule attributes of the epidemic dataset and the simulation inputs they drive
COVID_ATTRIBUTE_MAP: dict[str, tuple[str, ...]] = {
    "ndic": ("ppi_per_day", "days_for_recovery", "days_till_death"),
    "current_confirmed": ("ppi_per_day", "days_for_recovery", "days_till_death"),
    "cured_rate": ("days_for_recovery",),
    "death_rate": ("days_till_death",),
    "ndis": ("ppq_per_day",),
}

_LAG_PREFIX = re.compile(r"^yester\d+days_")


def base_attribute(name: str) -> str:
    """``yester2days_ndic`` -> ``ndic``."""
    return _LAG_PREFIX.sub("", name)


def majority_vote(stream: Iterable[Hashable]):
    """Strict-majority element of ``stream`` or ``None``.

    One candidate/counter pass picks the only possible winner, a second pass
    checks it really holds more than half of the items.
    """
    items = list(stream)
    candidate, count = None, 0
    for item in items:
        if count == 0:
            candidate, count = item, 1
        elif item == candidate:
            count += 1
        else:
            count -= 1
    if count == 0:
        return None
    hits = sum(1 for item in items if item == candidate)
    return candidate if 2 * hits > len(items) else None


def _totals(sensitivity) -> dict[str, float]:
    out: dict[str, float] = {}
    for e in sensitivity:
        out[e.variable] = out.get(e.variable, 0.0) + abs(e.contribution)
    return out


def _daily_top(sensitivity, variables: Sequence[str]) -> list[str]:
    """Per day, the candidate variable with the largest |contribution|."""
    by_day: dict[int, dict[str, float]] = {}
    for e in sensitivity:
        if e.variable in variables:
            by_day.setdefault(e.day, {})[e.variable] = abs(e.contribution)
    picks = []
    for day in sorted(by_day):
        row = by_day[day]
        # first listed variable wins equal magnitudes
        picks.append(max(variables, key=lambda v: (row.get(v, -1.0), -variables.index(v))))
    return picks


def resolve_attribute(name: str, sensitivity, attribute_map: Mapping[str, Sequence[str]] | None = None):
    """Sensitivity variable standing for rule attribute ``name``.

    Returns ``(variable or None, score, flag or None)`` where ``score`` is the
    variable's |contribution| summed over days.
    """
    totals = _totals(sensitivity)
    amap = COVID_ATTRIBUTE_MAP if attribute_map is None else attribute_map
    base = base_attribute(name)
    if name in totals:
        return name, totals[name], None
    if base in totals:
        return base, totals[base], None
    candidates = [v for v in amap.get(base, ()) if v in totals]
    if not candidates:
        return None, 0.0, f"no-sensitivity:{name}"
    if len(candidates) == 1:
        return candidates[0], totals[candidates[0]], None
    winner = majority_vote(_daily_top(sensitivity, candidates))
    if winner is not None:
        return winner, totals[winner], None
    fallback = max(candidates, key=lambda v: (totals[v], -candidates.index(v)))
    return fallback, totals[fallback], f"no-majority:{name}"


def annotate_and_filter(
    rules: Sequence[FuzzyRule],
    sensitivity,
    threshold: float = DEFAULT_DISPLAY_THRESHOLD,
    attribute_map: Mapping[str, Sequence[str]] | None = None,
) -> list[FuzzyRule]:
    """Annotate every condition with a sensitivity score and keep rules with CF >= ``threshold``.

    The kept rules are sorted by CF, highest first (ties keep input order).
    """
    if not 0.0 <= threshold <= 1.0:
        raise ConfigError(f"threshold must be in [0, 1], got {threshold}")
    sensitivity = list(sensitivity)
    out = []
    for rule in rules:
        scores, sources, flags = [], [], list(rule.flags)
        for cond in rule.conditions:
            var, score, flag = resolve_attribute(cond.name, sensitivity, attribute_map)
            scores.append(score)
            sources.append(var)
            if flag:
                logger.warning("rule attribute %s: %s", cond.name, flag.split(":")[0])
                flags.append(flag)
        out.append(
            replace(
                rule,
                sensitivity_annotations=tuple(scores),
                annotation_sources=tuple(sources),
                flags=tuple(flags),
            )
        )
    kept = [r for r in out if r.certainty_factor >= threshold]
    kept.sort(key=lambda r: -r.certainty_factor)
    return kept

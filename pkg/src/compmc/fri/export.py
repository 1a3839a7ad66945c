"""Plain-text and JSON forms of fuzzy rule sets."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .fuzzy import FuzzyModel, FuzzyRule


def format_number(x: float) -> str:
    if math.isinf(x):
        return "∞" if x > 0 else "-∞"
    return np.format_float_positional(x, precision=4, unique=True, trim="-")


def format_interval(low: float, high: float) -> str:
    closing = ")" if math.isinf(high) else "]"
    return f"({format_number(low)} .. {format_number(high)}{closing}"


def format_rule(rule: FuzzyRule, index: int, target_name: str = "class") -> str:
    """``RULE 1: (ndic = '(-∞ .. 1874.4]') -> win=1 (CF = 0.92)``; intervals are the cores."""
    tests = " & ".join(
        f"({c.name} = '{format_interval(c.fuzzy_set.core_low, c.fuzzy_set.core_high)}')"
        for c in rule.conditions
    )
    return f"RULE {index}: {tests} -> {target_name}={rule.label} (CF = {rule.certainty_factor:.2f})"


def rules_to_text(rules: Sequence[FuzzyRule], target_name: str = "class") -> str:
    return "".join(format_rule(r, i, target_name) + "\n" for i, r in enumerate(rules, start=1))


def _num(x: float):
    # JSON has no infinities; keep them readable as strings
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def rule_to_dict(rule: FuzzyRule) -> dict:
    conds = []
    for k, c in enumerate(rule.conditions):
        item = {
            "attribute": c.name,
            "trapezoid": [_num(v) for v in c.fuzzy_set.to_list()],
        }
        if rule.sensitivity_annotations is not None:
            item["sensitivity"] = rule.sensitivity_annotations[k]
            item["sensitivity_variable"] = rule.annotation_sources[k] if rule.annotation_sources else None
        conds.append(item)
    label = rule.label.item() if isinstance(rule.label, np.generic) else rule.label
    return {
        "label": label,
        "certainty_factor": rule.certainty_factor,
        "conditions": conds,
        "flags": list(rule.flags),
    }


def rules_to_json(rules: Sequence[FuzzyRule], model: FuzzyModel | None = None, target_name: str = "class") -> dict:
    doc = {"target": target_name, "rules": [rule_to_dict(r) for r in rules]}
    if model is not None:
        doc["default_label"] = model.default_label.item() if isinstance(model.default_label, np.generic) else model.default_label
        doc["n_rules_total"] = len(model.rules)
    return doc


def write_rules(path, rules: Sequence[FuzzyRule], target_name: str = "class") -> None:
    Path(path).write_text(rules_to_text(rules, target_name), encoding="utf-8")


def write_rules_json(path, rules: Sequence[FuzzyRule], model: FuzzyModel | None = None, target_name: str = "class") -> None:
    doc = rules_to_json(rules, model, target_name)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")

"""Fuzzy extension of crisp rules, certainty factors and support-based classification.

Each crisp interval becomes the core of a trapezoid whose support is widened
on either side as far as the membership-weighted purity of the rule allows.
A rule's membership is the minimum of its condition memberships.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from ..errors import ConfigError, UndefinedPurityError
from .crisp import DEFAULT_PRUNE_FRACTION, CrispRule, CrispRuleSet, induce_crisp_rules
from .membership import FuzzySet, trapezoid_membership

_TIE_TOL = 1e-12


def purity(phi: float, varpi: float) -> float:
    """Share of membership mass on positives: ``phi / (phi + varpi)``."""
    if phi < 0 or varpi < 0:
        raise ConfigError(f"membership sums must be >= 0, got ({phi}, {varpi})")
    total = phi + varpi
    if total == 0:
        raise UndefinedPurityError("purity is undefined when no instance has membership")
    return phi / total


def weighted_purity(mu: np.ndarray, positive: np.ndarray) -> float:
    mu = np.asarray(mu, dtype=float)
    positive = np.asarray(positive, dtype=bool)
    return purity(math.fsum(mu[positive]), math.fsum(mu[~positive]))


@dataclass(frozen=True)
class FuzzyCondition:
    attribute: int
    name: str
    fuzzy_set: FuzzySet

    def membership(self, X: np.ndarray) -> np.ndarray:
        return trapezoid_membership(self.fuzzy_set, X[:, self.attribute])


@dataclass(frozen=True)
class FuzzyRule:
    conditions: tuple[FuzzyCondition, ...]
    label: Hashable
    certainty_factor: float = math.nan
    sensitivity_annotations: tuple[float, ...] | None = None
    annotation_sources: tuple[str | None, ...] | None = None
    flags: tuple[str, ...] = field(default=(), compare=False)

    def membership(self, X) -> np.ndarray:
        """Rule membership per row (minimum over conditions; 1 for an empty rule)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        mu = np.ones(X.shape[0])
        for c in self.conditions:
            mu = np.minimum(mu, c.membership(X))
        return mu


def _extend_side(values, positive, fs: FuzzySet, side: str) -> FuzzySet:
    """Best support end on one side of ``fs``; ties go to the widest."""
    if side == "low":
        edge = fs.core_low
        if math.isinf(edge):
            return fs
        beyond = np.unique(values[values < edge])[::-1]  # nearest first
        make = lambda c: FuzzySet(c, fs.core_low, fs.core_high, fs.support_high)
    else:
        edge = fs.core_high
        if math.isinf(edge):
            return fs
        beyond = np.unique(values[values > edge])
        make = lambda c: FuzzySet(fs.support_low, fs.core_low, fs.core_high, c)

    best_fs, best_p = None, -math.inf
    for c in [edge, *beyond.tolist()]:
        cand = make(c)
        mu = trapezoid_membership(cand, values)
        try:
            p = weighted_purity(mu, positive)
        except UndefinedPurityError:
            continue
        # later candidates are wider, so >= keeps the widest among ties
        if p > best_p + _TIE_TOL or abs(p - best_p) <= _TIE_TOL:
            best_p = max(p, best_p)
            best_fs = cand
    return best_fs if best_fs is not None else fs


def fuzzify_rule(rule: CrispRule, X, y: Sequence[Hashable]) -> FuzzyRule:
    """Replace each crisp interval of ``rule`` by a trapezoid.

    Conditions are handled in rule order. For condition ``i`` only the rows
    with nonzero membership in every other condition (already widened ones
    included) are considered; its support is extended first on the low side,
    then on the high side, choosing from the core end and the attribute values
    lying beyond it the end that maximises purity. The core stays equal to
    the crisp interval.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    positive = np.array([v == rule.label for v in y], dtype=bool)
    sets = [FuzzySet.crisp(c.low, c.high) for c in rule.conditions]
    flags = []
    for i, cond in enumerate(rule.conditions):
        mask = np.ones(X.shape[0], dtype=bool)
        for j, other in enumerate(rule.conditions):
            if j != i:
                mask &= trapezoid_membership(sets[j], X[:, other.attribute]) > 0
        if not mask.any():
            flags.append(f"crisp:{cond.name}")
            continue
        values = X[mask, cond.attribute]
        pos = positive[mask]
        fs = _extend_side(values, pos, sets[i], "low")
        fs = _extend_side(values, pos, fs, "high")
        sets[i] = fs
    conditions = tuple(
        FuzzyCondition(c.attribute, c.name, fs) for c, fs in zip(rule.conditions, sets)
    )
    return FuzzyRule(conditions, rule.label, flags=tuple(flags))


def certainty_factor(rule: FuzzyRule, X, y: Sequence[Hashable]) -> float:
    """Smoothed membership-weighted precision of ``rule`` on labelled data.

    ``(2 * n_j / n + sum of mu over class-j rows) / (2 + sum of mu over all rows)``
    where ``j`` is the rule's class.
    """
    y = list(y)
    if not y:
        raise ConfigError("certainty factor needs at least one instance")
    mu = rule.membership(X)
    in_class = np.array([v == rule.label for v in y], dtype=bool)
    share = in_class.sum() / len(y)
    return float((2.0 * share + math.fsum(mu[in_class])) / (2.0 + math.fsum(mu)))


@dataclass(frozen=True)
class FuzzyModel:
    rules: tuple[FuzzyRule, ...]
    default_label: Hashable
    classes: tuple[Hashable, ...]
    priors: dict
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        for r in self.rules:
            if r.label not in self.classes:
                raise ConfigError(f"rule label {r.label!r} is not one of {self.classes}")

    def support(self, X, label) -> np.ndarray:
        """Sum of membership times certainty factor over the rules for ``label``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        s = np.zeros(X.shape[0])
        for r in self.rules:
            if r.label == label:
                s = s + r.membership(X) * r.certainty_factor
        return s

    def supports(self, X) -> np.ndarray:
        """Matrix of supports, one column per class in ``classes`` order."""
        return np.column_stack([self.support(X, c) for c in self.classes])

    def _tie_order(self) -> list:
        # higher prior first, then lexicographic
        return sorted(self.classes, key=lambda c: (-self.priors.get(c, 0.0), str(c)))

    def classify(self, X) -> list:
        """Class with the largest support; all-zero support gives ``default_label``."""
        S = self.supports(X)
        order = self._tie_order()
        col = {c: k for k, c in enumerate(self.classes)}
        out = []
        for row in S:
            top = row.max()
            if not top > 0:
                out.append(self.default_label)
                continue
            for c in order:
                if row[col[c]] >= top - _TIE_TOL * max(1.0, top):
                    out.append(c)
                    break
        return out


def fit_fuzzy_model(
    X,
    y: Sequence[Hashable],
    feature_names: Sequence[str],
    prune_fraction: float = DEFAULT_PRUNE_FRACTION,
    split: str = "interleaved",
    crisp: CrispRuleSet | None = None,
) -> tuple[FuzzyModel, CrispRuleSet]:
    """Induce crisp rules (unless given), fuzzify each and score it on the same data."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = list(y)
    if crisp is None:
        crisp = induce_crisp_rules(X, y, feature_names, prune_fraction, split)
    rules = []
    for r in crisp.rules:
        fr = fuzzify_rule(r, X, y)
        rules.append(
            FuzzyRule(fr.conditions, fr.label, certainty_factor(fr, X, y), flags=fr.flags)
        )
    model = FuzzyModel(tuple(rules), crisp.default_label, crisp.classes, dict(crisp.priors), tuple(feature_names))
    return model, crisp

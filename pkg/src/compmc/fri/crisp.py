"""Greedy separate-and-conquer rule induction with reduced-error pruning.

Rules are conjunctions of interval tests ``lo < a <= hi`` on numeric
attributes. For each class but the most frequent (rarest first) rules are grown on a grow split by
repeatedly adding the threshold test with the highest precision, pruned on
the held-out split, and the positives they cover are removed until none are
left or the best rule is no better than the class prior.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Hashable, Sequence

import numpy as np

from ..errors import ConfigError, InsufficientDataError

logger = logging.getLogger(__name__)

DEFAULT_PRUNE_FRACTION = 1.0 / 3.0


@dataclass(frozen=True)
class Test:
    """One threshold test: ``a <= threshold`` (``op="le"``) or ``a > threshold``."""

    attribute: int
    op: str
    threshold: float

    def __call__(self, X: np.ndarray) -> np.ndarray:
        col = X[:, self.attribute]
        return col <= self.threshold if self.op == "le" else col > self.threshold


@dataclass(frozen=True)
class Condition:
    """Interval ``(low, high]`` on one attribute; either end may be infinite."""

    attribute: int
    name: str
    low: float = -math.inf
    high: float = math.inf

    def covers(self, X: np.ndarray) -> np.ndarray:
        col = X[:, self.attribute]
        return (col > self.low) & (col <= self.high)


def merge_tests(tests: Sequence[Test], names: Sequence[str]) -> tuple[Condition, ...]:
    """Collapse one-sided tests into a single interval per attribute, in first-use order."""
    bounds: dict[int, list[float]] = {}
    for t in tests:
        lo, hi = bounds.setdefault(t.attribute, [-math.inf, math.inf])
        if t.op == "le":
            bounds[t.attribute][1] = min(hi, t.threshold)
        else:
            bounds[t.attribute][0] = max(lo, t.threshold)
    return tuple(Condition(a, names[a], lo, hi) for a, (lo, hi) in bounds.items())


@dataclass(frozen=True)
class CrispRule:
    conditions: tuple[Condition, ...]
    label: Hashable
    positives: int = 0
    negatives: int = 0
    tests: tuple[Test, ...] = field(default=(), compare=False)

    def covers(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        mask = np.ones(X.shape[0], dtype=bool)
        for c in self.conditions:
            mask &= c.covers(X)
        return mask

    @property
    def precision(self) -> float:
        n = self.positives + self.negatives
        return self.positives / n if n else 0.0

    @property
    def laplace(self) -> float:
        return (self.positives + 1) / (self.positives + self.negatives + 2)


@dataclass(frozen=True)
class CrispRuleSet:
    rules: tuple[CrispRule, ...]
    default_label: Hashable
    classes: tuple[Hashable, ...]
    priors: dict[Hashable, float]
    feature_names: tuple[str, ...]

    def predict(self, X) -> list:
        """Label of the most reliable firing rule (Laplace precision), else the default."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        best = np.full(X.shape[0], -1.0)
        labels: list[Any] = [self.default_label] * X.shape[0]
        for rule in self.rules:
            fire = rule.covers(X)
            score = rule.laplace
            for i in np.flatnonzero(fire & (score > best)):
                best[i] = score
                labels[i] = rule.label
        return labels


def grow_prune_split(n: int, prune_fraction: float, mode: str = "interleaved") -> np.ndarray:
    """Boolean mask of the prune split over ``n`` ordered instances.

    ``"chronological"`` holds out the last ``ceil(prune_fraction * n)``
    instances; ``"interleaved"`` spreads the same count evenly through the
    sequence.
    """
    mask = np.zeros(n, dtype=bool)
    if prune_fraction <= 0 or n == 0:
        return mask
    if mode == "chronological":
        k = math.ceil(prune_fraction * n)
        mask[n - k:] = True
    elif mode == "interleaved":
        i = np.arange(n)
        mask = np.floor((i + 1) * prune_fraction) > np.floor(i * prune_fraction)
    else:
        raise ConfigError(f"unknown split mode {mode!r}")
    return mask


def _side_counts(values: np.ndarray, pos: np.ndarray, thresholds: np.ndarray):
    """Positives and totals at or below each threshold."""
    order = np.argsort(values, kind="stable")
    v = values[order]
    p_cum = np.concatenate([[0], np.cumsum(pos[order].astype(np.int64))])
    n_le = np.searchsorted(v, thresholds, side="right")
    return p_cum[n_le], n_le, int(p_cum[-1]), v.shape[0]


def _best_test(X: np.ndarray, pos: np.ndarray, grow: np.ndarray, covered: np.ndarray):
    """Highest-precision test over midpoints of the covered values.

    Candidate thresholds are midpoints between consecutive distinct values of
    all covered rows; precision and coverage are counted on the covered grow
    rows. Ties go to more covered grow rows, then the lower attribute index,
    then ``le`` before ``gt``. Thresholds the grow rows cannot tell apart are
    settled by precision, then coverage, over all covered rows. Returns
    ``(precision, n_covered, test)`` or ``None``.
    """
    best = None
    best_key = None
    g = covered & grow
    for a in range(X.shape[1]):
        distinct = np.unique(X[covered, a])
        if distinct.shape[0] < 2:
            continue
        th = 0.5 * (distinct[1:] + distinct[:-1])
        pg_le, ng_le, pg_tot, ng_tot = _side_counts(X[g, a], pos[g], th)
        pa_le, na_le, pa_tot, na_tot = _side_counts(X[covered, a], pos[covered], th)
        sides = (
            ("le", pg_le, ng_le, pa_le, na_le),
            ("gt", pg_tot - pg_le, ng_tot - ng_le, pa_tot - pa_le, na_tot - na_le),
        )
        for op, pg, ng, pa, na in sides:
            for t in np.flatnonzero(pg > 0):
                key = (
                    pg[t] / ng[t], int(ng[t]), -a, op == "le",
                    pa[t] / na[t], int(na[t]),
                )
                if best_key is None or key > best_key:
                    best_key = key
                    best = (key[0], key[1], Test(a, op, float(th[t])))
    return best


def grow_rule(X: np.ndarray, pos: np.ndarray, grow: np.ndarray | None = None) -> list[Test]:
    """Add tests greedily until no grow negatives are covered or precision stops rising.

    ``grow`` marks the rows whose counts drive the search (all rows when
    omitted); the others only contribute candidate thresholds.
    """
    grow = np.ones(X.shape[0], dtype=bool) if grow is None else grow
    covered = np.ones(X.shape[0], dtype=bool)
    tests: list[Test] = []
    while True:
        g = covered & grow
        n_cov = int(g.sum())
        p_cov = int((pos & g).sum())
        if n_cov == 0 or p_cov == n_cov:
            break
        current = p_cov / n_cov
        found = _best_test(X, pos, grow, covered)
        if found is None or not found[0] > current:
            break
        tests.append(found[2])
        covered &= found[2](X)
    return tests


def _covers(tests: Sequence[Test], X: np.ndarray) -> np.ndarray:
    mask = np.ones(X.shape[0], dtype=bool)
    for t in tests:
        mask &= t(X)
    return mask


def _accuracy(tests, X, pos) -> float:
    cov = _covers(tests, X)
    return float(np.mean(cov == pos))


def prune_rule(tests: list[Test], X: np.ndarray, pos: np.ndarray) -> list[Test]:
    """Drop trailing tests while prune-split accuracy does not decrease."""
    if X.shape[0] == 0:
        return tests
    tests = list(tests)
    while len(tests) > 1:
        if _accuracy(tests[:-1], X, pos) >= _accuracy(tests, X, pos):
            tests.pop()
        else:
            break
    return tests


def _class_order(y: list, classes) -> list:
    counts = {c: y.count(c) for c in classes}
    return sorted(classes, key=lambda c: (counts[c], str(c)))


def induce_crisp_rules(
    X,
    y: Sequence[Hashable],
    feature_names: Sequence[str],
    prune_fraction: float = DEFAULT_PRUNE_FRACTION,
    split: str = "interleaved",
) -> CrispRuleSet:
    """Learn rules for every class but the most frequent one.

    ``split`` picks how the prune split is drawn from the instances still in
    play (``"chronological"`` for time-ordered rows).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = list(y)
    names = tuple(feature_names)
    if len(y) == 0:
        raise InsufficientDataError("rule induction needs at least one instance")
    if X.shape != (len(y), len(names)):
        raise ConfigError(f"X has shape {X.shape}, expected ({len(y)}, {len(names)})")
    if not 0.0 <= prune_fraction <= 0.5:
        raise ConfigError(f"prune_fraction must be in [0, 0.5], got {prune_fraction}")
    classes = tuple(sorted(set(y), key=str))
    priors = {c: y.count(c) / len(y) for c in classes}
    if len(classes) == 1:
        return CrispRuleSet((), classes[0], classes, priors, names)

    labels = np.array([classes.index(v) for v in y])
    rules: list[CrispRule] = []
    for cls in _class_order(y, classes):
        is_pos = labels == classes.index(cls)
        remaining = is_pos.copy()
        prior = priors[cls]
        while remaining.any():
            active = remaining | ~is_pos
            Xa, pa = X[active], is_pos[active]
            prune_mask = grow_prune_split(Xa.shape[0], prune_fraction, split)
            if not pa[~prune_mask].any() or not prune_mask.any():
                prune_mask[:] = False
            tests = grow_rule(Xa, pa, ~prune_mask)
            if not tests:
                break
            tests = prune_rule(tests, Xa[prune_mask], pa[prune_mask])
            cov_active = _covers(tests, Xa)
            n_cov = int(cov_active.sum())
            precision = int((cov_active & pa).sum()) / n_cov if n_cov else 0.0
            if precision <= prior:
                break
            cov_all = _covers(tests, X)
            newly = cov_all & remaining
            if not newly.any():
                break
            rules.append(
                CrispRule(
                    merge_tests(tests, names),
                    cls,
                    positives=int((cov_all & is_pos).sum()),
                    negatives=int((cov_all & ~is_pos).sum()),
                    tests=tuple(tests),
                )
            )
            remaining &= ~cov_all

    covered_any = np.zeros(len(y), dtype=bool)
    for r in rules:
        covered_any |= r.covers(X)
    pool = [v for v, c in zip(y, covered_any) if not c] or y
    default = max(classes, key=lambda c: (pool.count(c), priors[c], _neg_key(c)))
    return CrispRuleSet(tuple(rules), default, classes, priors, names)


def _neg_key(label) -> tuple:
    # lexicographically smaller label wins the final tie under max()
    return tuple(-ord(ch) for ch in str(label))

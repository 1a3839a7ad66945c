from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class FuzzySet:
    """Trapezoid ``(support_low, core_low, core_high, support_high)``.

    Membership is 1 on ``[core_low, core_high]``, ramps linearly to 0 at the
    support ends and is 0 beyond them. Outer bounds may be infinite.
    """

    support_low: float
    core_low: float
    core_high: float
    support_high: float

    def __post_init__(self):
        a, b, c, d = self.support_low, self.core_low, self.core_high, self.support_high
        if any(math.isnan(v) for v in (a, b, c, d)) or not (a <= b <= c <= d):
            raise ConfigError(f"trapezoid bounds out of order: {(a, b, c, d)}")

    @classmethod
    def crisp(cls, low: float, high: float) -> "FuzzySet":
        return cls(low, low, high, high)

    @property
    def is_crisp(self) -> bool:
        return self.support_low == self.core_low and self.core_high == self.support_high

    def __call__(self, x):
        return trapezoid_membership(self, x)

    def to_list(self) -> list[float]:
        return [self.support_low, self.core_low, self.core_high, self.support_high]


def trapezoid_membership(fs: FuzzySet, x):
    """Membership of ``x`` (scalar or array) in ``fs``."""
    x_arr = np.asarray(x, dtype=float)
    a, b, c, d = fs.support_low, fs.core_low, fs.core_high, fs.support_high
    mu = np.zeros_like(x_arr)
    core = (x_arr >= b) & (x_arr <= c)
    mu[core] = 1.0
    if b > a:
        left = (x_arr > a) & (x_arr < b)
        if math.isinf(a):
            mu[left] = 1.0
        else:
            mu[left] = (x_arr[left] - a) / (b - a)
    if d > c:
        right = (x_arr > c) & (x_arr < d)
        if math.isinf(d):
            mu[right] = 1.0
        else:
            mu[right] = (d - x_arr[right]) / (d - c)
    mu = np.clip(mu, 0.0, 1.0)
    return float(mu) if mu.ndim == 0 else mu

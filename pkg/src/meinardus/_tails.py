"""Truncation of infinite sums sum_k b_k k^p e^(-k delta).

The tail constant C = max b_k / k^r over k <= 10^4 is an empirical stand-in
for the o(k^r) growth bound; it is recorded in reports that use it.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaincc, gammaln

from .weights import WeightSequence

GROWTH_SAMPLE = 10_000


@lru_cache(maxsize=64)
def growth_constant(w: WeightSequence) -> float:
    r = w.require_meta().r
    k = np.arange(1, GROWTH_SAMPLE + 1, dtype=float)
    return float(np.max(w.array(GROWTH_SAMPLE) / k ** r))


def truncation_index(w: WeightSequence, delta: float, tol: float, extra_power: float = 0.0) -> int:
    """Index K beyond which the tail falls below ``tol`` (roughly).

    Finite tables return their support.  Otherwise
    K = ceil((log(1/tol) + (r+1+extra) log(1/delta)) / delta), never less
    than the point where k^(r+extra) e^(-k delta) starts to decrease.
    """
    if w.support is not None:
        return max(int(w.support), 1)
    r = w.require_meta().r + extra_power
    K = math.ceil((math.log(1.0 / tol) + (r + 1.0) * max(0.0, math.log(1.0 / delta))) / delta)
    return max(K, math.ceil(r / delta) + 1, 1)


def tail_bound(w: WeightSequence, delta: float, K: int, extra_power: float = 0.0) -> float:
    """Upper bound for sum_{k>K} b_k k^extra e^(-k delta) via the integral test."""
    if w.support is not None and K >= w.support:
        return 0.0
    p = w.require_meta().r + extra_power
    C = growth_constant(w)
    x = K * delta
    if K < p / delta:
        return math.inf
    log_int = gammaln(p + 1.0) - (p + 1.0) * math.log(delta)
    return C * math.exp(log_int) * float(gammaincc(p + 1.0, x))

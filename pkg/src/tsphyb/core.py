"""Tour and budget types, objective evaluation, RNG stream, error metric.

Objective-function-call (OFC) accounting: exactly one call is charged per
complete tentative solution handed back to a metaheuristic.  Delta
arithmetic inside the improvement heuristics is free; see the bench module
for how budgets drive the stopping criterion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .tsplib import Instance


class BudgetExhausted(RuntimeError):
    """An evaluation was requested after the call budget ran out."""


@dataclass
class Budget:
    """Objective-function-call budget and incumbent bookkeeping.

    used never exceeds limit; best_at records the call count at which the
    current incumbent was first reached.
    """

    limit: int
    used: int = 0
    best_at: int = 0

    @property
    def remaining(self) -> int:
        return self.limit - self.used

    def charge(self, k: int = 1) -> None:
        if k < 0:
            raise ValueError("cannot charge a negative call count")
        if self.used + k > self.limit:
            raise BudgetExhausted(
                f"budget exceeded: {self.used}+{k} > limit {self.limit}"
            )
        self.used += k


class RngStream:
    """Deterministic 64-bit-seeded random stream (splitmix64).

    The same seed always reproduces the same draw sequence, across batching
    boundaries, which is what makes whole runs replayable.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.state = _rng.new_state(self.seed)

    def u01(self) -> float:
        return float(_rng.rand_u01(self.state))

    def integers(self, k: int, size: int | None = None):
        """Uniform ints in [0, k)."""
        if size is None:
            return int(_rng.rand_below(self.state, k))
        out = np.empty(size, dtype=np.int64)
        for i in range(size):
            out[i] = _rng.rand_below(self.state, k)
        return out

    def uniform(self, lo: float, hi: float, size) -> np.ndarray:
        out = np.empty(size, dtype=np.float64)
        _rng.fill_uniform(self.state, out, lo, hi)
        return out

    def normal(self, size) -> np.ndarray:
        out = np.empty(size, dtype=np.float64)
        _rng.fill_normal(self.state, out)
        return out

    def shuffle(self, arr: np.ndarray) -> None:
        _rng.shuffle_ints(self.state, arr)


@dataclass(frozen=True)
class Tour:
    """A feasible closed tour: a permutation of cities plus cached length."""

    order: np.ndarray
    length: int


def is_permutation(order: np.ndarray, n: int) -> bool:
    if order.shape != (n,):
        return False
    seen = np.zeros(n, dtype=bool)
    for c in order:
        if c < 0 or c >= n or seen[c]:
            return False
        seen[c] = True
    return True


def closed_length(order: np.ndarray, dist: np.ndarray) -> int:
    """Plain closed-tour length; no budget involved (reporting paths only)."""
    return int(dist[order, np.roll(order, -1)].sum())


def tour_length(order: np.ndarray, inst: Instance, budget: Budget | None) -> int:
    """Closed-tour length, charging exactly one objective call when budgeted.

    Raises ValueError for non-permutation input and BudgetExhausted when the
    budget has no call left.
    """
    order = np.asarray(order, dtype=np.int64)
    if not is_permutation(order, inst.n):
        raise ValueError("order is not a permutation of 0..n-1")
    if budget is not None:
        budget.charge(1)
    return closed_length(order, inst.dist)


def make_tour(order, inst: Instance) -> Tour:
    order = np.asarray(order, dtype=np.int64)
    if not is_permutation(order, inst.n):
        raise ValueError("order is not a permutation of 0..n-1")
    return Tour(order=order.copy(), length=closed_length(order, inst.dist))


def error_percent(best: int, best_ref: int) -> float:
    """Relative error (best - best_ref) / best_ref * 100, unrounded."""
    if best_ref <= 0:
        raise ValueError("best_ref must be positive")
    return (best - best_ref) / best_ref * 100.0


def error_percent_2dp(best: int, best_ref: int) -> str:
    """Error formatted to 2 decimals, half-up, in exact integer arithmetic."""
    if best_ref <= 0:
        raise ValueError("best_ref must be positive")
    num = (int(best) - int(best_ref)) * 10000
    sign = "-" if num < 0 else ""
    num = abs(num)
    q, r = divmod(num, int(best_ref))
    if 2 * r >= int(best_ref):
        q += 1
    return f"{sign}{q // 100}.{q % 100:02d}"

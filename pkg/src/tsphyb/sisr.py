"""String-removal ruin and greedy nearest-neighbour reconstruction.

The tour is split into X equal subtours.  In each, a seed node is removed
together with the nodes of a random run of consecutive edges around it;
reconstruction then fills every vacancy with the missing city closest to
the node preceding it, walking the instance's neighbour lists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import RngStream
from .tsplib import Instance


@dataclass(frozen=True)
class RuinPlan:
    """Pre-drawn ruin randomness: one seed position and edge span per subtour.

    A seed of -1 marks a subtour with nothing left to remove.  Spans lie in
    [1, L//2] for a subtour of length L.
    """

    subtours: int
    seeds: np.ndarray
    spans: np.ndarray


def subtour_bounds(n: int, x: int) -> list[tuple[int, int]]:
    """Equal-parts split of positions 0..n-1 into x half-open ranges."""
    return [((k * n) // x, ((k + 1) * n) // x) for k in range(x)]


def make_ruin_plan(order: np.ndarray, x: int, rng: RngStream) -> RuinPlan:
    """Draw seeds (among non-vacant positions) and spans for x subtours."""
    order = np.asarray(order, dtype=np.int64)
    n = order.shape[0]
    if x < 1 or x > n // 2:
        raise ValueError(f"subtour count must be in 1..n/2, got {x}")
    seeds = np.empty(x, dtype=np.int64)
    spans = np.empty(x, dtype=np.int64)
    _kernels.draw_ruin_plan(order, x, rng.state, seeds, spans)
    return RuinPlan(subtours=x, seeds=seeds, spans=spans)


def ruin(order: np.ndarray, plan: RuinPlan) -> tuple[np.ndarray, np.ndarray]:
    """Apply a ruin plan; returns (partial order with -1 gaps, missing cities).

    Accepts a full permutation or a deduped partial order; surviving nodes
    keep their positions.
    """
    slot = np.asarray(order, dtype=np.int64).copy()
    n = slot.shape[0]
    missing = np.zeros(n, dtype=np.bool_)
    present = np.zeros(n, dtype=np.bool_)
    for c in slot:
        if c >= 0:
            present[c] = True
    nm = 0
    for c in range(n):
        if not present[c]:
            missing[c] = True
            nm += 1
    _kernels.apply_ruin(slot, missing, nm, plan.subtours, plan.seeds, plan.spans)
    return slot, np.flatnonzero(missing).astype(np.int64)


def recreate(partial: np.ndarray, missing: np.ndarray, inst: Instance) -> np.ndarray:
    """Greedy reconstruction; deterministic given the ruin state."""
    slot = np.asarray(partial, dtype=np.int64).copy()
    n = slot.shape[0]
    vacancies = int((slot < 0).sum())
    missing = np.asarray(missing, dtype=np.int64)
    if vacancies != missing.shape[0]:
        raise ValueError(
            f"{vacancies} vacancies but {missing.shape[0]} missing cities"
        )
    mask = np.zeros(n, dtype=np.bool_)
    mask[missing] = True
    _kernels.greedy_recreate(slot, mask, vacancies, inst.neighbors)
    return slot


def ruin_and_recreate(
    order: np.ndarray, x: int, inst: Instance, rng: RngStream
) -> np.ndarray:
    """Draw a plan, ruin and rebuild in one call (the pipeline stage)."""
    plan = make_ruin_plan(np.asarray(order, dtype=np.int64), x, rng)
    partial, missing = ruin(order, plan)
    return recreate(partial, missing, inst)

"""Randomized 3-OPT: re-order the nodes of three removed edges.

One move removes three pairwise non-consecutive edges, keeps the first of
the six endpoint nodes fixed, scores every ordering of the other five by
the affected-edge length, and reinstalls the best.  A repetition count,
usually a percentage of the city count, controls how often this runs.
"""

from __future__ import annotations

import warnings

import numpy as np

from . import _kernels
from .core import RngStream
from .tsplib import Instance

CANDIDATE_ORDERINGS = _kernels.PERMS5.shape[0]  # 120


def sample_three_edges(n: int, rng: RngStream) -> tuple[int, int, int]:
    """Three pairwise non-adjacent edge indices (cyclically), ascending."""
    buf = np.empty(3, dtype=np.int64)
    _kernels.sample_three_edges(n, rng.state, buf)
    return int(buf[0]), int(buf[1]), int(buf[2])


def three_opt_move(
    order: np.ndarray, inst: Instance, edges: tuple[int, int, int]
) -> np.ndarray:
    """Deterministic 3-OPT move on the given ascending edge triple."""
    order = np.asarray(order, dtype=np.int64).copy()
    n = order.shape[0]
    e1, e2, e3 = edges
    if not (0 <= e1 < e2 < e3 < n):
        raise ValueError("edges must be ascending indices in 0..n-1")
    if e2 - e1 < 2 or e3 - e2 < 2 or e1 + n - e3 < 2:
        raise ValueError("edges must be pairwise non-consecutive")
    tmp = np.empty(n, dtype=np.int64)
    _kernels.three_opt_fixed(order, inst.dist, e1, e2, e3, _kernels.PERMS5, tmp)
    return order


def three_opt_once(order: np.ndarray, inst: Instance, rng: RngStream) -> np.ndarray:
    """One randomized move; a no-op (with a warning) below six cities."""
    order = np.asarray(order, dtype=np.int64)
    if order.shape[0] < 6:
        warnings.warn("3-OPT needs at least 6 cities; returning input unchanged")
        return order.copy()
    return three_opt_move(order, inst, sample_three_edges(order.shape[0], rng))


def three_opt_repeat(
    order: np.ndarray, inst: Instance, y_repetitions: int, rng: RngStream
) -> np.ndarray:
    """y_repetitions sequential randomized moves."""
    if y_repetitions < 0:
        raise ValueError("repetition count must be >= 0")
    order = np.asarray(order, dtype=np.int64).copy()
    n = order.shape[0]
    if n < 6:
        if y_repetitions:
            warnings.warn("3-OPT needs at least 6 cities; returning input unchanged")
        return order
    tmp = np.empty(n, dtype=np.int64)
    edges_buf = np.empty(3, dtype=np.int64)
    _kernels.three_opt_reps(
        order, inst.dist, y_repetitions, rng.state, _kernels.PERMS5, tmp, edges_buf
    )
    return order

"""Crossing detection and repair by reversing the branch between two edges.

A crossing between edges (a,b) and (c,d) is undone by reversing the tour
between b and c, which reconnects a-c and b-d and restores the travel
direction.  Fixes are applied only when the integer length delta is <= 0,
so no pass can lengthen a tour under TSPLIB rounding.  GEO coordinates are
treated as planar here; lengths still use the instance metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import RngStream
from .tsplib import Instance


@dataclass(frozen=True)
class Segment:
    """A straight edge between two distinct coordinate pairs."""

    p1: tuple[float, float]
    p2: tuple[float, float]

    def __post_init__(self):
        if tuple(self.p1) == tuple(self.p2):
            raise ValueError("segment endpoints must be distinct")


def segments_cross(e1: Segment, e2: Segment) -> bool:
    """True iff the segments cross strictly inside both (touching is False)."""
    return bool(
        _kernels.seg_cross(
            e1.p1[0], e1.p1[1], e1.p2[0], e1.p2[1],
            e2.p1[0], e2.p1[1], e2.p2[0], e2.p2[1],
        )
    )


def _xy(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    return (
        np.ascontiguousarray(inst.coords[:, 0]),
        np.ascontiguousarray(inst.coords[:, 1]),
    )


def count_crossings(order: np.ndarray, inst: Instance) -> int:
    """Number of strictly crossing edge pairs in the tour."""
    xs, ys = _xy(inst)
    return int(_kernels.count_crossings_k(np.asarray(order, dtype=np.int64), xs, ys))


def uncross_pass(order: np.ndarray, inst: Instance) -> np.ndarray:
    """One full scan over edge pairs (i<j), fixing at most one crossing per i."""
    out = np.asarray(order, dtype=np.int64).copy()
    xs, ys = _xy(inst)
    _kernels.uncross_pass_k(out, xs, ys, inst.dist)
    return out


def final_uncross_loop(
    order: np.ndarray, inst: Instance, iterations: int = 3
) -> tuple[np.ndarray, list[int]]:
    """Repeated passes over a finished route; returns the tour and the
    length recorded after each iteration."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    out = np.asarray(order, dtype=np.int64).copy()
    xs, ys = _xy(inst)
    trace = []
    for _ in range(iterations):
        _kernels.uncross_pass_k(out, xs, ys, inst.dist)
        trace.append(int(_kernels.tour_len(out, inst.dist)))
    return out, trace


def uncross_prob_operator(
    order: np.ndarray,
    inst: Instance,
    prob_x: float,
    y_repetitions: int,
    rng: RngStream,
    return_stats: bool = False,
):
    """y times: sample three random edges and fix each crossing pair among
    them with probability prob_x.  With return_stats, also yields
    (crossings examined, crossings fixed)."""
    if not 0.0 <= prob_x <= 1.0:
        raise ValueError("prob_x must lie in [0, 1]")
    if y_repetitions < 0:
        raise ValueError("repetition count must be >= 0")
    out = np.asarray(order, dtype=np.int64).copy()
    xs, ys = _xy(inst)
    edges_buf = np.empty(3, dtype=np.int64)
    examined, fixed = _kernels.prob_uncross_k(
        out, xs, ys, inst.dist, prob_x, y_repetitions, rng.state, edges_buf
    )
    if return_stats:
        return out, (int(examined), int(fixed))
    return out

"""Feasibility repair: dedupe a decoded sequence, reinsert missing cities.

The first occurrence of a repeated city keeps its position; every later
occurrence opens a vacancy, and the missing cities are scattered over the
vacancies uniformly at random.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import RngStream


@dataclass
class RepairBuffer:
    """Vacancy bookkeeping: the missing cities and the slots they can take."""

    missing: np.ndarray  # ascending city ids absent from the sequence
    vacancy_slots: np.ndarray  # positions holding removed duplicates


def dedupe(decoded: np.ndarray) -> tuple[np.ndarray, RepairBuffer]:
    """Strip duplicates to vacancies (-1); report missing cities and slots."""
    decoded = np.asarray(decoded, dtype=np.int64)
    n = decoded.shape[0]
    if decoded.min() < 0 or decoded.max() >= n:
        raise ValueError("decoded entries must lie in 0..n-1")
    slot = np.empty(n, dtype=np.int64)
    missing = np.empty(n, dtype=np.bool_)
    _kernels.dedupe_into(decoded, slot, missing)
    return slot, RepairBuffer(
        missing=np.flatnonzero(missing).astype(np.int64),
        vacancy_slots=np.flatnonzero(slot < 0).astype(np.int64),
    )


def repair_tour(decoded: np.ndarray, rng: RngStream) -> np.ndarray:
    """Turn a decoded sequence (duplicates allowed) into a permutation.

    Feasible input comes back unchanged; otherwise vacancies are filled
    with the missing cities in a uniformly random assignment.
    """
    decoded = np.asarray(decoded, dtype=np.int64)
    n = decoded.shape[0]
    if decoded.min() < 0 or decoded.max() >= n:
        raise ValueError("decoded entries must lie in 0..n-1")
    slot = np.empty(n, dtype=np.int64)
    missing = np.empty(n, dtype=np.bool_)
    nm = _kernels.dedupe_into(decoded, slot, missing)
    work = np.empty(n, dtype=np.int64)
    _kernels.fill_random(slot, missing, nm, rng.state, work)
    return slot

"""Named operator pipelines composing repair, SISR, 3-OPT and uncrossing.

The five families and their parameter menus:

  TSP-MH            decode + random repair only
  3OPT{Y}Rep        repair, then 3-OPT repeated Y% of n times; Y in 50/100/200
  SISR{X}tours      string-removal ruin/recreate with X subtours; X in 1..4
  SISR3OPT{Y}Rep    SISR (1 subtour), then 3-OPT Y% of n times; Y in 1/5/10
  UNCROSS{X}Prob{Y}Rep  SISR (1 subtour), then probabilistic uncrossing with
                    exchange rate X% (20/50/100) repeated Y% of n times
                    (Y in 1/5/10)

Percentages resolve against the city count with round-half-up, minimum 1.
The "Rep" suffix is also accepted spelled "Por", and matching is
case-insensitive with optional hyphens (e.g. "SISR-4tours").
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import Budget, BudgetExhausted, RngStream, Tour
from .tsplib import Instance

MENU_3OPT_Y = (50, 100, 200)
MENU_SISR_X = (1, 2, 3, 4)
MENU_SISR3OPT_Y = (1, 5, 10)
MENU_UNCROSS_X = (20, 50, 100)
MENU_UNCROSS_Y = (1, 5, 10)


class PipelineError(ValueError):
    """Unknown pipeline family or out-of-menu parameter."""


def _menus() -> str:
    return (
        "valid pipelines: TSP-MH; 3OPT{Y}Rep with Y in "
        f"{MENU_3OPT_Y}; SISR{{X}}tours with X in {MENU_SISR_X}; "
        f"SISR3OPT{{Y}}Rep with Y in {MENU_SISR3OPT_Y}; "
        f"UNCROSS{{X}}Prob{{Y}}Rep with X in {MENU_UNCROSS_X} "
        f"and Y in {MENU_UNCROSS_Y}"
    )


def resolve_percent(percent: int, n: int) -> int:
    """percent% of n, rounded half-up, at least 1."""
    return max(1, (percent * n + 50) // 100)


@dataclass(frozen=True)
class HybridPipeline:
    """A parsed pipeline: canonical name plus resolved operator stages.

    stages is a tuple of (op, params) pairs; ops/iparams/fparams are the
    packed form consumed by the batch kernel.
    """

    name: str
    n: int
    stages: tuple
    ops: np.ndarray
    iparams: np.ndarray
    fparams: np.ndarray


def _build(name: str, n: int, stages: list) -> HybridPipeline:
    codes = {"fill": _kernels.OP_FILL, "sisr": _kernels.OP_SISR,
             "3opt": _kernels.OP_3OPT, "uncross": _kernels.OP_UNCROSS}
    ops = np.array([codes[s[0]] for s in stages], dtype=np.int64)
    iparams = np.array([s[1].get("reps", s[1].get("subtours", 0)) for s in stages],
                       dtype=np.int64)
    fparams = np.array([s[1].get("prob", 0.0) for s in stages], dtype=np.float64)
    return HybridPipeline(
        name=name, n=n, stages=tuple((s[0], dict(s[1])) for s in stages),
        ops=ops, iparams=iparams, fparams=fparams,
    )


_RE_3OPT = re.compile(r"^3OPT(\d+)(?:REP|POR)$")
_RE_SISR = re.compile(r"^SISR(\d+)TOURS$")
_RE_SISR3OPT = re.compile(r"^SISR3OPT(\d+)(?:REP|POR)$")
_RE_UNCROSS = re.compile(r"^UNCROSS(\d+)PROB(\d+)(?:REP|POR)$")


def parse_pipeline_name(name: str, n: int) -> HybridPipeline:
    """Resolve a Table-style pipeline name against a city count."""
    if n < 3:
        raise PipelineError("pipelines need an instance with n >= 3")
    norm = name.strip().upper().replace("-", "").replace(" ", "")
    if norm == "TSPMH":
        return _build("TSP-MH", n, [("fill", {})])
    m = _RE_SISR3OPT.match(norm)  # before the plain-3OPT family
    if m:
        y = int(m.group(1))
        if y not in MENU_SISR3OPT_Y:
            raise PipelineError(f"SISR3OPT repetitions {y} not in menu; " + _menus())
        return _build(
            f"SISR3OPT{y}Rep", n,
            [("sisr", {"subtours": 1}), ("3opt", {"reps": resolve_percent(y, n)})],
        )
    m = _RE_3OPT.match(norm)
    if m:
        y = int(m.group(1))
        if y not in MENU_3OPT_Y:
            raise PipelineError(f"3OPT repetitions {y} not in menu; " + _menus())
        return _build(
            f"3OPT{y}Rep", n,
            [("fill", {}), ("3opt", {"reps": resolve_percent(y, n)})],
        )
    m = _RE_SISR.match(norm)
    if m:
        x = int(m.group(1))
        if x not in MENU_SISR_X:
            raise PipelineError(f"SISR subtour count {x} not in menu; " + _menus())
        return _build(f"SISR{x}tours", n, [("sisr", {"subtours": x})])
    m = _RE_UNCROSS.match(norm)
    if m:
        x, y = int(m.group(1)), int(m.group(2))
        if x not in MENU_UNCROSS_X or y not in MENU_UNCROSS_Y:
            raise PipelineError(
                f"UNCROSS parameters ({x}, {y}) not in menu; " + _menus()
            )
        return _build(
            f"UNCROSS{x}Prob{y}Rep", n,
            [("sisr", {"subtours": 1}),
             ("uncross", {"prob": x / 100.0, "reps": resolve_percent(y, n)})],
        )
    raise PipelineError(f"unknown pipeline {name!r}; " + _menus())


def full_menu(n: int) -> list[HybridPipeline]:
    """Every pipeline of the parameter tables, duplicate-free."""
    names = ["TSP-MH"]
    names += [f"3OPT{y}Rep" for y in MENU_3OPT_Y]
    names += [f"SISR{x}tours" for x in MENU_SISR_X]
    names += [f"SISR3OPT{y}Rep" for y in MENU_SISR3OPT_Y]
    names += [
        f"UNCROSS{x}Prob{y}Rep" for x in MENU_UNCROSS_X for y in MENU_UNCROSS_Y
    ]
    return [parse_pipeline_name(s, n) for s in names]


def apply_pipeline_batch(
    pipeline: HybridPipeline,
    positions: np.ndarray,
    k_eval: int,
    inst: Instance,
    budget: Budget,
    rng: RngStream,
    out_orders: np.ndarray,
    out_lengths: np.ndarray,
) -> None:
    """Evaluate the first k_eval position rows; charges k_eval calls.

    Feasible tours are written back into the position rows as 1-based
    coordinates so the metaheuristic continues from corrected solutions.
    """
    if k_eval > budget.remaining:
        raise BudgetExhausted(
            f"cannot evaluate {k_eval} solutions with {budget.remaining} calls left"
        )
    xs = np.ascontiguousarray(inst.coords[:, 0])
    ys = np.ascontiguousarray(inst.coords[:, 1])
    _kernels.apply_pipeline_batch(
        positions, k_eval, pipeline.ops, pipeline.iparams, pipeline.fparams,
        inst.dist, inst.neighbors, xs, ys, rng.state, out_orders, out_lengths,
    )
    budget.charge(k_eval)


def apply_pipeline(
    pipeline: HybridPipeline,
    tentative: np.ndarray,
    inst: Instance,
    budget: Budget,
    rng: RngStream,
) -> Tour:
    """Run the stages on one tentative solution; exactly one objective call.

    Accepts a continuous position vector or an integer permutation.  When a
    float position vector is passed it is updated in place with the
    re-encoded feasible tour.
    """
    tentative = np.asarray(tentative)
    if tentative.dtype.kind in "iu":
        positions = tentative.astype(np.float64)[None, :] + 1.0
    else:
        positions = np.ascontiguousarray(tentative, dtype=np.float64)[None, :]
    out_orders = np.empty((1, inst.n), dtype=np.int64)
    out_lengths = np.empty(1, dtype=np.int64)
    apply_pipeline_batch(
        pipeline, positions, 1, inst, budget, rng, out_orders, out_lengths
    )
    if tentative.dtype.kind == "f":
        tentative[:] = positions[0]
    return Tour(order=out_orders[0], length=int(out_lengths[0]))

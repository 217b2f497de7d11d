"""Experiment protocol: repeated seeded runs, BU/AU statistics, reports.

A cell is one (instance, metaheuristic, pipeline) combination solved
`runs` times with seeds base_seed+k.  Each run searches to the call budget
and then applies the final uncrossing loop to its best tour; the report
carries per-run traces plus the aggregate rows mirroring the results-table
schema (best before/after uncrossing, errors, call count at best).
"""

from __future__ import annotations

import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import Budget, RngStream, error_percent_2dp
from .hybrid import parse_pipeline_name
from .mh import MhConfig, make_driver
from .tsplib import Instance, parse_instance_file
from .uncross import final_uncross_loop

CSV_COLUMNS = (
    "Instance", "n", "Best_ref", "Best_BU", "Error_BU", "Best_AU", "Error_AU",
    "Hybridization", "OFC", "StoppingCriterion",
)


@dataclass
class ExperimentConfig:
    """One experiment cell plus the shared run protocol knobs."""

    instance: str
    mh: str
    pipeline: str
    ofc_limit: int
    runs: int = 30
    final_uncross_iterations: int = 3
    base_seed: int = 0
    best_ref: int | None = None
    population: int = 10
    jobs: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.population < 1:
            raise ValueError("population must be >= 1")
        if self.ofc_limit < self.population:
            raise ValueError("ofc_limit must be at least the population size")
        if self.final_uncross_iterations < 1:
            raise ValueError("final_uncross_iterations must be >= 1")


@dataclass
class RunResult:
    """One seeded run: best before/after uncrossing and call bookkeeping."""

    seed: int
    best_bu: int
    best_au: int
    ofc_at_best: int
    ofc_used: int
    au_trace: list[int] = field(default_factory=list)


@dataclass
class RunReport:
    """All runs of a cell plus derived aggregates."""

    instance_name: str
    n: int
    mh: str
    pipeline: str
    ofc_limit: int
    base_seed: int
    best_ref: int | None
    final_uncross_iterations: int
    population: int
    results: list[RunResult]

    @property
    def best_bu(self) -> int:
        return min(r.best_bu for r in self.results)

    @property
    def best_au(self) -> int:
        return min(r.best_au for r in self.results)

    @property
    def worst_au(self) -> int:
        return max(r.best_au for r in self.results)

    @property
    def median_au(self) -> float:
        return float(statistics.median(r.best_au for r in self.results))

    @property
    def amplitude(self) -> float:
        """(max - min) / min over the per-run after-uncross bests."""
        return (self.worst_au - self.best_au) / self.best_au

    @property
    def mean_ofc_percent(self) -> float:
        return sum(r.ofc_at_best / self.ofc_limit * 100.0 for r in self.results) / len(
            self.results
        )

    @property
    def ofc_at_best_au(self) -> int:
        """Call count at best for the run that reached the best AU tour."""
        best = min(self.results, key=lambda r: (r.best_au, r.seed))
        return best.ofc_at_best

    @property
    def hybridization(self) -> str:
        return f"{self.mh.upper()}+{self.pipeline}"

    def error_bu(self) -> str:
        return "" if self.best_ref is None else error_percent_2dp(self.best_bu, self.best_ref)

    def error_au(self) -> str:
        return "" if self.best_ref is None else error_percent_2dp(self.best_au, self.best_ref)

    def csv_row(self) -> str:
        ref = "" if self.best_ref is None else str(self.best_ref)
        return ",".join(
            (
                self.instance_name, str(self.n), ref,
                str(self.best_bu), self.error_bu(),
                str(self.best_au), self.error_au(),
                self.hybridization, str(self.ofc_at_best_au), str(self.ofc_limit),
            )
        )

    def to_json(self) -> str:
        doc = {
            "config": {
                "instance_name": self.instance_name,
                "n": self.n,
                "mh": self.mh,
                "pipeline": self.pipeline,
                "ofc_limit": self.ofc_limit,
                "base_seed": self.base_seed,
                "best_ref": self.best_ref,
                "final_uncross_iterations": self.final_uncross_iterations,
                "population": self.population,
            },
            "runs": [asdict(r) for r in self.results],
            "aggregates": {
                "best_bu": self.best_bu,
                "best_au": self.best_au,
                "worst_au": self.worst_au,
                "median_au": self.median_au,
                "amplitude": self.amplitude,
                "mean_ofc_percent": self.mean_ofc_percent,
                "error_bu": self.error_bu(),
                "error_au": self.error_au(),
                "hybridization": self.hybridization,
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        doc = json.loads(text)
        cfg = doc["config"]
        return cls(
            instance_name=cfg["instance_name"],
            n=cfg["n"],
            mh=cfg["mh"],
            pipeline=cfg["pipeline"],
            ofc_limit=cfg["ofc_limit"],
            base_seed=cfg["base_seed"],
            best_ref=cfg["best_ref"],
            final_uncross_iterations=cfg["final_uncross_iterations"],
            population=cfg["population"],
            results=[RunResult(**r) for r in doc["runs"]],
        )


def csv_header() -> str:
    return ",".join(CSV_COLUMNS)


def emit_report(report: RunReport, format: str) -> str:
    """Render a report as a one-row CSV document or a full JSON trace."""
    if format == "csv":
        return csv_header() + "\n" + report.csv_row() + "\n"
    if format == "json":
        return report.to_json()
    raise ValueError(f"unknown report format {format!r}")


def reports_to_csv(reports: list[RunReport]) -> str:
    return csv_header() + "\n" + "".join(r.csv_row() + "\n" for r in reports)


def run_single(
    inst: Instance,
    mh_kind: str,
    pipeline_name: str,
    ofc_limit: int,
    seed: int,
    population: int = 10,
    final_uncross_iterations: int = 3,
    return_order: bool = False,
):
    """One seeded run: search to the budget, then the final uncrossing loop.

    Returns a RunResult, or (RunResult, corrected tour order) when
    return_order is set.
    """
    pipeline = parse_pipeline_name(pipeline_name, inst.n)
    budget = Budget(limit=ofc_limit)
    driver = make_driver(
        MhConfig(kind=mh_kind, population=population),
        inst, pipeline, budget, RngStream(seed),
    )
    driver.initialize()
    while not driver.exhausted and budget.remaining > 0:
        driver.step()
    best_bu = int(driver.incumbent_length)
    order, trace = final_uncross_loop(
        driver.incumbent_order, inst, final_uncross_iterations
    )
    result = RunResult(
        seed=seed,
        best_bu=best_bu,
        best_au=int(trace[-1]),
        ofc_at_best=int(budget.best_at),
        ofc_used=int(budget.used),
        au_trace=[int(v) for v in trace],
    )
    return (result, order) if return_order else result


def _cell_worker(args) -> RunResult:
    inst, cfg, seed = args
    return run_single(
        inst, cfg.mh, cfg.pipeline, cfg.ofc_limit, seed,
        cfg.population, cfg.final_uncross_iterations,
    )


def run_experiment(cfg: ExperimentConfig, inst: Instance | None = None) -> RunReport:
    """Execute all seeded runs of a cell; deterministic for a fixed config."""
    if inst is None:
        inst = parse_instance_file(cfg.instance)
    seeds = [cfg.base_seed + k for k in range(cfg.runs)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_cell_worker, [(inst, cfg, s) for s in seeds]))
    else:
        results = [_cell_worker((inst, cfg, s)) for s in seeds]
    return RunReport(
        instance_name=inst.name,
        n=inst.n,
        mh=cfg.mh.lower(),
        pipeline=parse_pipeline_name(cfg.pipeline, inst.n).name,
        ofc_limit=cfg.ofc_limit,
        base_seed=cfg.base_seed,
        best_ref=cfg.best_ref,
        final_uncross_iterations=cfg.final_uncross_iterations,
        population=cfg.population,
        results=results,
    )


def render_route_svg(order: np.ndarray, inst: Instance) -> str:
    """Closed polyline through the tour with node dots and a length label."""
    order = np.asarray(order, dtype=np.int64)
    pts = inst.coords[order]
    from .core import closed_length

    length = closed_length(order, inst.dist)
    xmin, ymin = pts.min(axis=0)
    xmax, ymax = pts.max(axis=0)
    span = max(xmax - xmin, ymax - ymin, 1.0)
    margin = 0.05 * span
    radius = 0.004 * span
    view = (
        f"{xmin - margin} {ymin - margin} "
        f"{xmax - xmin + 2 * margin} {ymax - ymin + 2 * margin}"
    )
    points = " ".join(f"{x},{y}" for x, y in pts) + f" {pts[0, 0]},{pts[0, 1]}"
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{view}">',
    ]
    if inst.metric == "GEO":
        parts.append(
            "<!-- geographic coordinates drawn as raw (lat, lon); no projection -->"
        )
    parts.append(
        f'<polyline points="{points}" fill="none" stroke="black" '
        f'stroke-width="{0.002 * span}"/>'
    )
    for x, y in pts:
        parts.append(f'<circle cx="{x}" cy="{y}" r="{radius}" fill="red"/>')
    parts.append(
        f'<text x="{xmin}" y="{ymin - 0.2 * margin}" '
        f'font-size="{0.04 * span}">length {length}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def load_bench_config(text: str) -> tuple[list[ExperimentConfig], dict]:
    """Expand a bench JSON document into experiment cells.

    The document enumerates instances (objects with path and optional
    best_ref), metaheuristic kinds and pipeline names; shared keys
    (runs, ofc_limit, base_seed, final_uncross_iterations, population,
    jobs, out_dir) apply to every cell.
    """
    doc = json.loads(text)
    shared = {
        "runs": doc.get("runs", 30),
        "ofc_limit": doc["ofc_limit"],
        "base_seed": doc.get("base_seed", 0),
        "final_uncross_iterations": doc.get("final_uncross_iterations", 3),
        "population": doc.get("population", 10),
        "jobs": doc.get("jobs", 1),
    }
    cells = []
    for entry in doc.get("instances", []):
        for mh_kind in doc.get("mh", []):
            for pipe in doc.get("pipelines", []):
                cells.append(
                    ExperimentConfig(
                        instance=entry["path"],
                        mh=mh_kind,
                        pipeline=pipe,
                        best_ref=entry.get("best_ref"),
                        **shared,
                    )
                )
    if not cells:
        raise ValueError(
            "bench config enumerates no cells; it needs non-empty "
            "'instances', 'mh' and 'pipelines' lists"
        )
    return cells, doc

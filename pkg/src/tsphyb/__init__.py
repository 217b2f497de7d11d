"""Hybrid metaheuristic solvers for the symmetric Euclidean TSP.

Eight general metaheuristics (bh, ea, gsa, mvs, pso, sa, sca, vs) drive
named repair/string-removal/3-OPT/uncrossing pipelines over TSPLIB
instances, with a seeded benchmark harness for repeated-run statistics.
"""

from .core import Budget, BudgetExhausted, RngStream, Tour, error_percent, tour_length
from .hybrid import HybridPipeline, PipelineError, apply_pipeline, parse_pipeline_name
from .mh import KINDS, DriverState, MhConfig, make_driver
from .tsplib import Instance, parse_instance, parse_instance_file

__all__ = [
    "Budget",
    "BudgetExhausted",
    "DriverState",
    "HybridPipeline",
    "Instance",
    "KINDS",
    "MhConfig",
    "PipelineError",
    "RngStream",
    "Tour",
    "apply_pipeline",
    "error_percent",
    "make_driver",
    "parse_instance",
    "parse_instance_file",
    "parse_pipeline_name",
    "tour_length",
]

__version__ = "0.1.0"

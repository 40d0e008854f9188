"""Slotted simulation of mixed deadline/regular flow scheduling on a single link."""

from .errors import ConfigError, InvariantError
from .traffic import (
    Exponential,
    FlowSpec,
    Pareto,
    Softness,
    Workload,
    WorkloadConfig,
    generate_workload,
)
from .policy import ActiveFlow, PolicyKind, allocate
from .engine import CompletionRecord, SimConfig, run, simulate
from .oracle import simulate_exact
from .metrics import MetricsReport, compute_report
from .experiment import ExperimentConfig, GridCellResult, emit_csv, run_experiment

__all__ = [
    "ActiveFlow",
    "CompletionRecord",
    "ConfigError",
    "ExperimentConfig",
    "Exponential",
    "FlowSpec",
    "GridCellResult",
    "InvariantError",
    "MetricsReport",
    "Pareto",
    "PolicyKind",
    "SimConfig",
    "Softness",
    "Workload",
    "WorkloadConfig",
    "allocate",
    "compute_report",
    "emit_csv",
    "generate_workload",
    "run",
    "run_experiment",
    "simulate",
    "simulate_exact",
]

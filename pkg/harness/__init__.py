"""Experiment plans, drivers, synthetic injection and self-checks."""

from harness.experiments import (
    CorrelationResult,
    SnapshotResult,
    peak_shift_pvalue,
    peak_uniformity_pvalue,
    run_convergence,
    run_correlation,
    run_experiment,
    run_ipr_sweep,
    run_snapshot,
)
from harness.plan import AXES_BY_KIND, ExperimentKind, ExperimentPlan, SweepResult
from harness.runner import ExperimentRunner, mean_and_error
from harness.selftest import CheckResult, run_selftest
from harness.synthetic import synthetic_pair_potentials

__all__ = [
    "AXES_BY_KIND",
    "CheckResult",
    "CorrelationResult",
    "ExperimentKind",
    "ExperimentPlan",
    "ExperimentRunner",
    "SnapshotResult",
    "SweepResult",
    "mean_and_error",
    "peak_shift_pvalue",
    "peak_uniformity_pvalue",
    "run_convergence",
    "run_correlation",
    "run_experiment",
    "run_ipr_sweep",
    "run_selftest",
    "run_snapshot",
    "synthetic_pair_potentials",
]

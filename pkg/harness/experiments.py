"""Experiment drivers: snapshots, IPR sweeps, convergence studies, correlation fits.

Each driver takes an ExperimentPlan of matching kind and returns a pydantic
result carrying the plan's provenance in ``meta``.
"""

import logging
from typing import Any, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats

from analytic.flat_oracle import correlation_length
from core import VERSION
from core.lattice_schema import DomainError, GridSpec
from correlation.estimators import (
    CorrEstimate,
    d_estimates,
    k_estimates,
    sample_pair_potentials,
)
from correlation.fit import DecayFit, fit_decay_length
from harness.plan import STEP_AXES, ExperimentKind, ExperimentPlan, SweepResult
from harness.runner import ExperimentRunner, ipr_values, mean_and_error
from harness.synthetic import synthetic_pair_potentials
from wavefunction.wavefunction import density_ipr, scaled_density

logger = logging.getLogger(__name__)

PEAK_BINS = 10


class SnapshotResult(BaseModel):
    """Normalized densities per duration and run, indexed [duration][run][z]."""

    model_config = ConfigDict(frozen=True)

    durations: list[float]
    z_grid: list[float]
    densities: list[list[list[float]]]
    iprs: list[list[float]]
    peaks: list[list[float]]
    meta: dict[str, Any] = Field(default_factory=dict)

    def ipr_summary(self) -> SweepResult:
        """Mean IPR per duration."""
        summary = [mean_and_error(row) for row in self.iprs]
        return SweepResult(
            axis="duration",
            axis_values=self.durations,
            means=[m for m, _ in summary],
            std_errs=[e for _, e in summary],
            meta=self.meta,
        )


class CorrelationResult(BaseModel):
    """K and D estimates, the decay fit and its comparison with the prediction."""

    model_config = ConfigDict(frozen=True)

    k_curve: list[CorrEstimate]
    d_curve: list[CorrEstimate]
    fit: Optional[DecayFit] = None
    predicted_r_c: Optional[float] = None
    ratio: Optional[float] = None
    synthetic: bool = False
    meta: dict[str, Any] = Field(default_factory=dict)


def _require(plan: ExperimentPlan, kind: ExperimentKind) -> None:
    if plan.kind is not kind:
        raise DomainError(f"plan kind is {plan.kind.value}, expected {kind.value}")


def peak_uniformity_pvalue(
    peaks: Sequence[float], lo: float, hi: float, bins: int = PEAK_BINS
) -> float:
    """Chi-square p-value of the peak positions against a uniform law on [lo, hi]."""
    counts, _ = np.histogram(np.asarray(peaks), bins=bins, range=(lo, hi))
    return float(stats.chisquare(counts).pvalue)


def peak_shift_pvalue(
    peaks_a: Sequence[float], lo_a: float, peaks_b: Sequence[float], lo_b: float
) -> float:
    """Two-sample KS p-value comparing peak offsets from each interval's left end."""
    offsets_a = np.asarray(peaks_a) - lo_a
    offsets_b = np.asarray(peaks_b) - lo_b
    return float(stats.ks_2samp(offsets_a, offsets_b).pvalue)


def run_snapshot(plan: ExperimentPlan) -> SnapshotResult:
    """Densities at each duration of the sweep.

    By default every duration sees the same noise history, so the snapshots
    are successive stages of one evolution. With independent_histories each
    duration draws its own block of realizations.

    Raises:
        DomainError: if a duration is shorter than one time step.
    """
    _require(plan, ExperimentKind.SNAPSHOT)
    runner = ExperimentRunner(plan)
    params, z = plan.base_params, runner.z_grid
    for duration in plan.sweep_values:
        if duration < runner.grid.d_tau:
            raise DomainError(
                f"duration {duration} shorter than one time step d_tau={runner.grid.d_tau}"
            )

    densities, iprs, peaks = [], [], []
    for k, duration in enumerate(plan.sweep_values):
        block = k if plan.independent_histories else 0
        thetas = runner.thetas(realization_ids=runner.realization_ids(block), t_end=duration)
        rows = [scaled_density(z, row, params.coupling) for row in thetas]
        densities.append([row.tolist() for row in rows])
        iprs.append([density_ipr(z, row) for row in rows])
        peaks.append([float(z[np.argmax(row)]) for row in rows])
        logger.info("Snapshot t=%g: mean IPR %.6g", duration, float(np.mean(iprs[-1])))

    meta = runner.meta(
        axis="duration",
        independent_histories=plan.independent_histories,
        peak_uniformity_pvalue=[
            peak_uniformity_pvalue(p, params.particle_lo, params.particle_hi) for p in peaks
        ],
    )
    return SnapshotResult(
        durations=list(plan.sweep_values),
        z_grid=z.tolist(),
        densities=densities,
        iprs=iprs,
        peaks=peaks,
        meta=meta,
    )


def run_ipr_sweep(plan: ExperimentPlan) -> SweepResult:
    """Mean IPR per coupling; Θ is sampled once and shared by every coupling."""
    _require(plan, ExperimentKind.IPR_SWEEP)
    runner = ExperimentRunner(plan)
    thetas = runner.thetas()
    means, errs = [], []
    for coupling in plan.sweep_values:
        mean, err = mean_and_error(ipr_values(runner.z_grid, thetas, coupling))
        logger.info("Coupling %g: mean IPR %.6g ± %.2g", coupling, mean, err)
        means.append(mean)
        errs.append(err)
    return SweepResult(
        axis="coupling",
        axis_values=list(plan.sweep_values),
        means=means,
        std_errs=errs,
        meta=runner.meta(axis="coupling", n_out=len(runner.z_grid)),
    )


def run_convergence(plan: ExperimentPlan) -> SweepResult:
    """Mean IPR against run count or one lattice step.

    The n_runs axis uses nested prefixes of one realization sequence; each
    step value builds a fresh lattice.

    Raises:
        DomainError: if a step value is incompatible with the cutoffs.
    """
    _require(plan, ExperimentKind.CONVERGENCE)
    runner = ExperimentRunner(plan)
    params, axis = plan.base_params, plan.sweep_axis
    results = []

    if axis == "n_runs":
        counts = [int(v) for v in plan.sweep_values]
        thetas = runner.thetas(realization_ids=range(max(counts)))
        values = ipr_values(runner.z_grid, thetas, params.coupling)
        results = [mean_and_error(values[:n]) for n in counts]
    elif axis in STEP_AXES:
        for value in plan.sweep_values:
            grid = GridSpec(**{**plan.base_grid.model_dump(), axis: value}).bind(params)
            logger.info("Convergence step %s=%g", axis, value)
            results.append(runner.mean_ipr(params, grid))
    else:
        raise DomainError(f"unsupported convergence axis '{axis}'")

    return SweepResult(
        axis=axis,
        axis_values=list(plan.sweep_values),
        means=[m for m, _ in results],
        std_errs=[e for _, e in results],
        meta=runner.meta(axis=axis),
    )


def run_correlation(plan: ExperimentPlan) -> CorrelationResult:
    """Estimate K(r) and D(r) on shared realizations and fit the decay length.

    In synthetic mode Θ is replaced by a Gaussian field whose decay length is
    plan.synthetic_decay_length, which then serves as the prediction.
    """
    _require(plan, ExperimentKind.CORRELATION)
    params, r_values = plan.base_params, list(plan.sweep_values)
    synthetic = plan.synthetic_decay_length is not None

    if synthetic:
        upper, lower = synthetic_pair_potentials(
            r_values, plan.n_runs, plan.seed, params.coupling, plan.synthetic_decay_length
        )
        predicted = plan.synthetic_decay_length
        grid = plan.base_grid
    else:
        grid = plan.base_grid.bind(params)
        upper, lower = sample_pair_potentials(
            params, grid, r_values, plan.n_runs, plan.seed, plan.workers
        )
        predicted = correlation_length(params.coupling, params.cutoff_radius)

    k_curve = k_estimates(
        upper, lower, r_values, params.coupling, params.duration, plan.estimator
    )
    d_curve = d_estimates(upper, lower, r_values, params.duration)
    fit = fit_decay_length(k_curve)
    if fit is None:
        logger.warning("K does not decay: correlation length is infinite")
        ratio = None
    else:
        ratio = fit.r_c_hat / predicted if predicted else None
        logger.info(
            "Fitted r_c %.6g ± %.2g, predicted %s", fit.r_c_hat, fit.r_c_err, predicted
        )

    meta = {
        "kind": plan.kind.value,
        "version": VERSION,
        "seed": plan.seed,
        "n_runs": plan.n_runs,
        "estimator": plan.estimator.value,
        "synthetic": synthetic,
        "params": params.model_dump(),
        "grid": grid.model_dump(),
    }
    return CorrelationResult(
        k_curve=k_curve,
        d_curve=d_curve,
        fit=fit,
        predicted_r_c=predicted,
        ratio=ratio,
        synthetic=synthetic,
        meta=meta,
    )


ExperimentResult = Union[SnapshotResult, SweepResult, CorrelationResult]

DRIVERS = {
    ExperimentKind.SNAPSHOT: run_snapshot,
    ExperimentKind.IPR_SWEEP: run_ipr_sweep,
    ExperimentKind.CONVERGENCE: run_convergence,
    ExperimentKind.CORRELATION: run_correlation,
}


def run_experiment(plan: ExperimentPlan) -> ExperimentResult:
    """Dispatch a plan to the driver for its kind."""
    return DRIVERS[plan.kind](plan)

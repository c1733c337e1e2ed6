"""Experiment plan and sweep result models."""

import math
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.lattice_schema import GridSpec, PhysParams
from correlation.estimators import KMethod


class ExperimentKind(str, Enum):
    """Experiments the harness can drive."""

    SNAPSHOT = "snapshot"
    IPR_SWEEP = "ipr_sweep"
    CONVERGENCE = "convergence"
    CORRELATION = "correlation"


# Sweep axes each experiment accepts; the first entry is the default.
AXES_BY_KIND: dict[ExperimentKind, tuple[str, ...]] = {
    ExperimentKind.SNAPSHOT: ("duration",),
    ExperimentKind.IPR_SWEEP: ("coupling",),
    ExperimentKind.CONVERGENCE: ("n_runs", "d_tau", "d_rho", "d_z"),
    ExperimentKind.CORRELATION: ("r",),
}

STEP_AXES = ("d_tau", "d_rho", "d_z")


class ExperimentPlan(BaseModel):
    """Everything needed to reproduce one experiment run."""

    model_config = ConfigDict(frozen=True)

    kind: ExperimentKind
    base_params: PhysParams
    base_grid: GridSpec
    sweep_axis: str
    sweep_values: list[float] = Field(min_length=1)
    n_runs: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**64)
    output_path: str = ""
    workers: int = Field(default=1, ge=1)
    independent_histories: bool = False
    estimator: KMethod = KMethod.BRIDGE
    synthetic_decay_length: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _check_sweep(self) -> "ExperimentPlan":
        allowed = AXES_BY_KIND[self.kind]
        if self.sweep_axis not in allowed:
            raise ValueError(
                f"sweep axis '{self.sweep_axis}' not valid for {self.kind.value}; "
                f"expected one of {', '.join(allowed)}"
            )
        for value in self.sweep_values:
            problem = _axis_problem(self, value)
            if problem:
                raise ValueError(f"sweep value {value} for '{self.sweep_axis}': {problem}")
        return self


def _axis_problem(plan: ExperimentPlan, value: float) -> Optional[str]:
    if not math.isfinite(value):
        return "must be finite"
    axis = plan.sweep_axis
    if axis == "coupling" and value < 0.0:
        return "coupling must be >= 0"
    if axis in ("duration", *STEP_AXES) and value <= 0.0:
        return "must be > 0"
    if axis == "n_runs" and (value < 1 or not float(value).is_integer()):
        return "run counts must be positive integers"
    if axis == "r":
        if value < 0.0:
            return "separation must be >= 0"
        if value > plan.base_params.cutoff_length:
            return "points ±r/2 leave the cylinder"
    return None


class SweepResult(BaseModel):
    """Mean and standard error of a quantity along one sweep axis."""

    model_config = ConfigDict(frozen=True)

    axis: str
    axis_values: list[float]
    means: list[float]
    std_errs: list[float]
    meta: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_lengths(self) -> "SweepResult":
        if not len(self.axis_values) == len(self.means) == len(self.std_errs):
            raise ValueError("axis_values, means and std_errs must have equal lengths")
        if any(e < 0.0 for e in self.std_errs):
            raise ValueError("std_errs must be non-negative")
        return self

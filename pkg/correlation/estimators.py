"""Monte Carlo estimators for the potential covariance D(t, r) and correlator K(t, r).

Both points sit on the axis at ±r/2. Every separation in one call reuses the
same realizations (common random numbers), so differences across r carry
far less noise than the individual estimates. Error bars come from the
delete-one jackknife over realizations.
"""

import logging
import math
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.lattice_schema import DomainError, GridSpec, PhysParams
from potential.potential import theta_realizations

logger = logging.getLogger(__name__)

COVARIANCE_SCALE = 32.0 * math.pi**2


class KMethod(str, Enum):
    """How K is estimated from the sampled potentials."""

    DIRECT = "direct"
    BRIDGE = "bridge"


class CorrEstimate(BaseModel):
    """Monte Carlo estimate at one separation.

    For direct K estimates the value is mean·e^{log_scale}; log_scale is the
    pooled maximum exponent subtracted for stability and is shared by every
    separation of one call.
    """

    model_config = ConfigDict(frozen=True)

    r: float = Field(ge=0.0)
    mean: float = Field(allow_inf_nan=False)
    std_err: float = Field(ge=0.0)
    n: int = Field(ge=2)
    within_light_cone: bool = True
    log_scale: float = 0.0


def jackknife(
    features: np.ndarray, statistic: Callable[[np.ndarray, int], np.ndarray]
) -> tuple[float, float]:
    """Delete-one jackknife for statistics of feature means.

    Args:
        features: (n, k) per-realization features.
        statistic: Maps means of shape (..., k) and the sample count to the
            statistic; called once on the full sample and once, vectorized,
            on all n leave-one-out samples.

    Returns:
        (estimate on the full sample, jackknife standard error).
    """
    n = features.shape[0]
    total = features.sum(axis=0)
    estimate = float(statistic(total / n, n))
    leave_one_out = statistic((total[None, :] - features) / (n - 1), n - 1)
    spread = leave_one_out - leave_one_out.mean()
    std_err = math.sqrt((n - 1) / n * float(np.sum(spread * spread)))
    return estimate, std_err


def _covariance(means: np.ndarray, n: int) -> np.ndarray:
    """Unbiased covariance from means of (x, y, x·y)."""
    return n / (n - 1) * (means[..., 2] - means[..., 0] * means[..., 1])


def _axis_points(params: PhysParams, r_values: Sequence[float]) -> tuple[np.ndarray, dict]:
    half = params.cutoff_length / 2
    for r in r_values:
        if r < 0.0:
            raise DomainError(f"separation must be >= 0, got {r}")
        if r / 2 > half:
            raise DomainError(f"points ±{r / 2} fall outside cutoff length ±{half}")
    points = sorted({0.0, *(r / 2 for r in r_values), *(-r / 2 for r in r_values)})
    return np.asarray(points), {p: i for i, p in enumerate(points)}


def sample_pair_potentials(
    params: PhysParams,
    grid: GridSpec,
    r_values: Sequence[float],
    n_runs: int,
    seed: int,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Θ at every ±r/2 (and 0) for realizations 0..n_runs−1.

    Returns:
        (upper, lower): arrays of shape (n_runs, len(r_values)) holding
        Θ(+r/2) and Θ(−r/2) per realization and separation.
    """
    if n_runs < 2:
        raise DomainError(f"need n_runs >= 2 for a covariance, got {n_runs}")
    points, index = _axis_points(params, r_values)
    thetas = theta_realizations(seed, params, grid, points, range(n_runs), workers)
    upper = thetas[:, [index[r / 2] for r in r_values]]
    lower = thetas[:, [index[-r / 2] for r in r_values]]
    return upper, lower


def d_estimates(
    upper: np.ndarray, lower: np.ndarray, r_values: Sequence[float], duration: float
) -> list[CorrEstimate]:
    """32π²·Cov(Θ₁, Θ₂) per separation from pre-sampled potentials."""
    n = upper.shape[0]
    estimates = []
    for j, r in enumerate(r_values):
        x, y = upper[:, j], lower[:, j]
        mean, err = jackknife(np.column_stack([x, y, x * y]), _covariance)
        estimates.append(
            CorrEstimate(
                r=r, mean=COVARIANCE_SCALE * mean, std_err=COVARIANCE_SCALE * err,
                n=n, within_light_cone=r <= duration,
            )
        )
    return estimates


def k_estimates(
    upper: np.ndarray,
    lower: np.ndarray,
    r_values: Sequence[float],
    coupling: float,
    duration: float,
    method: KMethod = KMethod.BRIDGE,
) -> list[CorrEstimate]:
    """K per separation from pre-sampled potentials.

    DIRECT averages e^{2c(Θ₁+Θ₂)} relative to the pooled maximum exponent.
    BRIDGE returns K(r)/K(0) = exp(−2c²·Var(Θ₁ − Θ₂)), the exponential-moment
    identity for the jointly Gaussian pair with statistically equal variances.
    """
    method = KMethod(method)
    n = upper.shape[0]
    estimates = []

    if method is KMethod.DIRECT:
        exponents = 2.0 * coupling * (upper + lower)
        log_scale = float(exponents.max())
        weights = np.exp(exponents - log_scale)
        for j, r in enumerate(r_values):
            mean, err = jackknife(weights[:, [j]], lambda m, _: m[..., 0])
            estimates.append(
                CorrEstimate(
                    r=r, mean=mean, std_err=err, n=n,
                    within_light_cone=r <= duration, log_scale=log_scale,
                )
            )
        return estimates

    def bridge(means: np.ndarray, count: int) -> np.ndarray:
        variance = count / (count - 1) * (means[..., 1] - means[..., 0] ** 2)
        return np.exp(-2.0 * coupling**2 * variance)

    for j, r in enumerate(r_values):
        gap = upper[:, j] - lower[:, j]
        mean, err = jackknife(np.column_stack([gap, gap * gap]), bridge)
        estimates.append(
            CorrEstimate(r=r, mean=mean, std_err=err, n=n, within_light_cone=r <= duration)
        )
    return estimates


def estimate_D_curve(
    params: PhysParams,
    grid: GridSpec,
    r_values: Sequence[float],
    n_runs: int,
    seed: int,
    workers: int = 1,
) -> list[CorrEstimate]:
    """estimate_D at several separations on shared realizations."""
    upper, lower = sample_pair_potentials(params, grid, r_values, n_runs, seed, workers)
    return d_estimates(upper, lower, r_values, params.duration)


def estimate_D(
    params: PhysParams,
    grid: GridSpec,
    r: float,
    n_runs: int,
    seed: int,
    workers: int = 1,
) -> CorrEstimate:
    """D(t, r) = 32π²·Cov(Θ(r/2), Θ(−r/2)) over n_runs realizations.

    Raises:
        DomainError: if n_runs < 2 or the points leave the cylinder.
    """
    return estimate_D_curve(params, grid, [r], n_runs, seed, workers)[0]


def estimate_K_curve(
    params: PhysParams,
    grid: GridSpec,
    r_values: Sequence[float],
    n_runs: int,
    seed: int,
    method: KMethod = KMethod.BRIDGE,
    workers: int = 1,
) -> list[CorrEstimate]:
    """estimate_K at several separations on shared realizations."""
    upper, lower = sample_pair_potentials(params, grid, r_values, n_runs, seed, workers)
    return k_estimates(upper, lower, r_values, params.coupling, params.duration, method)


def estimate_K(
    params: PhysParams,
    grid: GridSpec,
    r: float,
    n_runs: int,
    seed: int,
    method: KMethod = KMethod.DIRECT,
    workers: int = 1,
) -> CorrEstimate:
    """K(t, r) up to an r-independent factor.

    Raises:
        DomainError: if n_runs < 2 or the points leave the cylinder.
    """
    return estimate_K_curve(params, grid, [r], n_runs, seed, method, workers)[0]

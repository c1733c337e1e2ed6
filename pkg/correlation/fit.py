"""Exponential decay-length fit of K(t, r) against the separation."""

import logging
import math
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.lattice_schema import DomainError
from correlation.estimators import CorrEstimate

logger = logging.getLogger(__name__)

MIN_POINTS = 4


class DecayFit(BaseModel):
    """Least-squares fit ln K = intercept + slope·r with r_c = −1/slope."""

    model_config = ConfigDict(frozen=True)

    r_c_hat: float = Field(gt=0.0)
    r_c_err: float = Field(ge=0.0)
    slope: float
    intercept: float
    r_values: list[float]
    log_means: list[float]
    residuals: list[float]
    weighted: bool


def _usable(estimates: Sequence[CorrEstimate]) -> list[CorrEstimate]:
    kept = []
    for est in estimates:
        if est.mean <= 0.0:
            logger.warning("Dropping r=%g from fit: non-positive mean %g", est.r, est.mean)
        elif not est.within_light_cone:
            logger.warning("Dropping r=%g from fit: outside the light cone", est.r)
        else:
            kept.append(est)
    return kept


def fit_decay_length(estimates: Sequence[CorrEstimate]) -> Optional[DecayFit]:
    """Fit ln(mean) against r and return the decay length.

    Points are weighted by 1/σ² with σ = std_err/mean; if any σ is zero the
    fit is unweighted. Returns None (infinite correlation length) when the
    fitted slope is not negative.

    Raises:
        DomainError: if fewer than 4 distinct separations survive filtering.
    """
    kept = _usable(estimates)
    r = np.array([e.r for e in kept])
    if np.unique(r).size < MIN_POINTS:
        raise DomainError(
            f"need at least {MIN_POINTS} distinct usable separations, got {np.unique(r).size}"
        )

    means = np.array([e.mean for e in kept])
    y = np.log(means) + np.array([e.log_scale for e in kept])
    sigma = np.array([e.std_err for e in kept]) / means
    weighted = bool(np.all(sigma > 0.0))
    w = 1.0 / sigma**2 if weighted else np.ones_like(r)

    design = np.column_stack([np.ones_like(r), r])
    sqrt_w = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(design * sqrt_w[:, None], y * sqrt_w, rcond=None)
    intercept, slope = float(coef[0]), float(coef[1])
    residuals = y - design @ coef

    normal = design.T @ (design * w[:, None])
    covariance = np.linalg.inv(normal)
    if not weighted:
        dof = max(r.size - 2, 1)
        covariance *= float(residuals @ residuals) / dof
    slope_err = math.sqrt(max(covariance[1, 1], 0.0))

    if slope >= 0.0:
        logger.warning("ln K does not decay (slope %.3g); correlation length is infinite", slope)
        return None

    fit = DecayFit(
        r_c_hat=-1.0 / slope,
        r_c_err=slope_err / slope**2,
        slope=slope,
        intercept=intercept,
        r_values=r.tolist(),
        log_means=y.tolist(),
        residuals=residuals.tolist(),
        weighted=weighted,
    )
    logger.info("Fitted r_c = %.6g ± %.2g from %d points", fit.r_c_hat, fit.r_c_err, r.size)
    return fit

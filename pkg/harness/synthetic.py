"""Gaussian stand-in for Θ with a prescribed covariance.

Points on the axis carry a shared common mode plus Brownian motion running
outward from z = 0 on each side:

    Cov(a, b) = σ₀² + κ·min(|a|, |b|)   if a, b lie on the same side of 0,
                σ₀²                     otherwise.

Then Var(Θ(r/2) − Θ(−r/2)) = κ·r, so the bridge correlator decays as
exp(−2c²κ·r) and the decay length is exactly 1/(2c²κ).
"""

import logging
from typing import Sequence

import numpy as np

from core.lattice_schema import DomainError

logger = logging.getLogger(__name__)

CHOLESKY_JITTER = 1e-12


def diffusion_rate(coupling: float, decay_length: float) -> float:
    """κ that makes the bridge correlator decay over decay_length."""
    if coupling <= 0.0:
        raise DomainError("synthetic injection needs coupling > 0")
    if decay_length <= 0.0:
        raise DomainError(f"decay length must be > 0, got {decay_length}")
    return 1.0 / (2.0 * coupling**2 * decay_length)


def synthetic_covariance(
    points: Sequence[float], rate: float, common_variance: float = 1.0
) -> np.ndarray:
    """Covariance matrix of the synthetic field at the given axis points."""
    z = np.asarray(points, dtype=np.float64)
    same_side = np.sign(z)[:, None] * np.sign(z)[None, :] > 0
    brownian = np.minimum(np.abs(z)[:, None], np.abs(z)[None, :])
    return common_variance + rate * np.where(same_side, brownian, 0.0)


def sample_synthetic(
    points: Sequence[float],
    n_runs: int,
    seed: int,
    rate: float,
    common_variance: float = 1.0,
) -> np.ndarray:
    """Draw n_runs realizations by Cholesky factorisation, shape (n_runs, n_points)."""
    cov = synthetic_covariance(points, rate, common_variance)
    cov += CHOLESKY_JITTER * np.trace(cov) / len(cov) * np.eye(len(cov))
    factor = np.linalg.cholesky(cov)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    normals = rng.standard_normal((n_runs, len(cov)))
    return normals @ factor.T


def synthetic_pair_potentials(
    r_values: Sequence[float],
    n_runs: int,
    seed: int,
    coupling: float,
    decay_length: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Drop-in replacement for sample_pair_potentials with a known decay length."""
    if n_runs < 2:
        raise DomainError(f"need n_runs >= 2 for a covariance, got {n_runs}")
    if any(r < 0.0 for r in r_values):
        raise DomainError("separations must be >= 0")
    points = sorted({0.0, *(r / 2 for r in r_values), *(-r / 2 for r in r_values)})
    index = {p: i for i, p in enumerate(points)}
    rate = diffusion_rate(coupling, decay_length)
    logger.info(
        "Synthetic field: %d points, κ=%.6g, injected decay length %.6g",
        len(points), rate, decay_length,
    )
    samples = sample_synthetic(points, n_runs, seed, rate)
    upper = samples[:, [index[r / 2] for r in r_values]]
    lower = samples[:, [index[-r / 2] for r in r_values]]
    return upper, lower

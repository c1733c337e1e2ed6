"""Non-Hermitian scaling of the wave function and its inverse participation ratio.

The noise turns the evolution into Ψ ∝ e^{mηΘ}·Ψ₀, so the density is
|Ψ|² ∝ e^{2mηΘ}·|Ψ₀|², normalized per realization with the trapezoid rule on
the output grid.
"""

import logging
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.integrate import trapezoid

from core.lattice_schema import DomainError
from potential.potential import PotentialSample

logger = logging.getLogger(__name__)


class WaveFunction(BaseModel):
    """Normalized density |Ψ|² on the output grid, with its IPR."""

    model_config = ConfigDict(frozen=True)

    z_grid: list[float]
    density: list[float]
    ipr: float

    @model_validator(mode="after")
    def _check_density(self) -> "WaveFunction":
        if len(self.z_grid) != len(self.density):
            raise ValueError("density and z_grid lengths differ")
        if min(self.density) < 0.0:
            raise ValueError("density must be non-negative")
        return self

    @property
    def density_array(self) -> np.ndarray:
        return np.asarray(self.density)


def uniform_density(z_grid: Sequence[float]) -> np.ndarray:
    """Constant initial density, the default initial state."""
    return np.ones(len(z_grid))


def normalize_density(z_grid: np.ndarray, density: np.ndarray) -> np.ndarray:
    """Scale density so its trapezoid integral over z_grid is 1.

    Raises:
        DomainError: if the density is negative somewhere or integrates to 0.
    """
    if np.any(density < 0.0):
        raise DomainError("density must be non-negative")
    total = trapezoid(density, z_grid)
    if not total > 0.0:
        raise DomainError("density is identically zero on the grid")
    return density / total


def scaled_density(
    z_grid: np.ndarray,
    theta: np.ndarray,
    coupling: float,
    initial_density: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Array form of scale_and_normalize, used by the harness hot loop."""
    z_grid = np.asarray(z_grid, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    if initial_density is None:
        initial_density = uniform_density(z_grid)
    initial_density = np.asarray(initial_density, dtype=np.float64)
    if not (initial_density.shape == theta.shape == z_grid.shape):
        raise DomainError(
            f"length mismatch: z_grid {z_grid.shape}, theta {theta.shape}, "
            f"initial density {initial_density.shape}"
        )
    if coupling < 0.0:
        raise DomainError(f"coupling must be >= 0, got {coupling}")

    exponent = coupling * theta
    weights = np.exp(2.0 * (exponent - exponent.max()))
    return normalize_density(z_grid, weights * initial_density)


def density_ipr(z_grid: np.ndarray, density: np.ndarray) -> float:
    """∫|Ψ|⁴ dz by the trapezoid rule."""
    return float(trapezoid(np.square(density), z_grid))


def scale_and_normalize(
    theta: PotentialSample,
    coupling: float,
    initial_density: Optional[Sequence[float]] = None,
) -> WaveFunction:
    """Apply e^{coupling·Θ} to the initial state and normalize.

    Args:
        theta: Θ on the output grid for one realization.
        coupling: mη ≥ 0.
        initial_density: |Ψ₀|² on the same grid; uniform when omitted.

    Returns:
        The normalized WaveFunction with its IPR filled in.

    Raises:
        DomainError: on an all-zero or mismatched initial density.
    """
    z = theta.z_array
    density = scaled_density(
        z,
        theta.theta_array,
        coupling,
        None if initial_density is None else np.asarray(initial_density),
    )
    return WaveFunction(
        z_grid=theta.z_grid,
        density=density.tolist(),
        ipr=density_ipr(z, density),
    )


def ipr(wf: WaveFunction) -> float:
    """Inverse participation ratio of a normalized wave function.

    Equals 1 for a uniform density on the unit interval and grows as the
    density concentrates; a single interior grid point carrying all the
    mass gives 1/Δz (2/Δz at an endpoint, where the trapezoid weight halves).
    """
    return density_ipr(np.asarray(wf.z_grid), wf.density_array)

"""Parameter, grid and cell-indexing schema for the localization laboratory.

Defines the physical knobs of a run and the cylindrical spacetime partition
(τ, ρ, z′) that the noise, potential, correlation and harness modules all
index into. Cells are addressed by integer keys relative to the grid origin;
coordinates are always evaluated at cell centers.
"""

import math
from typing import Optional, Protocol

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class DomainError(ValueError):
    """An input lies outside the domain of the requested operation."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class Cutoffs(Protocol):
    """Anything carrying the observable-universe cylinder (PhysParams, NoiseField)."""

    cutoff_radius: float
    cutoff_length: float


class PhysParams(BaseModel):
    """Physical parameters of one simulated evolution.

    coupling is the product mη; cutoff_radius and cutoff_length are the
    radius Λ and length l_z of the cylindrical observable universe; the
    particle lives on [particle_lo, particle_hi] along the z axis.
    """

    model_config = ConfigDict(frozen=True)

    coupling: float = Field(ge=0.0, allow_inf_nan=False)
    cutoff_radius: float = Field(gt=0.0, allow_inf_nan=False)
    cutoff_length: float = Field(gt=0.0, allow_inf_nan=False)
    duration: float = Field(gt=0.0, allow_inf_nan=False)
    particle_lo: float = Field(default=-0.5, allow_inf_nan=False)
    particle_hi: float = Field(default=0.5, allow_inf_nan=False)

    @model_validator(mode="after")
    def _check_particle_interval(self) -> "PhysParams":
        """Enforce particle_lo < particle_hi inside [−l_z/2, l_z/2]."""
        if not self.particle_lo < self.particle_hi:
            raise ValueError(
                f"invariant particle_lo < particle_hi violated "
                f"({self.particle_lo} >= {self.particle_hi})"
            )
        half = self.cutoff_length / 2
        if self.particle_lo < -half or self.particle_hi > half:
            raise ValueError(
                f"invariant [particle_lo, particle_hi] ⊆ [−cutoff_length/2, "
                f"cutoff_length/2] violated ([{self.particle_lo}, "
                f"{self.particle_hi}] vs ±{half})"
            )
        return self

    @property
    def particle_width(self) -> float:
        return self.particle_hi - self.particle_lo


class GridSpec(BaseModel):
    """Discretization steps Δρ, Δz′, Δτ and the output z resolution.

    n_out=None means "one output point per Δz′ across the particle interval";
    use bind() to resolve it against a PhysParams.
    """

    model_config = ConfigDict(frozen=True)

    d_rho: float = Field(gt=0.0, allow_inf_nan=False)
    d_z: float = Field(gt=0.0, allow_inf_nan=False)
    d_tau: float = Field(gt=0.0, allow_inf_nan=False)
    n_out: Optional[int] = Field(default=None, ge=2)

    def bind(self, params: PhysParams) -> "GridSpec":
        """Check the grid against params and return it with n_out resolved.

        Raises:
            DomainError: if Δρ exceeds the cutoff radius or Δz′ exceeds the
                particle interval width.
        """
        if self.d_rho > params.cutoff_radius:
            raise DomainError(
                f"d_rho={self.d_rho} exceeds cutoff_radius={params.cutoff_radius}"
            )
        if self.d_z > params.particle_width:
            raise DomainError(
                f"d_z={self.d_z} exceeds particle interval width "
                f"{params.particle_width}"
            )
        if self.n_out is not None:
            return self
        n_out = max(2, int(round(params.particle_width / self.d_z)) + 1)
        return self.model_copy(update={"n_out": n_out})

    def output_grid(self, params: PhysParams) -> np.ndarray:
        """Uniform n_out-point grid over the particle interval."""
        bound = self.bind(params)
        return np.linspace(params.particle_lo, params.particle_hi, bound.n_out)


class CellKey(BaseModel):
    """Integer indices of one cylindrical spacetime cell (τ, ρ, z′)."""

    model_config = ConfigDict(frozen=True)

    i_tau: int
    i_rho: int = Field(ge=0)
    i_z: int


class LatticeExtent(BaseModel):
    """Number of ρ cells and half the number of z′ cells inside the cylinder.

    Valid keys satisfy 0 ≤ i_rho < n_rho and −n_z_half ≤ i_z < n_z_half, which
    keeps i_rho·Δρ < Λ and |i_z·Δz′| ≤ l_z/2.
    """

    model_config = ConfigDict(frozen=True)

    n_rho: int = Field(ge=1)
    n_z_half: int = Field(ge=1)

    @property
    def n_z(self) -> int:
        return 2 * self.n_z_half

    def z_indices(self) -> np.ndarray:
        return np.arange(-self.n_z_half, self.n_z_half, dtype=np.int64)

    def rho_indices(self) -> np.ndarray:
        return np.arange(self.n_rho, dtype=np.int64)


# Absorbs representation error in ratios like 10/0.1.
_INDEX_SLACK = 1e-9


def lattice_extent(cutoffs: Cutoffs, grid: GridSpec) -> LatticeExtent:
    """Count the cells of the truncated cylinder for this grid."""
    n_rho = int(math.ceil(cutoffs.cutoff_radius / grid.d_rho - _INDEX_SLACK))
    n_z_half = int(math.floor(cutoffs.cutoff_length / (2 * grid.d_z) + _INDEX_SLACK))
    if n_z_half < 1:
        raise DomainError(
            f"d_z={grid.d_z} leaves no cell inside cutoff_length={cutoffs.cutoff_length}"
        )
    return LatticeExtent(n_rho=max(n_rho, 1), n_z_half=n_z_half)


def check_key(key: CellKey, grid: GridSpec, cutoffs: Cutoffs) -> None:
    """Raise DomainError if key lies outside the cylinder."""
    extent = lattice_extent(cutoffs, grid)
    if key.i_rho >= extent.n_rho:
        raise DomainError(
            f"i_rho={key.i_rho} outside cutoff radius "
            f"({key.i_rho}·{grid.d_rho} >= {cutoffs.cutoff_radius})"
        )
    if not -extent.n_z_half <= key.i_z < extent.n_z_half:
        raise DomainError(
            f"i_z={key.i_z} outside cutoff length {cutoffs.cutoff_length}"
        )


def cell_center(
    key: CellKey, grid: GridSpec, cutoffs: Cutoffs
) -> tuple[float, float, float]:
    """Return the (τ, ρ, z′) center of a cell.

    Raises:
        DomainError: if the key lies outside the cutoffs.
    """
    check_key(key, grid, cutoffs)
    return (
        (key.i_tau + 0.5) * grid.d_tau,
        (key.i_rho + 0.5) * grid.d_rho,
        (key.i_z + 0.5) * grid.d_z,
    )


def key_for_center(tau: float, rho: float, z: float, grid: GridSpec) -> CellKey:
    """Inverse of cell_center: the key whose center is (tau, rho, z)."""
    return CellKey(
        i_tau=int(round(tau / grid.d_tau - 0.5)),
        i_rho=int(round(rho / grid.d_rho - 0.5)),
        i_z=int(round(z / grid.d_z - 0.5)),
    )


def cell_volume(key: CellKey, grid: GridSpec, cutoffs: Cutoffs) -> float:
    """Azimuthally integrated cell volume 2π·ρ_c·Δρ·Δz′·Δτ."""
    _, rho, _ = cell_center(key, grid, cutoffs)
    return 2 * math.pi * rho * grid.d_rho * grid.d_z * grid.d_tau


def rho_volumes(grid: GridSpec, i_rho: np.ndarray) -> np.ndarray:
    """Vectorized cell_volume for arrays of ρ indices (no cutoff check)."""
    rho = (np.asarray(i_rho, dtype=np.float64) + 0.5) * grid.d_rho
    return 2 * np.pi * rho * grid.d_rho * grid.d_z * grid.d_tau

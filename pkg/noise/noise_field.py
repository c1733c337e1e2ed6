"""Keyed white-noise field over the cylindrical spacetime lattice.

Every cell (τ, ρ, z′) of a realization carries an independent Gaussian
increment ΔW with variance equal to the cell volume 2πρΔρΔz′Δτ. Values are
pure functions of (seed, realization_id, cell key), so any subset of cells can
be generated in any order, on any worker, with identical results.
"""

import logging
import math
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.lattice_schema import (
    CellKey,
    DomainError,
    GridSpec,
    LatticeExtent,
    PhysParams,
    cell_volume,
    lattice_extent,
    rho_volumes,
)
from noise.philox import standard_normals

logger = logging.getLogger(__name__)

# Realizations evaluated together in stochastic_integral_batch.
_BATCH_CHUNK = 256

CellWeight = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
CellPredicate = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


class NoiseField(BaseModel):
    """One realization of the white-noise field.

    The cutoffs belong to the field: they fix which cells exist. Duration and
    coupling belong to the particle and are supplied where Θ is evaluated.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=0, lt=2**64)
    grid: GridSpec
    realization_id: int = Field(default=0, ge=0)
    cutoff_radius: float = Field(gt=0.0, allow_inf_nan=False)
    cutoff_length: float = Field(gt=0.0, allow_inf_nan=False)

    @classmethod
    def for_params(
        cls, seed: int, params: PhysParams, grid: GridSpec, realization_id: int = 0
    ) -> "NoiseField":
        """Build the field living in the cylinder described by params."""
        return cls(
            seed=seed,
            grid=grid,
            realization_id=realization_id,
            cutoff_radius=params.cutoff_radius,
            cutoff_length=params.cutoff_length,
        )

    def with_realization(self, realization_id: int) -> "NoiseField":
        return self.model_copy(update={"realization_id": realization_id})

    @property
    def extent(self) -> LatticeExtent:
        return lattice_extent(self, self.grid)

    def matches(self, params: PhysParams, grid: GridSpec) -> bool:
        """True when params and grid describe this field's lattice."""
        return (
            self.cutoff_radius == params.cutoff_radius
            and self.cutoff_length == params.cutoff_length
            and self.grid.d_rho == grid.d_rho
            and self.grid.d_z == grid.d_z
            and self.grid.d_tau == grid.d_tau
        )


class CellBlock(BaseModel):
    """Half-open index box [start, stop) along each lattice axis."""

    model_config = ConfigDict(frozen=True)

    tau_range: tuple[int, int]
    rho_range: tuple[int, int]
    z_range: tuple[int, int]

    @model_validator(mode="after")
    def _check_ranges(self) -> "CellBlock":
        for name in ("tau_range", "rho_range", "z_range"):
            start, stop = getattr(self, name)
            if stop < start:
                raise ValueError(f"{name} stop {stop} < start {start}")
        if self.rho_range[0] < 0:
            raise ValueError("rho_range must start at a non-negative index")
        return self

    @property
    def size(self) -> int:
        return math.prod(stop - start for start, stop in (
            self.tau_range, self.rho_range, self.z_range
        ))

    def indices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flattened (i_tau, i_rho, i_z) arrays in C order."""
        axes = [np.arange(*r, dtype=np.int64) for r in (
            self.tau_range, self.rho_range, self.z_range
        )]
        i_tau, i_rho, i_z = np.meshgrid(*axes, indexing="ij")
        return i_tau.ravel(), i_rho.ravel(), i_z.ravel()


def _check_indices(field: NoiseField, i_rho: np.ndarray, i_z: np.ndarray) -> None:
    extent = field.extent
    if i_rho.size == 0:
        return
    if i_rho.min() < 0 or i_rho.max() >= extent.n_rho:
        raise DomainError(
            f"i_rho outside [0, {extent.n_rho}) for cutoff_radius={field.cutoff_radius}"
        )
    if i_z.min() < -extent.n_z_half or i_z.max() >= extent.n_z_half:
        raise DomainError(
            f"i_z outside [{-extent.n_z_half}, {extent.n_z_half}) for "
            f"cutoff_length={field.cutoff_length}"
        )


def draw(field: NoiseField, key: CellKey) -> float:
    """The increment ΔW of one cell.

    Raises:
        DomainError: if the key lies outside the field's cutoffs.
    """
    volume = cell_volume(key, field.grid, field)
    normal = standard_normals(
        field.seed, field.realization_id, key.i_tau, key.i_rho, key.i_z
    )
    return float(normal) * math.sqrt(volume)


def draw_block(field: NoiseField, i_tau, i_rho, i_z) -> np.ndarray:
    """Vectorized draw for broadcast index arrays.

    Returns exactly the values draw() gives for each key.
    """
    i_tau, i_rho, i_z = np.broadcast_arrays(
        np.asarray(i_tau, dtype=np.int64),
        np.asarray(i_rho, dtype=np.int64),
        np.asarray(i_z, dtype=np.int64),
    )
    _check_indices(field, i_rho, i_z)
    normals = standard_normals(field.seed, field.realization_id, i_tau, i_rho, i_z)
    return normals * np.sqrt(rho_volumes(field.grid, i_rho))


def _masked_weights(
    field: NoiseField,
    weight: CellWeight,
    domain: CellBlock,
    where: Optional[CellPredicate],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    i_tau, i_rho, i_z = domain.indices()
    if where is not None:
        mask = np.asarray(where(i_tau, i_rho, i_z), dtype=bool)
        i_tau, i_rho, i_z = i_tau[mask], i_rho[mask], i_z[mask]
    _check_indices(field, i_rho, i_z)
    values = np.asarray(weight(i_tau, i_rho, i_z), dtype=np.float64)
    values = np.broadcast_to(values, i_tau.shape)
    if not np.all(np.isfinite(values)):
        raise DomainError("weight is not finite on the integration domain")
    return i_tau, i_rho, i_z, values


def stochastic_integral(
    field: NoiseField,
    weight: CellWeight,
    domain: CellBlock,
    where: Optional[CellPredicate] = None,
) -> float:
    """Σ weight(cell)·ΔW(cell) over the cells of domain selected by where.

    weight and where receive flattened (i_tau, i_rho, i_z) arrays. An empty
    domain integrates to exactly 0.0.
    """
    i_tau, i_rho, i_z, values = _masked_weights(field, weight, domain, where)
    if values.size == 0:
        return 0.0
    increments = draw_block(field, i_tau, i_rho, i_z)
    return float(np.sum(values * increments))


def stochastic_integral_batch(
    field: NoiseField,
    weight: CellWeight,
    domain: CellBlock,
    realization_ids,
    where: Optional[CellPredicate] = None,
) -> np.ndarray:
    """stochastic_integral evaluated for many realizations of the same field."""
    realization_ids = np.asarray(realization_ids, dtype=np.int64)
    i_tau, i_rho, i_z, values = _masked_weights(field, weight, domain, where)
    out = np.zeros(realization_ids.shape[0])
    if values.size == 0:
        return out
    scaled = values * np.sqrt(rho_volumes(field.grid, i_rho))
    for start in range(0, realization_ids.shape[0], _BATCH_CHUNK):
        ids = realization_ids[start:start + _BATCH_CHUNK, None]
        normals = standard_normals(field.seed, ids, i_tau, i_rho, i_z)
        out[start:start + _BATCH_CHUNK] = np.sum(normals * scaled, axis=1)
    logger.debug(
        "Integrated %d cells over %d realizations", values.size, realization_ids.size
    )
    return out


def integral_variance(
    field: NoiseField,
    weight: CellWeight,
    domain: CellBlock,
    where: Optional[CellPredicate] = None,
) -> float:
    """Σ weight²·volume, the exact variance of stochastic_integral."""
    _, i_rho, _, values = _masked_weights(field, weight, domain, where)
    return float(np.sum(values ** 2 * rho_volumes(field.grid, i_rho)))

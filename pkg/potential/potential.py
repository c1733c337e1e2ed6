"""Cumulative noise potential Θ(t, z) on the particle's output grid.

Θ at a point z sums every cell increment whose retarded time lands inside the
evolution window, weighted by the inverse distance 1/(4πd):

    Θ(t, z) = Σ ΔW(τ, ρ, z′) / (4π·d),   d = √(ρ² + (z − z′)²),

over cells whose τ-center lies in [t_start − d, t_end − d]. Geometry is
shared by every realization; only the keyed draws change.
"""

import logging
import math
import time
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from core.lattice_schema import DomainError, GridSpec, PhysParams, rho_volumes
from core.parallel import map_ordered
from noise.noise_field import NoiseField
from noise.philox import standard_normals

logger = logging.getLogger(__name__)


class PotentialSample(BaseModel):
    """Θ evaluated on the output grid for one realization."""

    model_config = ConfigDict(frozen=True)

    z_grid: list[float]
    theta: list[float]
    params: PhysParams
    grid: GridSpec
    realization_id: int

    @model_validator(mode="after")
    def _check_shape(self) -> "PotentialSample":
        if len(self.z_grid) != len(self.theta):
            raise ValueError(
                f"z_grid has {len(self.z_grid)} points but theta has {len(self.theta)}"
            )
        if not all(math.isfinite(v) for v in self.theta):
            raise ValueError("theta contains non-finite values")
        return self

    @property
    def z_array(self) -> np.ndarray:
        return np.asarray(self.z_grid)

    @property
    def theta_array(self) -> np.ndarray:
        return np.asarray(self.theta)


def support_window(
    rho: float, dz: float, duration: float, t_start: float = 0.0
) -> tuple[float, float]:
    """τ interval [t_start − d, duration − d] whose cells reach the point.

    Returns (lo, hi); the window is empty when hi < lo.

    Raises:
        DomainError: if rho = dz = 0, where the 1/d weight is undefined.
    """
    d = math.hypot(rho, dz)
    if d == 0.0:
        raise DomainError("degenerate distance: rho = dz = 0")
    return t_start - d, duration - d


def _check_field(field: NoiseField, params: PhysParams, grid: GridSpec) -> None:
    if not field.matches(params, grid):
        raise DomainError(
            "noise field lattice (cutoffs, steps) does not match params and grid"
        )


def theta_window(
    field: NoiseField,
    params: PhysParams,
    grid: GridSpec,
    z_points: Sequence[float],
    t_start: float,
    t_end: float,
) -> np.ndarray:
    """Θ accumulated over the time window [t_start, t_end] at each z point.

    Contributions from disjoint windows use disjoint cells, so
    theta_window(0, a) + theta_window(a, b) equals theta_window(0, b) up to
    rounding.

    Raises:
        DomainError: if a point lies outside the cylinder, the window is
            inverted, or the field's lattice does not match params and grid.
    """
    _check_field(field, params, grid)
    z_points = np.asarray(z_points, dtype=np.float64)
    half = params.cutoff_length / 2
    if z_points.size and np.max(np.abs(z_points)) > half:
        raise DomainError(f"evaluation point outside cutoff length ±{half}")
    if t_end < t_start:
        raise DomainError(f"time window inverted: [{t_start}, {t_end}]")

    extent = field.extent
    i_z = extent.z_indices()
    z_centers = (i_z + 0.5) * grid.d_z
    separation = z_points[None, :] - z_centers[:, None]
    row_totals = np.zeros((extent.n_rho, z_points.size))

    for i_rho in range(extent.n_rho):
        rho = (i_rho + 0.5) * grid.d_rho
        d = np.hypot(rho, separation)
        lo = np.ceil((t_start - d) / grid.d_tau - 0.5).astype(np.int64)
        hi = np.floor((t_end - d) / grid.d_tau - 0.5).astype(np.int64)
        if np.all(hi < lo):
            continue

        base = lo.min(axis=1)
        span = int((hi.max(axis=1) - base).max()) + 1
        i_tau = base[:, None] + np.arange(span, dtype=np.int64)
        normals = standard_normals(
            field.seed, field.realization_id, i_tau, i_rho, i_z[:, None]
        )
        increments = normals * math.sqrt(float(rho_volumes(grid, i_rho)))

        prefix = np.zeros((i_z.size, span + 1))
        np.cumsum(increments, axis=1, out=prefix[:, 1:])
        upper = np.take_along_axis(prefix, np.clip(hi - base[:, None] + 1, 0, span), axis=1)
        lower = np.take_along_axis(prefix, np.clip(lo - base[:, None], 0, span), axis=1)
        window = np.where(hi >= lo, upper - lower, 0.0)
        row_totals[i_rho] = np.sum(window / (4 * np.pi * d), axis=0)

    return np.array([math.fsum(column) for column in row_totals.T])


def theta(field: NoiseField, params: PhysParams, grid: GridSpec, z: float) -> float:
    """Θ(duration, z) at one point of the particle interval.

    Raises:
        DomainError: if z lies outside [particle_lo, particle_hi].
    """
    if not params.particle_lo <= z <= params.particle_hi:
        raise DomainError(
            f"z={z} outside particle interval "
            f"[{params.particle_lo}, {params.particle_hi}]"
        )
    return float(theta_window(field, params, grid, [z], 0.0, params.duration)[0])


def sample_potential(
    field: NoiseField,
    params: PhysParams,
    grid: GridSpec,
    z_grid: Optional[Sequence[float]] = None,
) -> PotentialSample:
    """Θ(duration, ·) on the output grid (default: grid.output_grid(params))."""
    bound = grid.bind(params)
    if z_grid is None:
        z_grid = bound.output_grid(params)
    z_grid = np.asarray(z_grid, dtype=np.float64)
    if z_grid.min() < params.particle_lo or z_grid.max() > params.particle_hi:
        raise DomainError("output grid extends past the particle interval")

    values = theta_window(field, params, bound, z_grid, 0.0, params.duration)
    logger.debug(
        "Sampled Θ for realization %d on %d points", field.realization_id, z_grid.size
    )
    return PotentialSample(
        z_grid=z_grid.tolist(),
        theta=values.tolist(),
        params=params,
        grid=bound,
        realization_id=field.realization_id,
    )


def _theta_task(task: tuple) -> np.ndarray:
    seed, realization_id, params, grid, z_points, t_start, t_end = task
    field = NoiseField.for_params(seed, params, grid, realization_id)
    return theta_window(field, params, grid, z_points, t_start, t_end)


def theta_realizations(
    seed: int,
    params: PhysParams,
    grid: GridSpec,
    z_points: Sequence[float],
    realization_ids: Sequence[int],
    workers: int = 1,
    t_start: float = 0.0,
    t_end: Optional[float] = None,
) -> np.ndarray:
    """Θ at z_points for many realizations, shape (len(realization_ids), len(z_points)).

    Rows follow realization_ids order whatever the worker count.
    """
    t_end = params.duration if t_end is None else t_end
    z_points = np.asarray(z_points, dtype=np.float64)
    tasks = [
        (seed, int(rid), params, grid, z_points, t_start, t_end)
        for rid in realization_ids
    ]
    started = time.perf_counter()
    rows = map_ordered(_theta_task, tasks, workers)
    logger.info(
        "Θ for %d realizations at %d points in %.2fs",
        len(tasks), z_points.size, time.perf_counter() - started,
    )
    if not rows:
        return np.zeros((0, z_points.size))
    return np.vstack(rows)

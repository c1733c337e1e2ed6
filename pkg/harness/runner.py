"""Run orchestration shared by every experiment.

Owns the seeding policy: realization_id equals the run index, offset by
whole blocks of n_runs when an experiment needs independent histories.
Sweeps over physical parameters reuse the same ids (common random numbers);
sweeps over lattice steps cannot, since the cells themselves change.
"""

import logging
import time
from typing import Optional, Sequence

import numpy as np

from core import VERSION
from core.lattice_schema import GridSpec, PhysParams
from harness.plan import ExperimentPlan
from potential.potential import theta_realizations
from wavefunction.wavefunction import density_ipr, scaled_density

logger = logging.getLogger(__name__)


def mean_and_error(values: Sequence[float]) -> tuple[float, float]:
    """Sample mean and its standard error (0 for a single value)."""
    values = np.asarray(values, dtype=np.float64)
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / np.sqrt(values.size))


def ipr_values(z_grid: np.ndarray, thetas: np.ndarray, coupling: float) -> np.ndarray:
    """IPR of the scaled density for every row of thetas."""
    return np.array(
        [density_ipr(z_grid, scaled_density(z_grid, row, coupling)) for row in thetas]
    )


class ExperimentRunner:
    """Θ sampling and IPR averaging for one ExperimentPlan."""

    def __init__(self, plan: ExperimentPlan):
        self.plan = plan
        self.grid = plan.base_grid.bind(plan.base_params)
        self.z_grid = self.grid.output_grid(plan.base_params)

    def realization_ids(self, block: int = 0, n_runs: Optional[int] = None) -> range:
        """Run indices of the given block of n_runs consecutive realizations."""
        n = self.plan.n_runs if n_runs is None else n_runs
        return range(block * n, (block + 1) * n)

    def thetas(
        self,
        params: Optional[PhysParams] = None,
        grid: Optional[GridSpec] = None,
        z_grid: Optional[np.ndarray] = None,
        realization_ids: Optional[Sequence[int]] = None,
        t_start: float = 0.0,
        t_end: Optional[float] = None,
    ) -> np.ndarray:
        """Θ rows, one per realization, on the output grid."""
        params = self.plan.base_params if params is None else params
        grid = self.grid if grid is None else grid
        z_grid = self.z_grid if z_grid is None else z_grid
        ids = self.realization_ids() if realization_ids is None else realization_ids
        return theta_realizations(
            self.plan.seed, params, grid, z_grid, ids,
            workers=self.plan.workers, t_start=t_start, t_end=t_end,
        )

    def mean_ipr(
        self,
        params: Optional[PhysParams] = None,
        grid: Optional[GridSpec] = None,
        n_runs: Optional[int] = None,
    ) -> tuple[float, float]:
        """Mean IPR and standard error over n_runs realizations."""
        params = self.plan.base_params if params is None else params
        grid = self.grid if grid is None else grid
        z_grid = grid.output_grid(params)
        start = time.perf_counter()
        thetas = self.thetas(params, grid, z_grid, self.realization_ids(n_runs=n_runs))
        mean, err = mean_and_error(ipr_values(z_grid, thetas, params.coupling))
        logger.info(
            "Mean IPR %.6g ± %.2g over %d runs in %.2fs",
            mean, err, thetas.shape[0], time.perf_counter() - start,
        )
        return mean, err

    def meta(self, **extra) -> dict:
        """Provenance stamped on every result of this plan."""
        plan = self.plan
        meta = {
            "kind": plan.kind.value,
            "version": VERSION,
            "seed": plan.seed,
            "n_runs": plan.n_runs,
            "params": plan.base_params.model_dump(),
            "grid": self.grid.model_dump(),
        }
        meta.update(extra)
        return meta

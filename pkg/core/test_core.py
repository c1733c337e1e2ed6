"""Tests for the parameter, grid and cell-indexing schema."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from core.lattice_schema import (
    CellKey,
    DomainError,
    GridSpec,
    PhysParams,
    cell_center,
    cell_volume,
    key_for_center,
    lattice_extent,
    rho_volumes,
)
from core.parallel import map_ordered


@pytest.fixture
def params() -> PhysParams:
    return PhysParams(coupling=2.0, cutoff_radius=2.0, cutoff_length=4.0, duration=0.5)


@pytest.fixture
def grid() -> GridSpec:
    return GridSpec(d_rho=0.1, d_z=0.02, d_tau=0.01)


class TestPhysParams:

    def test_defaults_particle_interval(self, params):
        assert params.particle_lo == -0.5
        assert params.particle_hi == 0.5
        assert params.particle_width == 1.0

    def test_negative_coupling_rejected(self):
        with pytest.raises(ValidationError):
            PhysParams(coupling=-1.0, cutoff_radius=1, cutoff_length=2, duration=1)

    @pytest.mark.parametrize("field", ["cutoff_radius", "cutoff_length", "duration"])
    def test_non_positive_rejected(self, field):
        values = dict(coupling=1.0, cutoff_radius=1.0, cutoff_length=2.0, duration=1.0)
        values[field] = 0.0
        with pytest.raises(ValidationError):
            PhysParams(**values)

    def test_inverted_interval_rejected(self):
        with pytest.raises(ValidationError, match="particle_lo < particle_hi"):
            PhysParams(
                coupling=1, cutoff_radius=1, cutoff_length=2, duration=1,
                particle_lo=0.3, particle_hi=0.1,
            )

    def test_interval_outside_cylinder_rejected(self):
        with pytest.raises(ValidationError, match="cutoff_length"):
            PhysParams(
                coupling=1, cutoff_radius=1, cutoff_length=0.5, duration=1,
            )

    def test_frozen(self, params):
        with pytest.raises(ValidationError):
            params.coupling = 3.0


class TestGridSpec:

    def test_bind_resolves_default_resolution(self, params, grid):
        assert grid.bind(params).n_out == 51

    def test_bind_keeps_explicit_resolution(self, params):
        grid = GridSpec(d_rho=0.1, d_z=0.02, d_tau=0.01, n_out=7)
        assert grid.bind(params).n_out == 7

    def test_bind_rejects_coarse_radius(self, params):
        with pytest.raises(DomainError, match="d_rho"):
            GridSpec(d_rho=3.0, d_z=0.02, d_tau=0.01).bind(params)

    def test_bind_rejects_coarse_z(self, params):
        with pytest.raises(DomainError, match="d_z"):
            GridSpec(d_rho=0.1, d_z=2.0, d_tau=0.01).bind(params)

    def test_output_grid_spans_interval(self, params, grid):
        z = grid.output_grid(params)
        assert z[0] == params.particle_lo
        assert z[-1] == params.particle_hi
        assert len(z) == 51

    def test_n_out_minimum(self):
        with pytest.raises(ValidationError):
            GridSpec(d_rho=0.1, d_z=0.1, d_tau=0.1, n_out=1)


class TestLattice:

    def test_extent_counts(self, params, grid):
        extent = lattice_extent(params, grid)
        assert extent.n_rho == 20
        assert extent.n_z_half == 100
        assert extent.n_z == 200

    def test_extent_keeps_cells_inside(self, params, grid):
        extent = lattice_extent(params, grid)
        assert (extent.n_rho - 1) * grid.d_rho < params.cutoff_radius
        assert extent.n_z_half * grid.d_z <= params.cutoff_length / 2 + 1e-12

    def test_center_of_origin_cell(self, params, grid):
        tau, rho, z = cell_center(CellKey(i_tau=0, i_rho=0, i_z=0), grid, params)
        assert tau == pytest.approx(0.005)
        assert rho == pytest.approx(0.05)
        assert z == pytest.approx(0.01)

    @pytest.mark.parametrize("i_tau,i_rho,i_z", [(0, 0, 0), (-7, 3, -100), (42, 19, 99)])
    def test_center_round_trip(self, params, grid, i_tau, i_rho, i_z):
        key = CellKey(i_tau=i_tau, i_rho=i_rho, i_z=i_z)
        assert key_for_center(*cell_center(key, grid, params), grid) == key

    def test_out_of_radius_rejected(self, params, grid):
        with pytest.raises(DomainError, match="i_rho"):
            cell_center(CellKey(i_tau=0, i_rho=20, i_z=0), grid, params)

    def test_out_of_length_rejected(self, params, grid):
        with pytest.raises(DomainError, match="i_z"):
            cell_volume(CellKey(i_tau=0, i_rho=0, i_z=100), grid, params)

    def test_negative_rho_index_rejected(self):
        with pytest.raises(ValidationError):
            CellKey(i_tau=0, i_rho=-1, i_z=0)

    def test_volume_formula(self, params, grid):
        key = CellKey(i_tau=3, i_rho=4, i_z=-2)
        expected = 2 * math.pi * 0.45 * 0.1 * 0.02 * 0.01
        assert cell_volume(key, grid, params) == pytest.approx(expected, rel=1e-14)

    def test_volumes_tile_the_disk(self, params, grid):
        extent = lattice_extent(params, grid)
        total = rho_volumes(grid, extent.rho_indices()).sum()
        disk = math.pi * (extent.n_rho * grid.d_rho) ** 2 * grid.d_z * grid.d_tau
        assert total == pytest.approx(disk, rel=1e-12)

    def test_vectorized_volumes_match_scalar(self, params, grid):
        keys = [CellKey(i_tau=0, i_rho=i, i_z=0) for i in range(5)]
        scalar = [cell_volume(k, grid, params) for k in keys]
        np.testing.assert_allclose(rho_volumes(grid, np.arange(5)), scalar, rtol=1e-15)


def _square(x: int) -> int:
    return x * x


class TestMapOrdered:

    def test_serial(self):
        assert map_ordered(_square, range(5)) == [0, 1, 4, 9, 16]

    def test_parallel_keeps_order(self):
        assert map_ordered(_square, range(10), workers=2) == [i * i for i in range(10)]

    def test_empty(self):
        assert map_ordered(_square, [], workers=4) == []

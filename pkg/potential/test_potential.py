"""Tests for the cumulative noise potential and its binary dump."""

import math

import numpy as np
import pytest
from scipy import stats

from core.lattice_schema import DomainError, GridSpec, PhysParams
from noise.noise_field import CellBlock, NoiseField, stochastic_integral
from potential.dump import read_dump, write_dump
from potential.potential import (
    sample_potential,
    support_window,
    theta,
    theta_realizations,
    theta_window,
)


@pytest.fixture
def params() -> PhysParams:
    return PhysParams(coupling=2.0, cutoff_radius=1.0, cutoff_length=2.0, duration=0.3)


@pytest.fixture
def grid() -> GridSpec:
    return GridSpec(d_rho=0.1, d_z=0.05, d_tau=0.02)


@pytest.fixture
def field(params, grid) -> NoiseField:
    return NoiseField.for_params(seed=99, params=params, grid=grid)


def _theta_by_integral(field, params, grid, z0, t_start, t_end):
    """Θ at z0 rebuilt cell by cell through the generic stochastic integral."""
    extent = field.extent
    d_max = math.hypot(params.cutoff_radius, params.cutoff_length)
    block = CellBlock(
        tau_range=(int(math.floor((t_start - d_max) / grid.d_tau)) - 1,
                   int(math.ceil(t_end / grid.d_tau)) + 1),
        rho_range=(0, extent.n_rho),
        z_range=(-extent.n_z_half, extent.n_z_half),
    )

    def distance(i_rho, i_z):
        return np.hypot((i_rho + 0.5) * grid.d_rho, z0 - (i_z + 0.5) * grid.d_z)

    def weight(i_tau, i_rho, i_z):
        return 1.0 / (4 * np.pi * distance(i_rho, i_z))

    def inside(i_tau, i_rho, i_z):
        tau = (i_tau + 0.5) * grid.d_tau
        d = distance(i_rho, i_z)
        return (tau >= t_start - d) & (tau <= t_end - d)

    return stochastic_integral(field, weight, block, where=inside)


class TestSupportWindow:

    def test_window_shifts_by_distance(self):
        lo, hi = support_window(0.3, 0.4, duration=1.0)
        assert lo == pytest.approx(-0.5)
        assert hi == pytest.approx(0.5)

    def test_empty_window_when_far(self):
        lo, hi = support_window(3.0, 4.0, duration=1.0, t_start=0.0)
        assert hi < 0.0
        assert lo < hi

    def test_zero_distance_rejected(self):
        with pytest.raises(DomainError, match="degenerate"):
            support_window(0.0, 0.0, duration=1.0)


class TestTheta:

    def test_deterministic(self, field, params, grid):
        assert theta(field, params, grid, 0.1) == theta(field, params, grid, 0.1)

    def test_matches_cellwise_integral(self, field, params, grid):
        for z0 in (-0.5, 0.0, 0.37):
            expected = _theta_by_integral(field, params, grid, z0, 0.0, params.duration)
            assert theta(field, params, grid, z0) == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_windows_add(self, field, params, grid):
        z = [-0.2, 0.0, 0.4]
        first = theta_window(field, params, grid, z, 0.0, 0.1)
        second = theta_window(field, params, grid, z, 0.1, 0.3)
        whole = theta_window(field, params, grid, z, 0.0, 0.3)
        np.testing.assert_allclose(first + second, whole, atol=1e-12)

    def test_empty_window_is_zero(self, field, params, grid):
        values = theta_window(field, params, grid, [0.0], 0.2, 0.2 - 1e-9)
        assert values[0] == 0.0

    def test_point_outside_particle_interval_rejected(self, field, params, grid):
        with pytest.raises(DomainError, match="particle interval"):
            theta(field, params, grid, 0.6)

    def test_point_outside_cylinder_rejected(self, field, params, grid):
        with pytest.raises(DomainError, match="cutoff length"):
            theta_window(field, params, grid, [1.5], 0.0, 0.1)

    def test_inverted_window_rejected(self, field, params, grid):
        with pytest.raises(DomainError, match="inverted"):
            theta_window(field, params, grid, [0.0], 0.3, 0.1)

    def test_mismatched_field_rejected(self, field, params, grid):
        wider = params.model_copy(update={"cutoff_radius": 2.0})
        with pytest.raises(DomainError, match="does not match"):
            theta(field, wider, grid, 0.0)

    def test_realizations_differ(self, field, params, grid):
        assert theta(field, params, grid, 0.0) != theta(
            field.with_realization(1), params, grid, 0.0
        )


class TestSamplePotential:

    def test_default_grid(self, field, params, grid):
        sample = sample_potential(field, params, grid)
        assert len(sample.z_grid) == 21
        assert sample.z_grid[0] == params.particle_lo
        assert sample.z_grid[-1] == params.particle_hi
        assert sample.grid.n_out == 21

    def test_point_values_match_theta(self, field, params, grid):
        sample = sample_potential(field, params, grid)
        assert sample.theta[7] == pytest.approx(
            theta(field, params, grid, sample.z_grid[7]), rel=1e-12, abs=1e-14
        )

    def test_independent_of_coupling(self, field, params, grid):
        strong = params.model_copy(update={"coupling": 7.5})
        assert sample_potential(field, params, grid).theta == (
            sample_potential(field, strong, grid).theta
        )

    def test_custom_grid_outside_interval_rejected(self, field, params, grid):
        with pytest.raises(DomainError):
            sample_potential(field, params, grid, z_grid=[0.0, 0.8])


class TestIncrements:
    """Small-window behavior of Θ across realizations."""

    @pytest.fixture
    def windows(self, field, params, grid):
        first, second = [], []
        for rid in range(400):
            f = field.with_realization(rid)
            first.append(theta_window(f, params, grid, [0.0], 0.0, 0.04)[0])
            second.append(theta_window(f, params, grid, [0.0], 0.04, 0.08)[0])
        return np.array(first), np.array(second)

    def test_disjoint_windows_uncorrelated(self, windows):
        first, second = windows
        assert abs(np.corrcoef(first, second)[0, 1]) < 5 / math.sqrt(first.size)

    def test_variance_grows_linearly(self, windows):
        first, second = windows
        ratio = (first + second).var() / (2 * first.var())
        assert 0.6 < ratio < 1.6


class TestDump:

    def test_round_trip(self, field, params, grid, tmp_path):
        sample = sample_potential(field, params, grid)
        path = write_dump(sample, seed=field.seed, path=tmp_path / "theta.bin")
        restored, seed = read_dump(path)
        assert seed == field.seed
        assert restored == sample

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bogus.bin"
        path.write_bytes(b"NOTTHETA" + b"\x00" * 16)
        with pytest.raises(ValueError, match="magic"):
            read_dump(path)

    def test_truncated_rejected(self, tmp_path):
        path = tmp_path / "short.bin"
        path.write_bytes(b"TH")
        with pytest.raises(ValueError, match="truncated"):
            read_dump(path)


class TestThetaRealizations:

    def test_rows_match_single_realizations(self, field, params, grid):
        z = [-0.25, 0.25]
        batch = theta_realizations(field.seed, params, grid, z, [3, 0])
        single = theta_window(field.with_realization(3), params, grid, z, 0.0, params.duration)
        np.testing.assert_array_equal(batch[0], single)

    def test_worker_count_does_not_change_values(self, field, params, grid):
        z = [0.0, 0.1]
        serial = theta_realizations(field.seed, params, grid, z, range(4), workers=1)
        pooled = theta_realizations(field.seed, params, grid, z, range(4), workers=2)
        np.testing.assert_array_equal(serial, pooled)

    def test_empty(self, params, grid):
        assert theta_realizations(1, params, grid, [0.0], []).shape == (0, 1)


class TestThetaDistribution:
    """Θ over many realizations is a centred Gaussian, smooth in z."""

    N_REALIZATIONS = 2000

    @pytest.fixture(scope="class")
    def samples(self) -> np.ndarray:
        params = PhysParams(coupling=2.0, cutoff_radius=1.0, cutoff_length=2.0, duration=0.3)
        grid = GridSpec(d_rho=0.1, d_z=0.05, d_tau=0.02)
        return theta_realizations(77, params, grid, [0.0, 0.01], range(self.N_REALIZATIONS))

    def test_zero_mean(self, samples):
        values = samples[:, 0]
        std_err = values.std(ddof=1) / math.sqrt(values.size)
        assert abs(values.mean()) < 3 * std_err

    def test_gaussian_shape(self, samples):
        values = samples[:, 0]
        assert abs(stats.skew(values)) < 0.2
        assert abs(stats.kurtosis(values)) < 0.4

    def test_nearby_points_strongly_correlated(self, samples):
        assert np.corrcoef(samples[:, 0], samples[:, 1])[0, 1] > 0.9

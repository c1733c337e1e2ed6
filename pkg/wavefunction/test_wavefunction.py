"""Tests for wave-function scaling, normalization and the IPR."""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import trapezoid

from core.lattice_schema import DomainError, GridSpec, PhysParams
from potential.potential import PotentialSample
from wavefunction.wavefunction import (
    WaveFunction,
    ipr,
    normalize_density,
    scale_and_normalize,
    uniform_density,
)

PARAMS = PhysParams(coupling=2.0, cutoff_radius=1.0, cutoff_length=2.0, duration=0.5)


def _sample(theta, n_out=None) -> PotentialSample:
    theta = np.asarray(theta, dtype=float)
    n = theta.size if n_out is None else n_out
    z = np.linspace(PARAMS.particle_lo, PARAMS.particle_hi, n)
    grid = GridSpec(d_rho=0.1, d_z=z[1] - z[0], d_tau=0.01, n_out=n)
    return PotentialSample(
        z_grid=z.tolist(), theta=theta.tolist(), params=PARAMS, grid=grid,
        realization_id=0,
    )


@pytest.fixture
def brownian_theta() -> np.ndarray:
    steps = np.random.default_rng(3).normal(scale=0.05, size=101)
    return np.cumsum(steps)


class TestScaleAndNormalize:

    def test_normalized(self, brownian_theta):
        wf = scale_and_normalize(_sample(brownian_theta), coupling=2.0)
        assert trapezoid(wf.density, wf.z_grid) == pytest.approx(1.0, abs=1e-12)
        assert min(wf.density) >= 0.0

    def test_zero_coupling_returns_initial_state(self, brownian_theta):
        sample = _sample(brownian_theta)
        initial = np.linspace(0.5, 2.0, 101)
        wf = scale_and_normalize(sample, coupling=0.0, initial_density=initial)
        expected = normalize_density(sample.z_array, initial)
        assert wf.density == expected.tolist()

    def test_constant_theta_returns_initial_state(self):
        sample = _sample(np.full(51, 3.7))
        wf = scale_and_normalize(sample, coupling=5.0)
        expected = normalize_density(sample.z_array, uniform_density(sample.z_grid))
        assert wf.density == expected.tolist()

    def test_shift_invariance(self, brownian_theta):
        base = scale_and_normalize(_sample(brownian_theta), coupling=3.0)
        shifted = scale_and_normalize(_sample(brownian_theta + 123.0), coupling=3.0)
        np.testing.assert_allclose(shifted.density, base.density, rtol=1e-12)

    def test_dominant_peak_concentrates(self):
        theta = np.zeros(51)
        theta[17] = 10.0
        wf = scale_and_normalize(_sample(theta), coupling=2.0)
        assert int(np.argmax(wf.density)) == 17
        h = wf.z_grid[1] - wf.z_grid[0]
        assert wf.density[17] * h == pytest.approx(1.0, rel=1e-6)

    def test_large_exponents_do_not_overflow(self, brownian_theta):
        wf = scale_and_normalize(_sample(brownian_theta * 1e4), coupling=10.0)
        assert np.all(np.isfinite(wf.density))

    def test_zero_initial_density_rejected(self, brownian_theta):
        with pytest.raises(DomainError, match="zero"):
            scale_and_normalize(_sample(brownian_theta), 1.0, initial_density=np.zeros(101))

    def test_length_mismatch_rejected(self, brownian_theta):
        with pytest.raises(DomainError, match="mismatch"):
            scale_and_normalize(_sample(brownian_theta), 1.0, initial_density=np.ones(5))

    def test_monotone_localization(self, brownian_theta):
        sample = _sample(brownian_theta)
        values = [ipr(scale_and_normalize(sample, c)) for c in np.linspace(0, 20, 41)]
        assert all(b >= a * (1 - 1e-12) for a, b in zip(values, values[1:]))


class TestIpr:

    def test_uniform_unit_interval(self):
        wf = scale_and_normalize(_sample(np.zeros(51)), coupling=1.0)
        assert ipr(wf) == pytest.approx(1.0, abs=1e-12)
        assert wf.ipr == ipr(wf)

    def test_half_interval(self):
        z = np.linspace(-0.5, 0.5, 201)
        density = normalize_density(z, np.where(z <= 0.0, 1.0, 0.0))
        wf = WaveFunction(z_grid=z.tolist(), density=density.tolist(), ipr=0.0)
        assert ipr(wf) == pytest.approx(2.0, rel=0.02)

    def test_single_interior_cell(self):
        z = np.linspace(-0.5, 0.5, 51)
        spike = np.zeros(51)
        spike[25] = 1.0
        density = normalize_density(z, spike)
        wf = WaveFunction(z_grid=z.tolist(), density=density.tolist(), ipr=0.0)
        assert ipr(wf) == pytest.approx(1.0 / (z[1] - z[0]), rel=1e-12)

    def test_single_endpoint_cell_doubles(self):
        z = np.linspace(-0.5, 0.5, 51)
        spike = np.zeros(51)
        spike[0] = 1.0
        density = normalize_density(z, spike)
        wf = WaveFunction(z_grid=z.tolist(), density=density.tolist(), ipr=0.0)
        assert ipr(wf) == pytest.approx(2.0 / (z[1] - z[0]), rel=1e-12)

    @pytest.mark.parametrize("coupling", [0.5, 2.0, 8.0])
    def test_bounds(self, brownian_theta, coupling):
        wf = scale_and_normalize(_sample(brownian_theta), coupling)
        h = wf.z_grid[1] - wf.z_grid[0]
        assert 1.0 - 1e-12 <= wf.ipr <= 2.0 / h

    def test_negative_density_rejected(self):
        with pytest.raises(ValidationError):
            WaveFunction(z_grid=[0.0, 1.0], density=[-1.0, 1.0], ipr=1.0)

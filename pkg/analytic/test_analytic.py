"""Tests for the flat-spacetime oracle: elliptic integral, closed forms, quadrature."""

import math

import numpy as np
import pytest
from scipy import integrate, special

from analytic.elliptic import agm, elliptic_k, elliptic_k_complement
from analytic.flat_oracle import (
    correlation_length,
    d1_closed,
    d1_quadrature,
    d2_asymptotic,
    d2_closed,
    d2_quadrature,
    flat_D_quadrature,
    flat_integrand,
    flat_oracle,
    ln_k_prediction,
)
from analytic.quadrature import quad_checked
from core.lattice_schema import DomainError, QuadratureError


class TestEllipticK:

    def test_at_zero(self):
        assert elliptic_k(0.0) == pytest.approx(math.pi / 2, rel=1e-15)

    def test_known_value(self):
        assert elliptic_k(0.5) == pytest.approx(1.6857503548, rel=1e-10)

    @pytest.mark.parametrize("k", [0.1, 0.3, 0.7, 0.9, 0.99, 0.999999])
    def test_matches_scipy(self, k):
        assert elliptic_k(k) == pytest.approx(special.ellipk(k * k), rel=1e-10)

    def test_matches_legendre_quadrature(self):
        k = 0.5
        value, _ = integrate.quad(
            lambda phi: 1.0 / math.sqrt(1.0 - (k * math.sin(phi)) ** 2), 0.0, math.pi / 2
        )
        assert elliptic_k(k) == pytest.approx(value, rel=1e-12)

    def test_strictly_increasing(self):
        values = [elliptic_k(k) for k in np.linspace(0.0, 0.9999, 200)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_grows_without_bound_near_one(self):
        assert elliptic_k(1.0 - 1e-15) > 15.0

    @pytest.mark.parametrize("k", [1.0, 1.5, -0.1])
    def test_out_of_domain(self, k):
        with pytest.raises(DomainError):
            elliptic_k(k)

    @pytest.mark.parametrize("k", [0.0, 0.5, 0.9, 0.999])
    def test_agm_converges_quickly(self, k):
        _, iterations = agm(1.0, math.sqrt(1.0 - k * k))
        assert iterations <= 8

    def test_complement_form_near_one(self):
        k_prime = 1e-20
        assert elliptic_k_complement(k_prime) == pytest.approx(
            math.log(4.0 / k_prime), rel=1e-12
        )


class TestClosedForms:

    def test_d1_value(self):
        assert d1_closed(1.0, 0.25) == pytest.approx(-math.pi, rel=1e-15)

    def test_d1_zero_separation(self):
        assert d1_closed(1.0, 0.0) == 0.0

    def test_d1_rejects_outside_light_cone(self):
        with pytest.raises(DomainError, match="r <= t"):
            d1_closed(0.5, 1.0)

    def test_d2_zero_separation(self):
        assert d2_closed(0.0, 10.0) == 0.0

    def test_d2_linear_in_cutoff(self):
        r = 0.01
        ratio = d2_closed(r, 1000 * r) / d2_asymptotic(r, 1000 * r)
        assert ratio == pytest.approx(1.0, abs=2e-3)

    @pytest.mark.parametrize("r,cutoff", [(0.1, 10.0), (1.0, 1.0), (1e-4, 50.0), (3.0, 0.2)])
    def test_d2_matches_inverse_sinh_form(self, r, cutoff):
        expected = (
            -8 * math.pi * cutoff**2 * math.asinh(r / (2 * cutoff))
            - 4 * math.pi * r * math.hypot(cutoff, r / 2)
            + 2 * math.pi * r**2
        )
        assert d2_closed(r, cutoff) == pytest.approx(expected, rel=1e-12)

    def test_d2_continuous_at_zero(self):
        assert abs(d2_closed(1e-12, 10.0)) < 1e-9

    def test_both_pieces_decrease(self):
        rs = np.linspace(0.05, 1.0, 20)
        d1 = [d1_closed(1.0, r) for r in rs]
        d2 = [d2_closed(r, 10.0) for r in rs]
        assert all(b < a <= 0.0 for a, b in zip(d1, d1[1:]))
        assert all(b < a <= 0.0 for a, b in zip(d2, d2[1:]))

    def test_correlation_length(self):
        assert correlation_length(2.0, 10.0) == pytest.approx(math.pi / 40, rel=1e-15)
        assert correlation_length(2.0, 20.0) == pytest.approx(
            correlation_length(2.0, 10.0) / 2, rel=1e-15
        )

    def test_zero_coupling_is_infinite_length(self):
        assert correlation_length(0.0, 10.0) is None
        assert flat_oracle(1.0, 0.1, 10.0, coupling=0.0).r_c is None

    @pytest.mark.parametrize("coupling,t,r,cutoff", [(2.0, 1.0, 0.1, 10.0), (0.3, 5.0, 2.5, 0.7)])
    def test_ln_k_prediction_identity(self, coupling, t, r, cutoff):
        combined = coupling**2 * (d1_closed(t, r) + d2_asymptotic(r, cutoff)) / (8 * math.pi**2)
        assert ln_k_prediction(coupling, t, r, cutoff) == pytest.approx(combined, rel=1e-14)

    def test_oracle_sums_pieces(self):
        result = flat_oracle(1.0, 0.2, 10.0, coupling=2.0)
        assert result.d_total_diff == result.d1 + result.d2
        assert result.r_c == pytest.approx(math.pi / 40)


class TestQuadrature:

    def test_integrand_finite_at_midpoint(self):
        assert flat_integrand(1.0, 0.2, 1e-12, 0.0) == pytest.approx(2.0 / 0.01, rel=1e-9)

    def test_zero_separation_infinite_cylinder(self):
        t, cutoff = 1.0, 2.0
        assert flat_D_quadrature(t, 0.0, cutoff) == pytest.approx(
            4 * math.pi**2 * t * cutoff, rel=1e-5
        )

    def test_d2_quadrature_matches_closed_form(self):
        assert d2_quadrature(0.1, 10.0) == pytest.approx(d2_closed(0.1, 10.0), rel=1e-3)

    def test_d1_elliptic_matches_numeric_inner(self):
        elliptic = d1_quadrature(1.0, 0.1, 5.0, elliptic=True)
        numeric = d1_quadrature(1.0, 0.1, 5.0, elliptic=False, epsrel=1e-8)
        assert elliptic == pytest.approx(numeric, rel=1e-5)

    def test_d1_quadrature_approaches_closed_form(self):
        r = 0.01
        assert d1_quadrature(1.0, r, 1000 * r) == pytest.approx(d1_closed(1.0, r), rel=0.01)

    def test_difference_matches_closed_forms(self):
        t, r, cutoff = 1.0, 0.1, 10.0
        diff = flat_D_quadrature(t, r, cutoff) - flat_D_quadrature(t, 0.0, cutoff)
        assert diff == pytest.approx(d1_closed(t, r) + d2_closed(r, cutoff), rel=0.02)

    # l_z = 100Λ: the dropped tail beyond ±l_z/2 costs ≈ Λ/l_z of D₂.
    FINITE_T, FINITE_CUTOFF, FINITE_LENGTH = 1.0, 10.0, 1000.0

    @pytest.fixture(scope="class")
    def finite_origin(self) -> float:
        return flat_D_quadrature(self.FINITE_T, 0.0, self.FINITE_CUTOFF, self.FINITE_LENGTH)

    @pytest.mark.parametrize("r", np.linspace(0.02, 0.1, 6).tolist())
    def test_finite_cylinder_difference_matches_closed_forms(self, finite_origin, r):
        t, cutoff = self.FINITE_T, self.FINITE_CUTOFF
        diff = flat_D_quadrature(t, r, cutoff, self.FINITE_LENGTH) - finite_origin
        assert diff == pytest.approx(d1_closed(t, r) + d2_closed(r, cutoff), rel=0.02)

    def test_ten_cutoff_lengths_still_shows_the_tail(self):
        t, r, cutoff = 1.0, 0.1, 10.0
        length = 10 * cutoff
        diff = flat_D_quadrature(t, r, cutoff, length) - flat_D_quadrature(t, 0.0, cutoff, length)
        closed = d1_closed(t, r) + d2_closed(r, cutoff)
        tail = 8 * math.pi * r * (math.hypot(cutoff, length / 2) - length / 2)
        assert 0.05 < abs(diff / closed - 1.0) < 0.15
        assert diff - closed == pytest.approx(tail, rel=0.1)

    def test_finite_cylinder_converges(self):
        t, r, cutoff = 1.0, 0.1, 1.0
        target = d2_quadrature(r, cutoff)
        errors = [abs(d2_quadrature(r, cutoff, l_z) - target) for l_z in (2.0, 8.0, 32.0)]
        assert errors[0] > errors[1] > errors[2]

    def test_d2_quadrature_finite_cylinder_inner_closed_form(self):
        r, cutoff, l_z = 0.2, 1.0, 3.0
        a, half = r / 2, l_z / 2

        def inner(rho):
            if rho == 0.0:
                return 0.0
            return rho * (
                math.asinh((half - a) / rho) - math.asinh((half + a) / rho)
                + 2 * math.asinh(a / rho)
            )

        expected = -8 * math.pi * integrate.quad(inner, 0.0, cutoff, points=[a], limit=200)[0]
        assert d2_quadrature(r, cutoff, l_z) == pytest.approx(expected, rel=1e-6)

    def test_rejects_outside_light_cone(self):
        with pytest.raises(DomainError):
            flat_D_quadrature(0.1, 0.2, 1.0, 2.0)

    def test_failure_reports_achieved_tolerance(self):
        with pytest.raises(QuadratureError) as excinfo:
            quad_checked(lambda x: math.sin(1.0 / x) / x, 1e-9, 1.0, epsrel=1e-14)
        assert excinfo.value.achieved > 0.0

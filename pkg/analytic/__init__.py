"""Flat-spacetime oracle (public API)."""

from analytic.elliptic import agm, elliptic_k, elliptic_k_complement
from analytic.flat_oracle import (
    FlatOracleResult,
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
from analytic.quadrature import axisymmetric_integral, quad_checked

__all__ = [
    "FlatOracleResult",
    "agm",
    "axisymmetric_integral",
    "correlation_length",
    "d1_closed",
    "d1_quadrature",
    "d2_asymptotic",
    "d2_closed",
    "d2_quadrature",
    "elliptic_k",
    "elliptic_k_complement",
    "flat_D_quadrature",
    "flat_integrand",
    "flat_oracle",
    "ln_k_prediction",
]

"""Flat-spacetime oracle for the potential covariance D(t, r).

Two points sit on the cylinder axis at ±r/2. The covariance splits into a
near-field piece D₁ = −4πrt and a cutoff-driven piece D₂ that grows linearly
with the cylinder radius Λ, which sets the correlation length
r_c = π/(mη)²Λ. Everything here is deterministic and serves as the reference
the Monte Carlo estimators are checked against.
"""

import logging
import math
from typing import Optional

from pydantic import BaseModel, ConfigDict

from analytic.elliptic import elliptic_k_complement
from analytic.quadrature import axisymmetric_integral, quad_checked
from core.lattice_schema import DomainError

logger = logging.getLogger(__name__)

DEFAULT_EPSREL = 1e-6


class FlatOracleResult(BaseModel):
    """Closed-form pieces of D(t, r) − D(t, 0) and the implied r_c.

    r_c is None when the coupling vanishes (infinite correlation length).
    """

    model_config = ConfigDict(frozen=True)

    t: float
    r: float
    cutoff_radius: float
    d1: float
    d2: float
    d_total_diff: float
    r_c: Optional[float]


def _check_separation(t: float, r: float) -> None:
    if r < 0.0 or t < 0.0:
        raise DomainError(f"need t, r >= 0, got t={t}, r={r}")
    if r > t:
        raise DomainError(f"r={r} > t={t}: only the r <= t branch is derived")


def d1_closed(t: float, r: float) -> float:
    """Near-field covariance piece −4π·r·t (r ≤ t)."""
    _check_separation(t, r)
    return -4.0 * math.pi * r * t


def d2_closed(r: float, cutoff_radius: float) -> float:
    """Cutoff-driven covariance piece for an infinitely long cylinder.

    −πr²(4a²·ln((√u+1)/(√u−1)) + 2√u − 2) with a = Λ/r and u = 4a² + 1; the
    logarithm is evaluated as 2·artanh(1/√u) so large Λ/r keeps full precision.
    """
    if r < 0.0 or cutoff_radius <= 0.0:
        raise DomainError(f"need r >= 0 and cutoff_radius > 0, got r={r}, Λ={cutoff_radius}")
    if r == 0.0:
        return 0.0
    a = cutoff_radius / r
    root = math.sqrt(4.0 * a * a + 1.0)
    log_term = 2.0 * math.atanh(1.0 / root)
    return -math.pi * r * r * (4.0 * a * a * log_term + 2.0 * root - 2.0)


def d2_asymptotic(r: float, cutoff_radius: float) -> float:
    """Leading large-Λ behavior of d2_closed: −8π·r·Λ."""
    return -8.0 * math.pi * r * cutoff_radius


def correlation_length(coupling: float, cutoff_radius: float) -> Optional[float]:
    """r_c = π/(coupling²·Λ); None signals an infinite correlation length."""
    if coupling < 0.0 or cutoff_radius <= 0.0:
        raise DomainError(
            f"need coupling >= 0 and cutoff_radius > 0, got {coupling}, {cutoff_radius}"
        )
    if coupling == 0.0:
        return None
    return math.pi / (coupling * coupling * cutoff_radius)


def ln_k_prediction(coupling: float, t: float, r: float, cutoff_radius: float) -> float:
    """Predicted ln K(t, r) − ln K(t, 0) = −coupling²·r·(t + 2Λ)/(2π)."""
    _check_separation(t, r)
    return -coupling * coupling * r * (t + 2.0 * cutoff_radius) / (2.0 * math.pi)


def _half_length(cutoff_length: float) -> float:
    if cutoff_length <= 0.0:
        raise DomainError(f"cutoff_length must be > 0, got {cutoff_length}")
    return cutoff_length / 2.0


def flat_integrand(t: float, r: float, rho: float, z: float) -> float:
    """2(t − |s₁ − s₂|)/(s₁s₂) with s₁,₂ the distances from (ρ, z′) to z = ±r/2."""
    s1 = math.hypot(rho, z - r / 2.0)
    s2 = math.hypot(rho, z + r / 2.0)
    # |s₁ − s₂| = 2r|z′|/(s₁ + s₂), free of cancellation far from the axis.
    gap = 2.0 * r * abs(z) / (s1 + s2)
    return 2.0 * (t - gap) / (s1 * s2)


def flat_D_quadrature(
    t: float,
    r: float,
    cutoff_radius: float,
    cutoff_length: float = math.inf,
    epsrel: float = DEFAULT_EPSREL,
) -> float:
    """D(t, r) integrated over the cylinder of radius Λ and length l_z.

    cutoff_length may be math.inf for the infinitely long cylinder the
    closed forms assume.

    Raises:
        DomainError: for r > t or non-positive cutoffs.
        QuadratureError: if the adaptive quadrature misses epsrel.
    """
    _check_separation(t, r)
    if cutoff_radius <= 0.0:
        raise DomainError(f"cutoff_radius must be > 0, got {cutoff_radius}")
    half = _half_length(cutoff_length)
    value = axisymmetric_integral(
        lambda rho, z: flat_integrand(t, r, rho, z),
        cutoff_radius,
        lambda rho: half,
        rho_points=[p for p in (r / 2.0, r) if 0.0 < p < cutoff_radius],
        z_points=[r / 2.0] if r > 0.0 else [],
        epsrel=epsrel,
    )
    # 2π azimuth, doubled for the mirror half z′ < 0.
    return 4.0 * math.pi * value


def d1_quadrature(
    t: float,
    r: float,
    cutoff_radius: float,
    elliptic: bool = True,
    epsrel: float = 1e-9,
) -> float:
    """D₁ over a cylinder of radius Λ before the large-Λ limit is taken.

    D₁ = 8πt ∫₀^Λ ρ dρ ∫₀^∞ dz′ [1/(s₁s₂) − 1/(ρ² + z′²)]. With elliptic=True
    the inner integral is 𝒦(k)/(A + r/2) − π/(2ρ) with A = √(ρ² + r²/4);
    otherwise the first term is integrated numerically.
    """
    _check_separation(t, r)
    if r == 0.0:
        return 0.0
    half = r / 2.0

    def inner_elliptic(rho: float) -> float:
        outer = math.hypot(rho, half) + half
        k_prime = (rho / outer) ** 2
        return rho * elliptic_k_complement(k_prime) / outer - math.pi / 2.0

    def inner_numeric(rho: float) -> float:
        value, _ = quad_checked(
            lambda z: 1.0 / (math.hypot(rho, z - half) * math.hypot(rho, z + half)),
            0.0, math.inf, points=[half], epsrel=1e-11, accept_rtol=1e-10,
        )
        return rho * value - math.pi / 2.0

    integrand = inner_elliptic if elliptic else inner_numeric
    points = [p for p in (half, r, 10.0 * r) if p < cutoff_radius]
    value, _ = quad_checked(
        lambda rho: 0.0 if rho == 0.0 else integrand(rho),
        0.0, cutoff_radius, points=points, epsrel=epsrel, epsabs=1e-14 * r,
    )
    return 8.0 * math.pi * t * value


def d2_quadrature(
    r: float,
    cutoff_radius: float,
    cutoff_length: float = math.inf,
    epsrel: float = 1e-8,
) -> float:
    """D₂ = −8π ∫₀^Λ ρ dρ ∫₀^{l_z/2} (1/s₁ − 1/s₂) dz′ by nested quadrature."""
    if r < 0.0 or cutoff_radius <= 0.0:
        raise DomainError(f"need r >= 0 and cutoff_radius > 0, got r={r}, Λ={cutoff_radius}")
    if r == 0.0:
        return 0.0
    half_sep = r / 2.0
    half = _half_length(cutoff_length)

    def integrand(rho: float, z: float) -> float:
        s1 = math.hypot(rho, z - half_sep)
        s2 = math.hypot(rho, z + half_sep)
        return 2.0 * r * z / (s1 * s2 * (s1 + s2))

    value = axisymmetric_integral(
        integrand,
        cutoff_radius,
        lambda rho: half,
        rho_points=[p for p in (half_sep, r) if p < cutoff_radius],
        z_points=[half_sep],
        epsrel=epsrel,
    )
    return -8.0 * math.pi * value


def flat_oracle(
    t: float, r: float, cutoff_radius: float, coupling: float
) -> FlatOracleResult:
    """Closed-form D₁, D₂, their sum and r_c at one separation."""
    d1 = d1_closed(t, r)
    d2 = d2_closed(r, cutoff_radius)
    return FlatOracleResult(
        t=t,
        r=r,
        cutoff_radius=cutoff_radius,
        d1=d1,
        d2=d2,
        d_total_diff=d1 + d2,
        r_c=correlation_length(coupling, cutoff_radius),
    )

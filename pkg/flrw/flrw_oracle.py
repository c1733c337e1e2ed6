"""Curved-spacetime (matter-dominated FLRW) oracle for D(t, r).

The scale factor a(t) = (t/t_c)² in conformal time makes every cell's
contribution fade toward the particle horizon |y| = t_c, so the covariance
is finite without a radial cutoff. Two paths are provided:

* approximate: the flat integrand weighted by the form factor C(|y|), which
  assumes the source time is close to t_c − |y|;
* exact: the source conformal time y⁰ is integrated across the overlap of
  both retarded windows with the exact ∫a² dt along each light ray.
"""

import logging
import math
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate

from analytic.flat_oracle import flat_integrand
from analytic.quadrature import axisymmetric_integral
from core.lattice_schema import DomainError

logger = logging.getLogger(__name__)

DEFAULT_EPSREL = 1e-6

_GL_NODES, _GL_WEIGHTS = (v.tolist() for v in np.polynomial.legendre.leggauss(8))


class FlrwParams(BaseModel):
    """Geometry of one FLRW covariance evaluation."""

    model_config = ConfigDict(frozen=True)

    t_c: float = Field(gt=0.0, allow_inf_nan=False)
    duration: float = Field(gt=0.0, allow_inf_nan=False)
    r: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    scale_exponent: Literal[2] = 2

    @model_validator(mode="after")
    def _check_ordering(self) -> "FlrwParams":
        if self.duration > self.t_c:
            raise ValueError(
                f"invariant duration <= t_c violated ({self.duration} > {self.t_c})"
            )
        if self.r > self.duration:
            raise ValueError(
                f"invariant r <= duration violated ({self.r} > {self.duration})"
            )
        return self


def scale_factor(t: float, t_c: float) -> float:
    """a(t) = (t/t_c)², normalized to 1 today."""
    return (t / t_c) ** 2


def form_factor(y_norm: float, t_c: float) -> float:
    """C(|y|) = (5s⁴ / Σ_{j=0..4} t_c^j s^{4−j})² with s = t_c − |y|.

    Falls monotonically from 1 at the observer to 0 at the horizon.

    Raises:
        DomainError: if y_norm lies outside [0, t_c].
    """
    if y_norm < 0.0 or y_norm > t_c:
        raise DomainError(f"|y|={y_norm} outside [0, t_c={t_c}]")
    s = t_c - y_norm
    denominator = sum(t_c**j * s ** (4 - j) for j in range(5))
    return (5.0 * s**4 / denominator) ** 2


def conformal_a2_integral(y0: float, length: float, t_c: float) -> float:
    """∫_{y0}^{y0+L} a²(τ) dτ = ((y0 + L)⁵ − y0⁵)/(5t_c⁴), factored to avoid cancellation."""
    if y0 < 0.0 or length < 0.0:
        raise DomainError(f"need y0 >= 0 and L >= 0, got y0={y0}, L={length}")
    upper = y0 + length
    return length * sum(upper**j * y0 ** (4 - j) for j in range(5)) / (5.0 * t_c**4)


def effective_cutoff_radius(t_c: float) -> float:
    """Flat-equivalent cylinder radius Λ_eff = ½∫₀^{t_c} C(s) ds."""
    value, _ = integrate.quad(form_factor, 0.0, t_c, args=(t_c,), epsrel=1e-10)
    return value / 2.0


def _approximate_integrand(p: FlrwParams, unit_form_factor: bool):
    def integrand(rho: float, z: float) -> float:
        flat = flat_integrand(p.duration, p.r, rho, z)
        if unit_form_factor:
            return flat
        return flat * form_factor(min(math.hypot(rho, z), p.t_c), p.t_c)

    return integrand


def _exact_integrand(p: FlrwParams):
    t, t_c, half = p.duration, p.t_c, p.r / 2.0

    def integrand(rho: float, z: float) -> float:
        s1 = math.hypot(rho, z - half)
        s2 = math.hypot(rho, z + half)
        near, far = min(s1, s2), max(s1, s2)
        lo = max(t_c - t - near, 0.0)
        hi = t_c - far
        if hi <= lo:
            return 0.0
        mid, width = (hi + lo) / 2.0, (hi - lo) / 2.0
        total = 0.0
        for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
            y0 = mid + width * node
            a4 = (y0 / t_c) ** 8
            total += weight * a4 / (
                conformal_a2_integral(y0, s1, t_c) * conformal_a2_integral(y0, s2, t_c)
            )
        return 2.0 * width * total

    return integrand


def flrw_D_quadrature(
    p: FlrwParams,
    *,
    exact: bool = True,
    unit_form_factor: bool = False,
    cylinder: Optional[tuple[float, float]] = None,
    epsrel: float = DEFAULT_EPSREL,
) -> float:
    """D(t, r) in the matter-dominated universe.

    Args:
        p: Horizon time, duration and separation.
        exact: Integrate the source time exactly instead of weighting by C.
        unit_form_factor: Force C ≡ 1 (the flat limit); implies the
            approximate path.
        cylinder: Optional (Λ, l_z) replacing the horizon ball as the domain.
        epsrel: Relative tolerance of the outer quadrature.

    Raises:
        QuadratureError: if the quadrature misses epsrel.
    """
    if unit_form_factor or cylinder is not None:
        exact = False
    if exact:
        integrand = _exact_integrand(p)
        radius = p.t_c + p.r / 2.0
    else:
        integrand = _approximate_integrand(p, unit_form_factor)
        radius = p.t_c

    if cylinder is not None:
        rho_max, half_length = cylinder[0], cylinder[1] / 2.0
        z_max = lambda rho: half_length  # noqa: E731
    else:
        rho_max = radius
        z_max = lambda rho: math.sqrt(max(radius * radius - rho * rho, 0.0))  # noqa: E731

    value = axisymmetric_integral(
        integrand,
        rho_max,
        z_max,
        rho_points=[x for x in (p.r / 2.0, p.r, p.duration) if 0.0 < x < rho_max],
        z_points=[p.r / 2.0] if p.r > 0.0 else [],
        epsrel=epsrel,
    )
    logger.debug(
        "FLRW D(t=%g, r=%g, t_c=%g, exact=%s) = %.10g", p.duration, p.r, p.t_c, exact, value
    )
    return 4.0 * math.pi * value


def flrw_effective_rc(
    p: FlrwParams,
    coupling: float,
    r_values: Optional[Sequence[float]] = None,
    *,
    exact: bool = True,
    epsrel: float = DEFAULT_EPSREL,
) -> Optional[float]:
    """Decay length of K implied by the FLRW covariance.

    Fits coupling²·(D(t, r) − D(t, 0))/(8π²) against r and returns −1/slope.
    r_values defaults to four equally spaced separations up to p.r.
    Returns None for zero coupling or a non-decaying slope (infinite length).

    Raises:
        DomainError: if fewer than 4 separations are available.
    """
    if coupling < 0.0:
        raise DomainError(f"coupling must be >= 0, got {coupling}")
    if r_values is None:
        if p.r <= 0.0:
            raise DomainError("need p.r > 0 to build a default separation grid")
        r_values = np.linspace(p.r / 4.0, p.r, 4)
    r_values = [float(r) for r in r_values]
    if len(set(r_values)) < 4:
        raise DomainError(f"need at least 4 distinct separations, got {len(set(r_values))}")
    if coupling == 0.0:
        logger.warning("Zero coupling: FLRW correlation length is infinite")
        return None

    base = flrw_D_quadrature(p.model_copy(update={"r": 0.0}), exact=exact, epsrel=epsrel)
    log_k = [
        coupling**2
        * (flrw_D_quadrature(p.model_copy(update={"r": r}), exact=exact, epsrel=epsrel) - base)
        / (8.0 * math.pi**2)
        for r in r_values
    ]
    slope, _ = np.polyfit(r_values, log_k, 1)
    if slope >= 0.0:
        logger.warning("FLRW ln K does not decay (slope %.3g); length is infinite", slope)
        return None
    return -1.0 / slope

"""Nested adaptive quadrature over axisymmetric (ρ, z′) domains.

Shared by the flat-cylinder and FLRW oracles. The azimuthal 2π is applied by
the caller; this module integrates ρ·f(ρ, z′) over 0 ≤ ρ ≤ ρ_max and
0 ≤ z′ ≤ z_max(ρ), where z_max may be infinite.
"""

import logging
import math
from typing import Callable, Sequence

from scipy import integrate

from core.lattice_schema import QuadratureError

logger = logging.getLogger(__name__)

INNER_EPSREL = 1e-10
_LIMIT = 200
# Accept QUADPACK warnings while the error estimate stays within this factor
# of the request.
_SLACK = 10.0


def quad_checked(
    fn: Callable[[float], float],
    a: float,
    b: float,
    *,
    points: Sequence[float] = (),
    epsrel: float,
    epsabs: float = 0.0,
    accept_rtol: float | None = None,
) -> tuple[float, float]:
    """scipy.integrate.quad with breakpoints and a tolerance check.

    QUADPACK warnings are tolerated while the error estimate stays within
    accept_rtol (default epsrel) of the value.

    Infinite upper limits are split at the last breakpoint (or at a) so the
    finite part can still use breakpoints.

    Returns:
        (value, error estimate).

    Raises:
        QuadratureError: if the error estimate misses the tolerance.
    """
    accept = epsrel if accept_rtol is None else accept_rtol
    inner_points = sorted(p for p in points if a < p < b)
    if math.isinf(b):
        split = max([a + 1.0, *[2 * p for p in inner_points]])
        head, head_err = quad_checked(
            fn, a, split, points=inner_points, epsrel=epsrel, epsabs=epsabs,
            accept_rtol=accept,
        )
        tail, tail_err = _quad_once(fn, split, math.inf, None, epsrel, epsabs, accept)
        return head + tail, head_err + tail_err
    return _quad_once(fn, a, b, inner_points or None, epsrel, epsabs, accept)


def _quad_once(fn, a, b, points, epsrel, epsabs, accept_rtol) -> tuple[float, float]:
    result = integrate.quad(
        fn, a, b, points=points, epsrel=epsrel, epsabs=epsabs, limit=_LIMIT,
        full_output=1,
    )
    value, abserr = result[0], result[1]
    if len(result) > 3:
        allowed = _SLACK * max(epsabs, accept_rtol * abs(value))
        if abserr > allowed or not math.isfinite(value):
            raise QuadratureError(
                f"quad on [{a}, {b}] failed: {result[3].splitlines()[0]}", abserr
            )
        logger.debug("quad on [%s, %s] warned but met tolerance: %s", a, b, result[3])
    return value, abserr


def axisymmetric_integral(
    integrand: Callable[[float, float], float],
    rho_max: float,
    z_max: Callable[[float], float],
    *,
    rho_points: Sequence[float] = (),
    z_points: Sequence[float] = (),
    epsrel: float = 1e-6,
) -> float:
    """∫₀^ρ_max ρ dρ ∫₀^z_max(ρ) integrand(ρ, z′) dz′.

    Raises:
        QuadratureError: if either level misses its tolerance.
    """

    def inner(rho: float) -> float:
        if rho == 0.0:
            return 0.0
        upper = z_max(rho)
        if upper <= 0.0:
            return 0.0
        value, _ = quad_checked(
            lambda z: integrand(rho, z), 0.0, upper,
            points=z_points, epsrel=min(INNER_EPSREL, epsrel * 1e-2),
            accept_rtol=epsrel * 1e-2,
        )
        return rho * value

    value, abserr = quad_checked(inner, 0.0, rho_max, points=rho_points, epsrel=epsrel)
    logger.debug("axisymmetric integral %.12g ± %.2e", value, abserr)
    return value

"""Complete elliptic integral of the first kind via the arithmetic-geometric mean."""

import math

from core.lattice_schema import DomainError

AGM_RTOL = 1e-12
_MAX_ITER = 64


def agm(a: float, b: float, rtol: float = AGM_RTOL) -> tuple[float, int]:
    """Arithmetic-geometric mean of two non-negative numbers.

    Returns:
        (mean, iterations) where iterations counts the averaging steps taken
        until |a − b| ≤ rtol·a.
    """
    if a < 0.0 or b < 0.0:
        raise DomainError(f"agm requires non-negative arguments, got ({a}, {b})")
    for iteration in range(_MAX_ITER):
        if abs(a - b) <= rtol * max(a, b):
            return (a + b) / 2, iteration
        a, b = (a + b) / 2, math.sqrt(a * b)
    return (a + b) / 2, _MAX_ITER


def elliptic_k_complement(k_prime: float) -> float:
    """𝒦 expressed through the complementary modulus k′ = √(1 − k²).

    Avoids losing k′ to rounding when k is within a few ulps of 1.

    Raises:
        DomainError: if k′ ≤ 0 (k ≥ 1, logarithmic divergence) or k′ > 1.
    """
    if not 0.0 < k_prime <= 1.0:
        raise DomainError(f"complementary modulus must lie in (0, 1], got {k_prime}")
    mean, _ = agm(1.0, k_prime)
    return math.pi / (2 * mean)


def elliptic_k(k: float) -> float:
    """Complete elliptic integral of the first kind 𝒦(k), modulus convention.

    Raises:
        DomainError: if k < 0 or k ≥ 1.
    """
    if k < 0.0:
        raise DomainError(f"elliptic modulus must be >= 0, got {k}")
    if k >= 1.0:
        raise DomainError(f"elliptic modulus must be < 1, got {k} (𝒦 diverges)")
    return elliptic_k_complement(math.sqrt((1.0 - k) * (1.0 + k)))

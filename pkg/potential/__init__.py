"""Cumulative noise potential Θ (public API)."""

from potential.dump import read_dump, write_dump
from potential.potential import (
    PotentialSample,
    sample_potential,
    support_window,
    theta,
    theta_realizations,
    theta_window,
)

__all__ = [
    "PotentialSample",
    "read_dump",
    "sample_potential",
    "support_window",
    "theta",
    "theta_realizations",
    "theta_window",
    "write_dump",
]

"""Keyed white-noise field (public API)."""

from noise.noise_field import (
    CellBlock,
    NoiseField,
    draw,
    draw_block,
    integral_variance,
    stochastic_integral,
    stochastic_integral_batch,
)
from noise.philox import philox4x32, standard_normals

__all__ = [
    "CellBlock",
    "NoiseField",
    "draw",
    "draw_block",
    "integral_variance",
    "philox4x32",
    "standard_normals",
    "stochastic_integral",
    "stochastic_integral_batch",
]

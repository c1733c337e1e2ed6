"""Wave-function scaling and localization measure (public API)."""

from wavefunction.wavefunction import (
    WaveFunction,
    density_ipr,
    ipr,
    normalize_density,
    scale_and_normalize,
    scaled_density,
    uniform_density,
)

__all__ = [
    "WaveFunction",
    "density_ipr",
    "ipr",
    "normalize_density",
    "scale_and_normalize",
    "scaled_density",
    "uniform_density",
]

"""FLRW covariance oracle (public API)."""

from flrw.flrw_oracle import (
    FlrwParams,
    conformal_a2_integral,
    effective_cutoff_radius,
    flrw_D_quadrature,
    flrw_effective_rc,
    form_factor,
    scale_factor,
)

__all__ = [
    "FlrwParams",
    "conformal_a2_integral",
    "effective_cutoff_radius",
    "flrw_D_quadrature",
    "flrw_effective_rc",
    "form_factor",
    "scale_factor",
]

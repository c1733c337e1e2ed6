"""Correlation estimators and decay-length fit (public API)."""

from correlation.estimators import (
    CorrEstimate,
    KMethod,
    d_estimates,
    estimate_D,
    estimate_D_curve,
    estimate_K,
    estimate_K_curve,
    jackknife,
    k_estimates,
    sample_pair_potentials,
)
from correlation.fit import DecayFit, fit_decay_length

__all__ = [
    "CorrEstimate",
    "DecayFit",
    "KMethod",
    "d_estimates",
    "estimate_D",
    "estimate_D_curve",
    "estimate_K",
    "estimate_K_curve",
    "fit_decay_length",
    "jackknife",
    "k_estimates",
    "sample_pair_potentials",
]

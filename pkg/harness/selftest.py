"""Fast self-checks runnable without pytest (``selftest`` subcommand)."""

import logging
import math
import time
from typing import Callable

import numpy as np
from pydantic import BaseModel

from analytic.elliptic import elliptic_k
from analytic.flat_oracle import correlation_length, d2_asymptotic, d2_closed, flat_D_quadrature
from core.lattice_schema import GridSpec, PhysParams
from correlation.estimators import CorrEstimate
from correlation.fit import fit_decay_length
from flrw.flrw_oracle import form_factor
from noise.noise_field import NoiseField
from noise.philox import philox4x32
from potential.potential import theta_window
from wavefunction.wavefunction import density_ipr, scaled_density

logger = logging.getLogger(__name__)


class CheckResult(BaseModel):
    """Outcome of one self-check."""

    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


def _expect(condition, detail: object = "") -> None:
    if not condition:
        raise AssertionError(str(detail))


def _philox_known_answer() -> str:
    out = philox4x32(0, 0, 0, 0, key=(0, 0))
    words = tuple(int(w) for w in out)
    _expect(words == (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8), words)
    return "zero counter/key block matches"


def _elliptic_at_zero() -> str:
    value = elliptic_k(0.0)
    _expect(abs(value - math.pi / 2) <= 1e-12, value)
    return f"K(0) = {value!r}"


def _d2_linear_growth() -> str:
    r, cutoff = 1.0, 1000.0
    ratio = d2_closed(r, cutoff) / d2_asymptotic(r, cutoff)
    _expect(abs(ratio - 1.0) < 2e-3, ratio)
    return f"d2/(-8πrΛ) = {ratio:.6f}"


def _form_factor_endpoints() -> str:
    t_c = 1.0
    _expect(form_factor(0.0, t_c) == 1.0)
    _expect(form_factor(t_c, t_c) == 0.0)
    mid = form_factor(t_c / 2, t_c)
    _expect(abs(mid - 25.0 / 961.0) <= 1e-12, mid)
    return f"C(t_c/2) = {mid!r}"


def _cylinder_covariance() -> str:
    t, cutoff = 0.5, 1.0
    value = flat_D_quadrature(t, 0.0, cutoff)
    expected = 4.0 * math.pi**2 * t * cutoff
    _expect(math.isclose(value, expected, rel_tol=1e-5), (value, expected))
    return f"D(t, 0) = {value:.9g}"


def _correlation_length_prediction() -> str:
    r_c = correlation_length(2.0, 10.0)
    _expect(math.isclose(r_c, math.pi / 40.0, rel_tol=1e-15), r_c)
    return f"r_c = {r_c!r}"


def _uniform_ipr() -> str:
    z = np.linspace(-0.5, 0.5, 101)
    value = density_ipr(z, scaled_density(z, np.sin(7 * z), 0.0))
    _expect(abs(value - 1.0) < 1e-12, value)
    return f"IPR at zero coupling = {value!r}"


def _exact_decay_fit() -> str:
    r = [0.02, 0.04, 0.06, 0.08]
    estimates = [
        CorrEstimate(r=x, mean=math.exp(-x / 0.05), std_err=0.0, n=100) for x in r
    ]
    fit = fit_decay_length(estimates)
    _expect(fit is not None and math.isclose(fit.r_c_hat, 0.05, rel_tol=1e-9), fit)
    return f"r_c_hat = {fit.r_c_hat!r}"


def _theta_reproducible() -> str:
    params = PhysParams(
        coupling=1.0, cutoff_radius=0.3, cutoff_length=1.2, duration=0.1
    )
    grid = GridSpec(d_rho=0.1, d_z=0.1, d_tau=0.02).bind(params)
    field = NoiseField.for_params(2024, params, grid, realization_id=3)
    z = [-0.2, 0.0, 0.2]
    first = theta_window(field, params, grid, z, 0.0, params.duration)
    second = theta_window(field, params, grid, z, 0.0, params.duration)
    _expect(np.array_equal(first, second))
    _expect(np.all(np.isfinite(first)) and np.any(first != 0.0), first)
    return "identical keys give identical Θ"


CHECKS: list[tuple[str, Callable[[], str]]] = [
    ("philox_known_answer", _philox_known_answer),
    ("elliptic_at_zero", _elliptic_at_zero),
    ("d2_linear_growth", _d2_linear_growth),
    ("form_factor_endpoints", _form_factor_endpoints),
    ("cylinder_covariance", _cylinder_covariance),
    ("correlation_length_prediction", _correlation_length_prediction),
    ("uniform_ipr", _uniform_ipr),
    ("exact_decay_fit", _exact_decay_fit),
    ("theta_reproducible", _theta_reproducible),
]


def run_selftest() -> list[CheckResult]:
    """Run every check, catching failures so one bad check does not hide the rest."""
    results = []
    for name, check in CHECKS:
        started = time.perf_counter()
        try:
            detail, passed = check(), True
        except Exception as exc:  # noqa: BLE001
            detail, passed = f"{type(exc).__name__}: {exc}", False
        elapsed = time.perf_counter() - started
        level = logging.INFO if passed else logging.ERROR
        logger.log(level, "%s %s (%.3fs) %s", "PASS" if passed else "FAIL", name, elapsed, detail)
        results.append(CheckResult(name=name, passed=passed, detail=detail, seconds=elapsed))
    return results

"""Command-line surface for the localization lab.

Usage:
    python -m cli snapshot --config config/config.yaml --n-runs 100
    python -m cli ipr-sweep --output results/sweep.csv
    python -m cli oracle-flat --dry-run
    python -m cli selftest

Every subcommand accepts --config, --seed, --n-runs, --output, --workers,
--dry-run and --log-level. Failures print one line
``error category=<config|domain|numerical|io|usage> message=...`` to stderr.
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from analytic.flat_oracle import correlation_length, flat_D_quadrature, flat_oracle
from cli.csv_io import write_csv, write_plan_sidecar
from config.settings import Config, ConfigError, get_output_dir, load_config
from core import VERSION
from core.lattice_schema import DomainError, QuadratureError
from flrw.flrw_oracle import (
    FlrwParams,
    effective_cutoff_radius,
    flrw_D_quadrature,
    flrw_effective_rc,
    form_factor,
)
from harness.experiments import (
    run_convergence,
    run_correlation,
    run_ipr_sweep,
    run_snapshot,
)
from harness.plan import ExperimentKind, SweepResult
from harness.selftest import run_selftest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5
EXIT_USAGE = 64

ORACLE_POINTS = 6


class UsageError(Exception):
    """Bad command line or conflicting flags."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="config file (default config/config.yaml)")
    common.add_argument("--seed", type=int, default=None, help="override plan.seed")
    common.add_argument("--n-runs", type=int, default=None, help="override plan.n_runs")
    common.add_argument("--output", type=Path, default=None, help="output CSV path")
    common.add_argument("--workers", type=int, default=None, help="override plan.workers")
    common.add_argument("--dry-run", action="store_true", help="print the resolved plan and exit")
    common.add_argument(
        "--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"]
    )

    parser = _Parser(prog="localization-lab", description="Noise-induced localization experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _resolve_config(args: argparse.Namespace) -> Config:
    config = load_config(args.config)
    return config.with_plan(
        seed=args.seed,
        n_runs=args.n_runs,
        workers=args.workers,
        output=str(args.output) if args.output is not None else None,
    )


def _output_path(config: Config, command: str) -> Path:
    if config.plan.output:
        return Path(config.plan.output)
    return get_output_dir() / f"{command.replace('-', '_')}.csv"


def _separations(config: Config) -> list[float]:
    if config.plan.sweep_values:
        return list(config.plan.sweep_values)
    t = config.phys.duration
    return np.linspace(t / ORACLE_POINTS, t, ORACLE_POINTS).tolist()


def _sweep_rows(result: SweepResult) -> list[dict]:
    return [
        {result.axis: x, "mean_ipr": m, "std_err": e}
        for x, m, e in zip(result.axis_values, result.means, result.std_errs)
    ]


def _finish(config: Config, rows: list[dict], path: Path, meta: dict) -> int:
    write_csv(rows, path, config=config, meta=meta)
    write_plan_sidecar(config, path)
    print(f"wrote {path}")
    return EXIT_OK


def _dry_run(config: Config, kind: Optional[ExperimentKind]) -> int:
    print(config.to_text(), end="")
    if kind is not None:
        print(config.to_plan(kind).model_dump_json(indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_snapshot(args: argparse.Namespace, config: Config) -> int:
    plan = config.to_plan(ExperimentKind.SNAPSHOT)
    result = run_snapshot(plan)
    path = _output_path(config, args.command)
    for k, duration in enumerate(result.durations):
        densities = np.asarray(result.densities[k])
        rows = []
        for i, z in enumerate(result.z_grid):
            row = {"z": z, "mean_density": float(densities[:, i].mean())}
            row.update({f"run_{j}": float(densities[j, i]) for j in range(densities.shape[0])})
            rows.append(row)
        write_csv(
            rows,
            path.with_name(f"{path.stem}_t{k}{path.suffix}"),
            config=config,
            meta={"duration": duration, "peak_uniformity_pvalue": result.meta["peak_uniformity_pvalue"][k]},
        )
    return _finish(config, _sweep_rows(result.ipr_summary()), path, {"version": VERSION})


def cmd_ipr_sweep(args: argparse.Namespace, config: Config) -> int:
    result = run_ipr_sweep(config.to_plan(ExperimentKind.IPR_SWEEP))
    return _finish(config, _sweep_rows(result), _output_path(config, args.command), {"version": VERSION})


def cmd_convergence(args: argparse.Namespace, config: Config) -> int:
    result = run_convergence(config.to_plan(ExperimentKind.CONVERGENCE))
    return _finish(config, _sweep_rows(result), _output_path(config, args.command), {"version": VERSION})


def cmd_correlation(args: argparse.Namespace, config: Config) -> int:
    result = run_correlation(config.to_plan(ExperimentKind.CORRELATION))
    rows = [
        {
            "r": k.r,
            "k_mean": k.mean,
            "k_std_err": k.std_err,
            "d_mean": d.mean,
            "d_std_err": d.std_err,
            "n": k.n,
            "k_log_scale": k.log_scale,
            "within_light_cone": k.within_light_cone,
        }
        for k, d in zip(result.k_curve, result.d_curve)
    ]
    fit = result.fit
    meta = {
        "version": VERSION,
        "synthetic": result.synthetic,
        "r_c_hat": fit.r_c_hat if fit else "inf",
        "r_c_err": fit.r_c_err if fit else None,
        "predicted_r_c": result.predicted_r_c if result.predicted_r_c else "inf",
        "ratio": result.ratio,
    }
    return _finish(config, rows, _output_path(config, args.command), meta)


def cmd_oracle_flat(args: argparse.Namespace, config: Config) -> int:
    phys = config.phys
    t, cutoff, length = phys.duration, phys.cutoff_radius, phys.cutoff_length
    r_c = correlation_length(phys.coupling, cutoff)
    d0 = flat_D_quadrature(t, 0.0, cutoff, length)
    rows = []
    for r in _separations(config):
        closed = flat_oracle(t, r, cutoff, phys.coupling)
        rows.append({
            "r": r,
            "d1": closed.d1,
            "d2": closed.d2,
            "d_quadrature": flat_D_quadrature(t, r, cutoff, length) - d0,
            "r_c": r_c if r_c is not None else math.inf,
        })
    meta = {"version": VERSION, "r_c": r_c if r_c is not None else "inf"}
    return _finish(config, rows, _output_path(config, args.command), meta)


def cmd_oracle_flrw(args: argparse.Namespace, config: Config) -> int:
    phys, exact = config.phys, config.flrw.exact
    separations = _separations(config)
    base = FlrwParams(t_c=config.flrw.t_c, duration=phys.duration)
    d0 = flrw_D_quadrature(base, exact=exact)
    flat0 = flrw_D_quadrature(base, unit_form_factor=True)
    rows = []
    for r in separations:
        p = FlrwParams(t_c=base.t_c, duration=base.duration, r=r)
        rows.append({
            "r": r,
            "d_flrw": flrw_D_quadrature(p, exact=exact) - d0,
            "d_flat": flrw_D_quadrature(p, unit_form_factor=True) - flat0,
            "form_factor_midpoint": form_factor(r / 2.0, base.t_c),
        })
    cutoff = effective_cutoff_radius(config.flrw.t_c)
    flat_rc = correlation_length(phys.coupling, cutoff)
    r_c = None
    if len(set(separations)) >= 4:
        r_c = flrw_effective_rc(base, phys.coupling, separations, exact=exact)
    meta = {
        "version": VERSION,
        "effective_cutoff_radius": cutoff,
        "r_c": r_c if r_c is not None else "inf",
        "flat_equivalent_r_c": flat_rc if flat_rc is not None else "inf",
    }
    return _finish(config, rows, _output_path(config, args.command), meta)


def cmd_selftest(args: argparse.Namespace, config: Optional[Config]) -> int:
    results = run_selftest()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.seconds:.3f}s) {r.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        return _fail("numerical", f"self-checks failed: {', '.join(failed)}", EXIT_NUMERICAL)
    return EXIT_OK


COMMANDS: dict[str, tuple[Callable[..., int], str]] = {
    "snapshot": (cmd_snapshot, "densities at several durations on one noise history"),
    "ipr-sweep": (cmd_ipr_sweep, "mean IPR against coupling"),
    "convergence": (cmd_convergence, "mean IPR against run count or lattice step"),
    "correlation": (cmd_correlation, "K(r), D(r) and the decay-length fit"),
    "oracle-flat": (cmd_oracle_flat, "closed-form flat-space covariance and r_c"),
    "oracle-flrw": (cmd_oracle_flrw, "matter-dominated covariance and effective r_c"),
    "selftest": (cmd_selftest, "fast built-in checks"),
}

KINDS = {
    "snapshot": ExperimentKind.SNAPSHOT,
    "ipr-sweep": ExperimentKind.IPR_SWEEP,
    "convergence": ExperimentKind.CONVERGENCE,
    "correlation": ExperimentKind.CORRELATION,
}


def _fail(category: str, message: object, code: int) -> int:
    text = " ".join(str(message).split())
    logger.error("%s error: %s", category, text)
    print(f"error category={category} message={text}", file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)

    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    handler, _ = COMMANDS[args.command]
    try:
        if args.command == "selftest" and args.config is None and not args.dry_run:
            return handler(args, None)
        config = _resolve_config(args)
        if args.dry_run:
            return _dry_run(config, KINDS.get(args.command))
        return handler(args, config)
    except ConfigError as exc:
        return _fail("config", exc, EXIT_CONFIG)
    except (DomainError, ValidationError) as exc:
        return _fail("domain", exc, EXIT_DOMAIN)
    except (QuadratureError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)
    except OSError as exc:
        return _fail("io", exc, EXIT_IO)


if __name__ == "__main__":
    sys.exit(main())

"""Central configuration loader.

Experiment settings live in a flat YAML mapping of dotted keys
(``phys.coupling: 2.0``); the default output directory comes from .env or
the environment.
"""

import json
import math
import os
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from core.lattice_schema import DomainError, GridSpec, PhysParams
from correlation.estimators import KMethod
from harness.plan import AXES_BY_KIND, ExperimentKind, ExperimentPlan

_CONFIG_DIR = Path(__file__).resolve().parent
_PROJECT_ROOT = _CONFIG_DIR.parent
_CONFIG_PATH = _CONFIG_DIR / "config.yaml"

OUTPUT_DIR_ENV = "LOCALIZATION_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "results"

GRID_DEFAULTS = {"grid.d_rho": 0.1, "grid.d_z": 0.02, "grid.d_tau": 0.01}

# Execution knobs that never change results; kept out of output provenance.
RUNTIME_KEYS = frozenset({"plan.workers"})


class ConfigError(ValueError):
    """Every problem found in a configuration, not just the first."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class PlanSection(BaseModel):
    """plan.* keys: what to run and how."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Optional[ExperimentKind] = None
    sweep_axis: Optional[str] = None
    sweep_values: list[float] = Field(default_factory=list)
    n_runs: int = Field(default=50, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    output: str = ""
    workers: int = Field(default=1, ge=1)
    independent_histories: bool = False
    estimator: KMethod = KMethod.BRIDGE
    synthetic_decay_length: Optional[float] = Field(default=None, gt=0.0)


class FlrwSection(BaseModel):
    """flrw.* keys for the expanding-background oracle."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    t_c: float = Field(default=50.0, gt=0.0, allow_inf_nan=False)
    exact: bool = True


SECTIONS: dict[str, type[BaseModel]] = {
    "phys": PhysParams,
    "grid": GridSpec,
    "plan": PlanSection,
    "flrw": FlrwSection,
}

KNOWN_KEYS = frozenset(
    f"{section}.{name}" for section, model in SECTIONS.items() for name in model.model_fields
)


class Config(BaseModel):
    """Validated configuration: physics, lattice, plan and FLRW settings."""

    model_config = ConfigDict(frozen=True)

    phys: PhysParams
    grid: GridSpec
    plan: PlanSection = Field(default_factory=PlanSection)
    flrw: FlrwSection = Field(default_factory=FlrwSection)

    def flat(self) -> dict[str, Any]:
        """Dotted key → value for every setting."""
        return {
            f"{section}.{name}": value
            for section in SECTIONS
            for name, value in getattr(self, section).model_dump().items()
        }

    def to_text(self, provenance: bool = False) -> str:
        """Canonical form: sorted keys, floats at 17 significant digits.

        With provenance=True the RUNTIME_KEYS are left out, so two runs that
        differ only in worker count embed the same text.
        """
        items = sorted(
            (key, value)
            for key, value in self.flat().items()
            if not (provenance and key in RUNTIME_KEYS)
        )
        return "".join(f"{key}: {_format_value(value)}\n" for key, value in items)

    def with_plan(self, **updates: Any) -> "Config":
        """Copy with plan.* keys replaced (None values are ignored).

        Raises:
            ConfigError: if the updated plan section is invalid.
        """
        updates = {k: v for k, v in updates.items() if v is not None}
        try:
            plan = PlanSection(**{**self.plan.model_dump(), **updates})
        except ValidationError as exc:
            raise ConfigError(_describe("plan", exc, {})) from exc
        return self.model_copy(update={"plan": plan})

    def to_plan(self, kind: Optional[ExperimentKind] = None) -> ExperimentPlan:
        """Resolve an ExperimentPlan, defaulting the axis and its values.

        Raises:
            ConfigError: if no kind is given or the plan is invalid.
        """
        kind = kind or self.plan.kind
        if kind is None:
            raise ConfigError(["plan.kind: missing required key"])
        kind = ExperimentKind(kind)
        axis = self.plan.sweep_axis or AXES_BY_KIND[kind][0]
        values = self.plan.sweep_values or _default_values(self, axis)
        if not values:
            raise ConfigError([f"plan.sweep_values: required for axis '{axis}'"])
        try:
            return ExperimentPlan(
                kind=kind,
                base_params=self.phys,
                base_grid=self.grid,
                sweep_axis=axis,
                sweep_values=values,
                n_runs=self.plan.n_runs,
                seed=self.plan.seed,
                output_path=self.plan.output,
                workers=self.plan.workers,
                independent_histories=self.plan.independent_histories,
                estimator=self.plan.estimator,
                synthetic_decay_length=self.plan.synthetic_decay_length,
            )
        except ValidationError as exc:
            raise ConfigError(_describe("plan", exc, {})) from exc


def _default_values(config: Config, axis: str) -> list[float]:
    defaults = {
        "duration": [config.phys.duration],
        "coupling": [config.phys.coupling],
        "n_runs": [float(config.plan.n_runs)],
        "d_tau": [config.grid.d_tau],
        "d_rho": [config.grid.d_rho],
        "d_z": [config.grid.d_z],
    }
    return defaults.get(axis, [])


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        return {math.inf: ".inf", -math.inf: "-.inf"}.get(value, ".nan")
    text = format(value, ".17g")
    if "e" in text and "." not in text:
        text = text.replace("e", ".0e")
    elif "e" not in text and "." not in text:
        text += ".0"
    return text


def _format_value(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return json.dumps(value.value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    return json.dumps(str(value))


class _StrictLoader(yaml.SafeLoader):
    """SafeLoader that records duplicate keys and where each key was defined."""

    def __init__(self, stream):
        super().__init__(stream)
        self.duplicates: list[str] = []
        self.key_lines: dict[Any, int] = {}

    def construct_mapping(self, node, deep=False):
        seen: dict[Any, int] = {}
        for key_node, _ in node.value:
            key = self.construct_object(key_node, deep=deep)
            line = key_node.start_mark.line + 1
            if key in seen:
                self.duplicates.append(
                    f"{key}: duplicate key at lines {seen[key]} and {line}"
                )
            else:
                seen[key] = line
        self.key_lines.update(seen)
        return super().construct_mapping(node, deep=deep)


def _load_mapping(text: str) -> tuple[dict, dict, list[str]]:
    loader = _StrictLoader(text)
    try:
        data = loader.get_single_data()
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark is not None else "line ?"
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError([f"{where}: syntax error: {problem}"]) from exc
    finally:
        loader.dispose()
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(["line 1: syntax error: top level must be a mapping of keys"])
    return data, loader.key_lines, loader.duplicates


def _flatten(data: dict, prefix: str = "") -> dict[str, Any]:
    flat = {}
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def _describe(section: str, exc: ValidationError, lines: dict) -> list[str]:
    problems = []
    for err in exc.errors():
        field = ".".join(str(part) for part in err["loc"])
        key = f"{section}.{field}" if field else section
        message = err["msg"]
        if err["type"] == "missing":
            message = "missing required key"
        line = lines.get(key)
        problems.append(f"{key}: {message}" + (f" (line {line})" if line else ""))
    return problems


def _grid_problems(phys: PhysParams, grid: GridSpec, lines: dict) -> list[str]:
    """Steps that do not fit the cylinder or the particle interval."""
    problems = []
    # Clamp the other step so each key is reported on its own.
    for key, limited in (
        ("grid.d_rho", grid.model_copy(update={"d_z": min(grid.d_z, phys.particle_width)})),
        ("grid.d_z", grid.model_copy(update={"d_rho": min(grid.d_rho, phys.cutoff_radius)})),
    ):
        try:
            limited.bind(phys)
        except DomainError as exc:
            line = lines.get(key)
            problems.append(f"{key}: {exc}" + (f" (line {line})" if line else ""))
    return problems


def parse_config(text: str) -> Config:
    """Parse and validate configuration text.

    Raises:
        ConfigError: listing every syntax, duplicate, unknown-key, missing-key
            and invariant problem found.
    """
    data, key_lines, problems = _load_mapping(text)
    flat = _flatten(data)
    lines = {key: key_lines.get(key, key_lines.get(key.split(".")[0])) for key in flat}

    for key in flat:
        if key not in KNOWN_KEYS:
            problems.append(f"{key}: unknown key (line {lines[key]})")

    values = {**GRID_DEFAULTS, **{k: v for k, v in flat.items() if k in KNOWN_KEYS}}
    sections = {}
    for section, model in SECTIONS.items():
        fields = {
            key.split(".", 1)[1]: value
            for key, value in values.items()
            if key.split(".", 1)[0] == section
        }
        try:
            sections[section] = model(**fields)
        except ValidationError as exc:
            problems.extend(_describe(section, exc, lines))

    if "phys" in sections and "grid" in sections:
        problems.extend(_grid_problems(sections["phys"], sections["grid"], lines))

    if problems:
        raise ConfigError(problems)
    return Config(**sections)


def load_config(path: Optional[Path] = None) -> Config:
    """Read and parse a config file (config/config.yaml by default)."""
    path = Path(path) if path is not None else _CONFIG_PATH
    return parse_config(path.read_text(encoding="utf-8"))


def get_output_dir() -> Path:
    """Default output directory from LOCALIZATION_OUTPUT_DIR (.env honoured)."""
    load_dotenv(_PROJECT_ROOT / ".env")
    return Path(os.getenv(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR)

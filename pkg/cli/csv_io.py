"""CSV output with an embedded provenance block.

Layout::

    # plan:
    # <canonical config lines without plan.workers, each prefixed "# ">
    # meta key=value
    header
    rows...

Floats are written with 17 significant digits, so every value parses back
to the identical double.
"""

import csv
import logging
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from config.settings import Config, parse_config

logger = logging.getLogger(__name__)

PLAN_MARKER = "# plan:"
META_PREFIX = "# meta "
SIDECAR_SUFFIX = ".plan.yaml"


def format_cell(value: Any) -> str:
    """Text of one CSV cell; floats round-trip exactly."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(
    rows: Sequence[Mapping[str, Any]],
    path: Path,
    config: Optional[Config] = None,
    meta: Optional[Mapping[str, Any]] = None,
) -> Path:
    """Write rows (dicts sharing one key order) under a provenance block.

    Raises:
        ValueError: if rows is empty or not rectangular.
        OSError: if the file cannot be written; the message names the path.
    """
    if not rows:
        raise ValueError("write_csv needs at least one row")
    header = list(rows[0])
    for i, row in enumerate(rows):
        if list(row) != header:
            raise ValueError(f"row {i} has columns {list(row)}, expected {header}")

    path = Path(path)
    lines = [PLAN_MARKER]
    if config is not None:
        lines += [f"# {line}" for line in config.to_text(provenance=True).splitlines()]
    for key, value in (meta or {}).items():
        lines.append(f"{META_PREFIX}{key}={format_cell(value)}")

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write("".join(f"{line}\n" for line in lines))
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row.values()])
    logger.info("Wrote %d rows to %s", len(rows), path)
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]], dict[str, str]]:
    """Header, rows (as text) and meta entries of a file written by write_csv."""
    with open(path, newline="", encoding="utf-8") as f:
        lines = f.read().splitlines()
    meta = {}
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        if line.startswith(META_PREFIX):
            key, _, value = line[len(META_PREFIX):].partition("=")
            meta[key] = value
    else:
        body_start = len(lines)
    table = list(csv.reader(lines[body_start:]))
    if not table:
        return [], [], meta
    return table[0], table[1:], meta


def read_plan(path: Path) -> Optional[Config]:
    """Config embedded in a CSV's plan block, or None if the block is empty."""
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines or lines[0] != PLAN_MARKER:
        raise ValueError(f"{path}: missing '{PLAN_MARKER}' block")
    block = []
    for line in lines[1:]:
        if not line.startswith("# ") or line.startswith(META_PREFIX):
            break
        block.append(line[2:])
    if not block:
        return None
    return parse_config("\n".join(block) + "\n")


def sidecar_path(output: Path) -> Path:
    return Path(f"{output}{SIDECAR_SUFFIX}")


def write_plan_sidecar(config: Config, output: Path) -> Path:
    """Write the canonical config next to an output file."""
    path = sidecar_path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.to_text(provenance=True), encoding="utf-8")
    return path

"""Versioned binary dump of a PotentialSample for offline inspection.

Layout (little-endian): magic b"THETA", u16 version, u32 header length,
UTF-8 JSON header, then n float64 z values followed by n float64 Θ values.
"""

import json
import logging
import struct
from pathlib import Path

import numpy as np

from core.lattice_schema import GridSpec, PhysParams
from potential.potential import PotentialSample

logger = logging.getLogger(__name__)

MAGIC = b"THETA"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<5sHI")


def write_dump(sample: PotentialSample, seed: int, path: str | Path) -> Path:
    """Write sample to path and return the path."""
    path = Path(path)
    header = json.dumps(
        {
            "params": sample.params.model_dump(),
            "grid": sample.grid.model_dump(),
            "seed": seed,
            "realization_id": sample.realization_id,
            "n": len(sample.z_grid),
        },
        sort_keys=True,
    ).encode("utf-8")

    payload = np.concatenate([sample.z_array, sample.theta_array]).astype("<f8")
    try:
        with path.open("wb") as fh:
            fh.write(_PREFIX.pack(MAGIC, FORMAT_VERSION, len(header)))
            fh.write(header)
            fh.write(payload.tobytes())
    except OSError as exc:
        raise OSError(f"cannot write potential dump {path}: {exc}") from exc
    logger.info("Wrote Θ dump (%d points) to %s", len(sample.z_grid), path)
    return path


def read_dump(path: str | Path) -> tuple[PotentialSample, int]:
    """Read a dump written by write_dump.

    Returns:
        (sample, seed).

    Raises:
        ValueError: on a wrong magic, unsupported version or truncated file.
    """
    data = Path(path).read_bytes()
    if len(data) < _PREFIX.size:
        raise ValueError(f"{path}: truncated potential dump")
    magic, version, header_len = _PREFIX.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a potential dump (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported dump version {version}")

    start = _PREFIX.size
    header = json.loads(data[start:start + header_len].decode("utf-8"))
    n = header["n"]
    values = np.frombuffer(data, dtype="<f8", offset=start + header_len)
    if values.size != 2 * n:
        raise ValueError(f"{path}: expected {2 * n} values, found {values.size}")

    sample = PotentialSample(
        z_grid=values[:n].tolist(),
        theta=values[n:].tolist(),
        params=PhysParams.model_validate(header["params"]),
        grid=GridSpec.model_validate(header["grid"]),
        realization_id=header["realization_id"],
    )
    return sample, header["seed"]

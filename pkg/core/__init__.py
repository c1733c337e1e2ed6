"""Shared parameter, grid and cell-indexing model (public API)."""

from core.lattice_schema import (
    CellKey,
    DomainError,
    GridSpec,
    LatticeExtent,
    PhysParams,
    QuadratureError,
    cell_center,
    cell_volume,
    check_key,
    key_for_center,
    lattice_extent,
    rho_volumes,
)

VERSION = "0.1.0"

__all__ = [
    "CellKey",
    "DomainError",
    "GridSpec",
    "LatticeExtent",
    "PhysParams",
    "QuadratureError",
    "VERSION",
    "cell_center",
    "cell_volume",
    "check_key",
    "key_for_center",
    "lattice_extent",
    "rho_volumes",
]

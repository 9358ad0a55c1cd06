"""Hausdorff metric on grid sets, via exact Euclidean distance transforms."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import EmptySetError, GeometryError
from .grid import BitGrid


@dataclass
class ConvergenceTrace:
    """Per-iteration Hausdorff steps of a set iteration."""

    entries: list = field(default_factory=list)
    converged: bool = False

    def append(self, index: int, distance: float) -> None:
        self.entries.append((int(index), float(distance)))

    @property
    def final_distance(self) -> float:
        if not self.entries:
            raise ValueError("no iteration recorded")
        return self.entries[-1][1]

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "final_distance": self.final_distance if self.entries else None,
            "entries": [[i, d] for i, d in self.entries],
        }


def _check_pair(a: BitGrid, b: BitGrid) -> None:
    if not a.same_geometry(b):
        raise GeometryError("Hausdorff distance needs grids with equal bounds and resolution")
    if a.is_empty() or b.is_empty():
        raise EmptySetError("Hausdorff distance is undefined for an empty set")


def distance_to(b: BitGrid) -> np.ndarray:
    """Per-cell Euclidean distance (physical) to the nearest occupied centre of ``b``."""
    return ndimage.distance_transform_edt(~b.bits) / b.resolution


def directed_distance(a: BitGrid, b: BitGrid) -> float:
    """``sup`` over occupied cells of ``a`` of the distance to ``b``."""
    _check_pair(a, b)
    return float(distance_to(b)[a.bits].max())


def hausdorff_distance(a: BitGrid, b: BitGrid) -> float:
    """Hausdorff distance between the occupied cell-centre sets of ``a`` and ``b``."""
    _check_pair(a, b)
    return max(float(distance_to(b)[a.bits].max()), float(distance_to(a)[b.bits].max()))

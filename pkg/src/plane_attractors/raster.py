"""Rasterised images of grid sets under plane maps.

A plane map here is any object with ``forward(x, y) -> (x', y')`` acting on
numpy arrays, an ``invertible`` flag and, when invertible,
``inverse(x, y)``.  The image of a grid is the union of

* the cells hit by forward images of occupied centres, which keeps sets
  smaller than a cell from vanishing under contraction, and
* the cells whose centre pulls back into an occupied cell, which keeps
  images free of the holes forward scatter leaves where a map expands.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import ndimage

from .errors import OutOfBoundsError
from .grid import STRUCT_4, BitGrid


@dataclass(frozen=True)
class FunctionMap:
    """Plane map given by vectorised callables."""

    forward: Callable
    inverse: Optional[Callable] = None
    name: str = ""

    @property
    def invertible(self) -> bool:
        return self.inverse is not None


IDENTITY = FunctionMap(lambda x, y: (x, y), lambda x, y: (x, y), "identity")


def _boundary_cells(bits: np.ndarray) -> np.ndarray:
    return bits & ~ndimage.binary_erosion(bits, STRUCT_4, border_value=0)


def _image_bbox(g: BitGrid, forward):
    """Index box of the grid cells that the image of the occupied cells can meet."""
    rows, cols = np.nonzero(_boundary_cells(g.bits))
    x, y = g.centers(rows, cols)
    h = 0.5 / g.resolution
    xs, ys = [], []
    for dx, dy in ((-h, -h), (-h, h), (h, -h), (h, h), (0.0, 0.0)):
        fx, fy = forward(x + dx, y + dy)
        xs.append(fx)
        ys.append(fy)
    xs = np.concatenate(xs)
    ys = np.concatenate(ys)
    ok = np.isfinite(xs) & np.isfinite(ys)
    if not ok.any():
        return None
    ny, nx = g.shape
    c0 = int(np.floor((xs[ok].min() - g.bounds[0]) * g.resolution)) - 1
    c1 = int(np.floor((xs[ok].max() - g.bounds[0]) * g.resolution)) + 2
    r0 = int(np.floor((ys[ok].min() - g.bounds[1]) * g.resolution)) - 1
    r1 = int(np.floor((ys[ok].max() - g.bounds[1]) * g.resolution)) + 2
    c0, r0 = max(c0, 0), max(r0, 0)
    c1, r1 = min(c1, nx), min(r1, ny)
    if c0 >= c1 or r0 >= r1:
        return None
    return r0, r1, c0, c1


def map_image(g: BitGrid, plane_map, clamp: bool = False, backward: bool = True) -> BitGrid:
    """Rasterised image of ``g`` under ``plane_map``.

    Raises :class:`OutOfBoundsError` when a forward image of an occupied
    centre leaves the frame, unless ``clamp`` is set.  ``backward=True`` with
    a non-invertible map raises ``ValueError``.
    """
    out = np.zeros(g.shape, dtype=bool)
    if g.is_empty():
        return g.with_bits(out)
    if backward and not plane_map.invertible:
        raise ValueError(f"map {plane_map!r} has no inverse; backward rasterisation impossible")
    x, y = g.occupied_centers()
    fx, fy = plane_map.forward(x, y)
    rows, cols, inside = g.locate(fx, fy)
    if not clamp and not inside.all():
        raise OutOfBoundsError("image of the grid escapes its bounds")
    out[rows[inside], cols[inside]] = True
    if backward:
        box = _image_bbox(g, plane_map.forward)
        if box is not None:
            r0, r1, c0, c1 = box
            tx, ty = np.meshgrid(g.xs()[c0:c1], g.ys()[r0:r1])
            px, py = plane_map.inverse(tx, ty)
            out[r0:r1, c0:c1] |= g.contains_points(px, py)
    return g.with_bits(out)


def union_image(g: BitGrid, maps, clamp: bool = False, backward: bool = True) -> BitGrid:
    """Union of the images of ``g`` under every map."""
    bits = np.zeros(g.shape, dtype=bool)
    for m in maps:
        bits |= map_image(g, m, clamp=clamp, backward=backward).bits
    return g.with_bits(bits)

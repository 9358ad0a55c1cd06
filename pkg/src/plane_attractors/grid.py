"""Occupancy grids standing in for compact subsets of a plane rectangle.

A :class:`BitGrid` is a boolean bitmap over an axis-aligned rectangle with a
uniform resolution (pixels per unit length).  Membership is decided by cell
centres: a cell is occupied iff its centre belongs to the represented set.
Row ``i`` of ``bits`` holds cells whose centres have ``y = y0 + (i + 0.5)/res``
so the array is indexed ``bits[row, col]`` with ``y`` increasing with ``row``.

All distances in the public API are physical; conversion to pixels happens
inside each function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import EmptySetError, GeometryError, OutOfBoundsError

# Float slack used when comparing pixel distances; far below any pixel scale.
_EPS = 1e-9

STRUCT_8 = np.ones((3, 3), dtype=bool)
STRUCT_4 = ndimage.generate_binary_structure(2, 1)


def _pixels(extent: float, resolution: float) -> int:
    return max(1, math.ceil(extent * resolution - _EPS))


@dataclass(frozen=True, eq=False)
class BitGrid:
    """Immutable occupancy bitmap with physical bounds.

    Parameters
    ----------
    bounds : tuple of float
        ``(x0, y0, x1, y1)`` of the framing rectangle.
    resolution : float
        Pixels per unit length, identical in ``x`` and ``y``.
    bits : ndarray of bool, shape ``(ny, nx)``
        Occupancy; ``ny = ceil((y1 - y0) * resolution)`` and likewise ``nx``.
    """

    bounds: tuple
    resolution: float
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        x0, y0, x1, y1 = (float(v) for v in self.bounds)
        if not (x1 > x0 and y1 > y0) or not all(map(math.isfinite, (x0, y0, x1, y1))):
            raise GeometryError(f"degenerate bounds {self.bounds!r}")
        if not (self.resolution > 0 and math.isfinite(self.resolution)):
            raise GeometryError(f"resolution must be positive, got {self.resolution!r}")
        bits = np.array(self.bits, dtype=bool, copy=True)
        expected = (_pixels(y1 - y0, self.resolution), _pixels(x1 - x0, self.resolution))
        if bits.shape != expected:
            raise GeometryError(f"bits shape {bits.shape} does not match bounds, expected {expected}")
        bits.setflags(write=False)
        object.__setattr__(self, "bounds", (x0, y0, x1, y1))
        object.__setattr__(self, "resolution", float(self.resolution))
        object.__setattr__(self, "bits", bits)

    # geometry ---------------------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.bits.shape

    @property
    def pixel(self) -> float:
        """Side length of one cell in physical units."""
        return 1.0 / self.resolution

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    def is_empty(self) -> bool:
        return not self.bits.any()

    def same_geometry(self, other: "BitGrid") -> bool:
        return self.bounds == other.bounds and self.resolution == other.resolution

    def xs(self) -> np.ndarray:
        """Cell-centre x coordinates, one per column."""
        return self.bounds[0] + (np.arange(self.shape[1]) + 0.5) / self.resolution

    def ys(self) -> np.ndarray:
        return self.bounds[1] + (np.arange(self.shape[0]) + 0.5) / self.resolution

    def centers(self, rows, cols):
        return (self.bounds[0] + (np.asarray(cols) + 0.5) / self.resolution,
                self.bounds[1] + (np.asarray(rows) + 0.5) / self.resolution)

    def occupied_centers(self):
        rows, cols = np.nonzero(self.bits)
        return self.centers(rows, cols)

    def locate(self, x, y):
        """Return ``(rows, cols, inside)`` of the cells containing the points."""
        cols = np.floor((np.asarray(x, dtype=float) - self.bounds[0]) * self.resolution)
        rows = np.floor((np.asarray(y, dtype=float) - self.bounds[1]) * self.resolution)
        ny, nx = self.shape
        with np.errstate(invalid="ignore"):
            inside = (cols >= 0) & (cols < nx) & (rows >= 0) & (rows < ny)
        cols = np.where(inside, cols, 0).astype(np.intp)
        rows = np.where(inside, rows, 0).astype(np.intp)
        return rows, cols, inside

    def contains_points(self, x, y) -> np.ndarray:
        """True where the point falls in an occupied cell (NaN counts as outside)."""
        rows, cols, inside = self.locate(x, y)
        return inside & self.bits[rows, cols]

    def with_bits(self, bits) -> "BitGrid":
        return BitGrid(self.bounds, self.resolution, bits)

    def empty_like(self) -> "BitGrid":
        return self.with_bits(np.zeros(self.shape, dtype=bool))

    # set algebra ------------------------------------------------------------
    def _check(self, other):
        if not self.same_geometry(other):
            raise GeometryError("grids have different bounds or resolution")

    def __or__(self, other):
        self._check(other)
        return self.with_bits(self.bits | other.bits)

    def __and__(self, other):
        self._check(other)
        return self.with_bits(self.bits & other.bits)

    def __sub__(self, other):
        self._check(other)
        return self.with_bits(self.bits & ~other.bits)

    def __invert__(self):
        return self.with_bits(~self.bits)

    def __eq__(self, other):
        if not isinstance(other, BitGrid):
            return NotImplemented
        return self.same_geometry(other) and np.array_equal(self.bits, other.bits)

    __hash__ = None

    def issubset(self, other: "BitGrid") -> bool:
        self._check(other)
        return not (self.bits & ~other.bits).any()


# seed regions ----------------------------------------------------------------
@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def contains(self, x, y):
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)

    def bbox(self):
        return (self.x0, self.y0, self.x1, self.y1)


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    radius: float

    def contains(self, x, y):
        return (x - self.cx) ** 2 + (y - self.cy) ** 2 <= self.radius ** 2 * (1 + 1e-12)

    def bbox(self):
        return (self.cx - self.radius, self.cy - self.radius,
                self.cx + self.radius, self.cy + self.radius)


@dataclass(frozen=True)
class Annulus:
    cx: float
    cy: float
    inner: float
    outer: float

    def contains(self, x, y):
        r2 = (x - self.cx) ** 2 + (y - self.cy) ** 2
        return (r2 >= self.inner ** 2) & (r2 <= self.outer ** 2)

    def bbox(self):
        return Disk(self.cx, self.cy, self.outer).bbox()


@dataclass(frozen=True)
class Polygon:
    """Closed convex polygon given counter-clockwise."""

    vertices: tuple

    def contains(self, x, y):
        v = np.asarray(self.vertices, dtype=float)
        inside = np.ones(np.broadcast(x, y).shape, dtype=bool)
        for (ax, ay), (bx, by) in zip(v, np.roll(v, -1, axis=0)):
            cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
            inside &= cross >= -1e-12
        return inside

    def bbox(self):
        v = np.asarray(self.vertices, dtype=float)
        return (*v.min(axis=0), *v.max(axis=0))


def new_grid(bounds, resolution: float, seed_region=None) -> BitGrid:
    """Create a grid, optionally rasterising ``seed_region`` by cell centres.

    Raises :class:`GeometryError` for degenerate bounds or a seed whose
    bounding box leaves the frame.
    """
    x0, y0, x1, y1 = (float(v) for v in bounds)
    if not (x1 > x0 and y1 > y0):
        raise GeometryError(f"degenerate bounds {bounds!r}")
    if not resolution > 0:
        raise GeometryError(f"resolution must be positive, got {resolution!r}")
    shape = (_pixels(y1 - y0, resolution), _pixels(x1 - x0, resolution))
    if seed_region is None:
        return BitGrid((x0, y0, x1, y1), resolution, np.zeros(shape, dtype=bool))
    sx0, sy0, sx1, sy1 = seed_region.bbox()
    slack = 1e-12 * max(1.0, abs(x0), abs(x1), abs(y0), abs(y1))
    if sx0 < x0 - slack or sy0 < y0 - slack or sx1 > x1 + slack or sy1 > y1 + slack:
        raise GeometryError(f"seed region {seed_region!r} is not inside bounds {bounds!r}")
    g = BitGrid((x0, y0, x1, y1), resolution, np.zeros(shape, dtype=bool))
    xs, ys = np.meshgrid(g.xs(), g.ys())
    return g.with_bits(seed_region.contains(xs, ys))


# morphology ------------------------------------------------------------------
def dilate(g: BitGrid, eps: float, clamp: bool = False) -> BitGrid:
    """Closed ``eps``-neighbourhood by cell centres (Euclidean).

    In strict mode (default) a dilation reaching a centre outside the frame
    raises :class:`OutOfBoundsError`; ``clamp=True`` crops silently.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    r = eps * g.resolution
    if r < _EPS or g.is_empty():
        return g
    pad = math.ceil(r) + 1
    padded = np.pad(g.bits, pad)
    dist = ndimage.distance_transform_edt(~padded)
    grown = dist <= r + _EPS
    inner = grown[pad:-pad, pad:-pad]
    if not clamp and grown.sum() != inner.sum():
        raise OutOfBoundsError(f"dilation by {eps} escapes the grid bounds")
    return g.with_bits(inner)


def erode(g: BitGrid, eps: float) -> BitGrid:
    """Cells whose closed ``eps``-ball contains only occupied centres.

    Space outside the frame counts as empty.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    r = eps * g.resolution
    if r < _EPS or g.is_empty():
        return g
    dist = ndimage.distance_transform_edt(np.pad(g.bits, 1))
    return g.with_bits(dist[1:-1, 1:-1] > r + _EPS)


def closing(g: BitGrid, eps: float, clamp: bool = True) -> BitGrid:
    return erode(dilate(g, eps, clamp=clamp), eps)


@dataclass(frozen=True, eq=False)
class ComponentReport:
    """Connected components of a grid set and of its complement.

    ``labels`` is positive on occupied cells (set component ids, 1-based),
    ``-1`` on the unbounded complement component and ``-2, -3, ...`` on the
    bounded complement components.
    """

    set_components: int
    bounded_complement_components: int
    unbounded_complement_components: int
    labels: np.ndarray = field(repr=False)


def components(g: BitGrid, connectivity: int = 8) -> ComponentReport:
    """Label the set with ``connectivity`` and its complement with the dual one."""
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    set_struct, dual_struct = (STRUCT_8, STRUCT_4) if connectivity == 8 else (STRUCT_4, STRUCT_8)
    set_labels, n_set = ndimage.label(g.bits, structure=set_struct)
    # A one-cell empty frame joins everything outside into one component.
    comp_labels, n_comp = ndimage.label(np.pad(~g.bits, 1, constant_values=True), structure=dual_struct)
    outer = comp_labels[0, 0]
    comp_labels = comp_labels[1:-1, 1:-1]
    labels = set_labels.astype(np.int64)
    free = ~g.bits
    # Renumber complement: unbounded -> -1, bounded -> -2, -3, ...
    lut = np.zeros(n_comp + 1, dtype=np.int64)
    bounded_ids = [k for k in range(1, n_comp + 1) if k != outer]
    lut[outer] = -1
    for n, k in enumerate(bounded_ids):
        lut[k] = -2 - n
    labels[free] = lut[comp_labels[free]]
    return ComponentReport(int(n_set), len(bounded_ids), 1, labels)


def fill_holes(g: BitGrid, connectivity: int = 8) -> BitGrid:
    """The set together with every bounded complement component."""
    rep = components(g, connectivity)
    return g.with_bits(rep.labels != -1)


def subset_of_interior(a: BitGrid, b: BitGrid, margin: float = 1) -> bool:
    """True iff ``a`` lies inside ``b`` eroded by ``margin`` pixels."""
    if not a.same_geometry(b):
        raise GeometryError("subset_of_interior needs grids with equal bounds and resolution")
    core = erode(b, margin / b.resolution)
    return not (a.bits & ~core.bits).any()


def interior_nonempty(g: BitGrid, eps: float) -> bool:
    """Finite-scale interior test: does ``erode(g, eps)`` keep any cell?

    ``eps`` must be at least two pixel widths so the verdict is not decided
    by rasterisation jitter alone.
    """
    if eps * g.resolution < 2 - _EPS:
        raise ValueError(f"eps={eps} is below two pixel widths ({2 * g.pixel})")
    return not erode(g, eps).is_empty()


def require_nonempty(g: BitGrid, what: str = "grid") -> None:
    if g.is_empty():
        raise EmptySetError(f"{what} is empty")


def downsample(g: BitGrid, factor: int) -> BitGrid:
    """OR-pool ``factor`` x ``factor`` blocks; the grid extent must divide."""
    ny, nx = g.shape
    if ny % factor or nx % factor:
        raise GeometryError(f"grid shape {g.shape} not divisible by {factor}")
    pooled = g.bits.reshape(ny // factor, factor, nx // factor, factor).any(axis=(1, 3))
    return BitGrid(g.bounds, g.resolution / factor, pooled)

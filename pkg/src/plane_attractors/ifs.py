"""Iterated function systems of plane maps and their attractors.

The deterministic algorithm iterates the Hutchinson operator on a grid until
successive iterates are within a Hausdorff tolerance.  The chaos game is kept
as an independent cross-check.  Box counting gives the dimension proxy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ContractivityError, ConvergenceError, EmptySetError, GeometryError, OutOfBoundsError
from .grid import BitGrid, Polygon, Rect, components, interior_nonempty, new_grid, require_nonempty
from .hyperspace import ConvergenceTrace, hausdorff_distance
from .raster import union_image

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class AffineMap2:
    """``(x, y) -> (a x + b y + e, c x + d y + f)``."""

    a: float
    b: float
    c: float
    d: float
    e: float = 0.0
    f: float = 0.0
    name: str = ""

    @property
    def linear(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def invertible(self) -> bool:
        return self.det != 0.0

    def forward(self, x, y):
        return self.a * x + self.b * y + self.e, self.c * x + self.d * y + self.f

    __call__ = forward

    def inverse(self, x, y):
        det = self.det
        if det == 0.0:
            raise ValueError(f"affine map {self.name or self} is singular")
        u = x - self.e
        v = y - self.f
        return (self.d * u - self.b * v) / det, (-self.c * u + self.a * v) / det

    def compose(self, other: "AffineMap2") -> "AffineMap2":
        """``self o other``."""
        m = self.linear @ other.linear
        t = self.linear @ np.array([other.e, other.f]) + np.array([self.e, self.f])
        return AffineMap2(m[0, 0], m[0, 1], m[1, 0], m[1, 1], t[0], t[1])

    def inverse_map(self) -> "AffineMap2":
        det = self.det
        if det == 0.0:
            raise ValueError("singular affine map has no inverse")
        a, b, c, d = self.d / det, -self.b / det, -self.c / det, self.a / det
        return AffineMap2(a, b, c, d, -(a * self.e + b * self.f), -(c * self.e + d * self.f))

    def fixed_point(self):
        m = np.eye(2) - self.linear
        return tuple(np.linalg.solve(m, [self.e, self.f]))

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in "abcdef"}


def similarity(scale: float, angle: float = 0.0, tx: float = 0.0, ty: float = 0.0,
               name: str = "") -> AffineMap2:
    """Orientation-preserving similarity ``z -> scale e^{i angle} z + t``."""
    c, s = scale * math.cos(angle), scale * math.sin(angle)
    return AffineMap2(c, -s, s, c, tx, ty, name)


def contraction_factor(m) -> float:
    """Largest singular value of the linear part (the Lipschitz constant)."""
    return float(np.linalg.norm(m.linear, 2))


@dataclass(frozen=True)
class IFSystem:
    maps: tuple
    probabilities: Optional[tuple] = None
    name: str = ""

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("an IFS needs at least one map")
        object.__setattr__(self, "maps", maps)
        if self.probabilities is not None:
            p = tuple(float(v) for v in self.probabilities)
            if len(p) != len(maps) or min(p) < 0 or sum(p) <= 0:
                raise ValueError("probabilities must be non-negative, one per map")
            object.__setattr__(self, "probabilities", p)

    @property
    def contraction_factors(self) -> tuple:
        return tuple(contraction_factor(m) for m in self.maps)

    @property
    def factor(self) -> float:
        return max(self.contraction_factors)

    def is_contractive(self) -> bool:
        return self.factor < 1.0

    def require_contractive(self) -> None:
        if not self.is_contractive():
            raise ContractivityError(
                f"system {self.name or ''} has contraction factors {self.contraction_factors}")

    def subsystem(self, indices, name: str = "") -> "IFSystem":
        return IFSystem(tuple(self.maps[i] for i in indices), name=name)

    def conjugate(self, s: AffineMap2) -> "IFSystem":
        """System ``{s o f o s^-1}``; its attractor is ``s(K)``."""
        sinv = s.inverse_map()
        return IFSystem(tuple(s.compose(m).compose(sinv) for m in self.maps), name=self.name)

    def __len__(self):
        return len(self.maps)


@dataclass
class AttractorReport:
    attractor: BitGrid
    trace: ConvergenceTrace
    iterations: int
    shape: object = None
    h1_rank: object = None
    dimension: object = None
    empty_interior: Optional[bool] = None
    connected: Optional[bool] = None
    holes: Optional[int] = None  # bounded complement components at this resolution
    apriori_iterations: Optional[float] = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "iterations": self.iterations,
            "trace": self.trace.to_dict(),
            "occupied_cells": self.attractor.count,
            "empty_interior": self.empty_interior,
            "connected": self.connected,
            "bounded_complement_components": self.holes,
            "apriori_iterations": self.apriori_iterations,
        }
        if self.shape is not None:
            out["shape"] = self.shape.to_dict()
        if self.h1_rank is not None:
            out["h1_rank"] = self.h1_rank.to_dict()
        if self.dimension is not None:
            out["dimension"] = self.dimension.to_dict()
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def hutchinson(F: IFSystem, g: BitGrid, clamp: bool = False) -> BitGrid:
    """One application of ``S -> union of f_i(S)`` on the grid."""
    require_nonempty(g, "Hutchinson input")
    return union_image(g, F.maps, clamp=clamp)


def banach_iterations(factor: float, tol: float, d0: float) -> float:
    """A-priori iteration count from the Banach estimate ``lambda^n d0 / (1 - lambda) <= tol``."""
    if d0 <= 0:
        return 0.0
    if factor <= 0:
        return 1.0
    return max(0.0, math.log(tol * (1 - factor) / d0) / math.log(factor))


def attractor_deterministic(F: IFSystem, seed: BitGrid, tol: Optional[float] = None,
                            max_iter: int = 100) -> AttractorReport:
    """Iterate the Hutchinson operator from ``seed`` until the step is ``<= tol``.

    ``tol`` defaults to two pixel widths.  Raises :class:`ContractivityError`,
    :class:`EmptySetError` or :class:`ConvergenceError` (carrying the trace).
    """
    F.require_contractive()
    require_nonempty(seed, "seed")
    if tol is None:
        tol = 2.0 * seed.pixel
    trace = ConvergenceTrace()
    g = seed
    apriori = None
    for k in range(1, max_iter + 1):
        nxt = hutchinson(F, g)
        if nxt.is_empty():
            raise EmptySetError(f"iterate {k} is empty")
        step = hausdorff_distance(nxt, g)
        trace.append(k, step)
        if k == 1:
            apriori = banach_iterations(F.factor, tol, step)
        g = nxt
        if step <= tol:
            trace.converged = True
            return AttractorReport(g, trace, k, apriori_iterations=apriori)
    raise ConvergenceError(f"no convergence within {max_iter} iterations", trace)


def _chaos_probabilities(F: IFSystem) -> np.ndarray:
    """Explicit probabilities, else ``|det|``-proportional with every map at least ``1/(10k)``."""
    if F.probabilities is not None:
        p = np.asarray(F.probabilities, dtype=float)
        return p / p.sum()
    k = len(F)
    dets = np.array([abs(m.det) if hasattr(m, "det") else 1.0 for m in F.maps])
    if dets.sum() <= 0:
        return np.full(k, 1.0 / k)
    floor = 1.0 / (10 * k)
    p = dets / dets.sum()
    low = np.zeros(k, dtype=bool)
    while True:
        # floored maps get exactly the floor; the rest share what is left in proportion
        free = 1.0 - floor * low.sum()
        p = np.where(low, floor, dets * free / dets[~low].sum())
        newly = ~low & (p < floor)
        if not newly.any():
            return p
        low |= newly


def attractor_chaos_game(F: IFSystem, n_points: int, burn_in: int, rng_seed: int,
                         g_template: BitGrid, chains: int = 1024) -> BitGrid:
    """Random-iteration rendering of the attractor.

    ``chains`` independent orbits run side by side (vectorised); each discards
    its first ``burn_in`` points and together they plot ``n_points`` points.
    Map probabilities are proportional to ``|det|`` with floor ``1/(10k)``.
    The result depends only on the arguments.
    """
    F.require_contractive()
    if n_points <= burn_in:
        raise ValueError("n_points must exceed burn_in")
    rng = np.random.default_rng(rng_seed)
    p = _chaos_probabilities(F)
    chains = max(1, min(chains, n_points))
    steps = -(-n_points // chains)
    start = F.maps[0].fixed_point() if hasattr(F.maps[0], "fixed_point") else (0.0, 0.0)
    x = np.full(chains, float(start[0]))
    y = np.full(chains, float(start[1]))
    bits = np.zeros(g_template.shape, dtype=bool)
    plotted = 0
    for step in range(burn_in + steps):
        choice = rng.choice(len(F), size=chains, p=p)
        nx, ny = np.empty_like(x), np.empty_like(y)
        for i, m in enumerate(F.maps):
            sel = choice == i
            if sel.any():
                nx[sel], ny[sel] = m.forward(x[sel], y[sel])
        x, y = nx, ny
        if step < burn_in:
            continue
        take = min(chains, n_points - plotted)
        if take <= 0:
            break
        rows, cols, inside = g_template.locate(x[:take], y[:take])
        if not inside.all():
            raise OutOfBoundsError("chaos-game orbit left the grid bounds")
        bits[rows, cols] = True
        plotted += take
    return g_template.with_bits(bits)


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    stderr: float
    residual: float
    scales: tuple
    counts: tuple

    def to_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "residual": self.residual,
                "scales_px": list(self.scales), "box_counts": list(self.counts),
                "note": "box-counting dimension (upper bound proxy for Hausdorff dimension)"}


def box_counts(g: BitGrid, size: int) -> int:
    """Number of aligned ``size`` x ``size`` pixel boxes meeting the set."""
    ny, nx = g.shape
    if ny % size or nx % size:
        raise GeometryError(f"box size {size} does not divide grid shape {g.shape}")
    return int(g.bits.reshape(ny // size, size, nx // size, size).any(axis=(1, 3)).sum())


def box_counting_dimension(g: BitGrid, scales: Sequence[int]) -> DimensionEstimate:
    """Least-squares slope of ``log N(eps)`` against ``log(1/eps)``.

    ``scales`` are box sizes in pixels; each must divide both grid extents.
    """
    scales = sorted(int(s) for s in scales)
    if len(scales) < 3:
        raise ValueError("box counting needs at least three scales")
    require_nonempty(g, "box-counting input")
    counts = np.array([box_counts(g, s) for s in scales], dtype=float)
    if np.all(counts == counts[0]):
        raise ValueError("degenerate fit: every scale has the same box count")
    eps = np.array(scales, dtype=float) / g.resolution
    X = np.log(1.0 / eps)
    Y = np.log(counts)
    A = np.vstack([X, np.ones_like(X)]).T
    coef, res, *_ = np.linalg.lstsq(A, Y, rcond=None)
    slope = float(coef[0])
    resid = Y - A @ coef
    dof = len(X) - 2
    sigma2 = float(resid @ resid) / dof if dof > 0 else 0.0
    stderr = math.sqrt(sigma2 / float(((X - X.mean()) ** 2).sum()))
    return DimensionEstimate(slope, stderr, float(np.sqrt(np.mean(resid ** 2))),
                             tuple(scales), tuple(int(c) for c in counts))


# reference systems ------------------------------------------------------------
def example_41_ifs(which: str = "all") -> IFSystem:
    """The six similarities of the circle-shaped example.

    ``which`` is ``"all"``, ``"first3"`` (maps 1-3) or ``"last3"`` (maps 4-6,
    the Sierpinski gasket).
    """
    r = 19.0 / 30.0
    t = 11.0 / 30.0
    maps = (
        AffineMap2(r, 0, 0, r, 0.0, 0.0, "h1"),
        AffineMap2(r, 0, 0, r, 0.5 * t, 0.5 * SQRT3 * t, "h2"),
        AffineMap2(r, 0, 0, r, t, 0.0, "h3"),
        AffineMap2(0.5, 0, 0, 0.5, 0.0, 0.0, "h4"),
        AffineMap2(0.5, 0, 0, 0.5, 0.25, 0.25 * SQRT3, "h5"),
        AffineMap2(0.5, 0, 0, 0.5, 0.5, 0.0, "h6"),
    )
    if which == "all":
        return IFSystem(maps, name="example41")
    if which == "first3":
        return IFSystem(maps[:3], name="example41-first3")
    if which == "last3":
        return IFSystem(maps[3:], name="example41-last3")
    raise ValueError(f"unknown selector {which!r}")


def sierpinski_ifs() -> IFSystem:
    return example_41_ifs("last3")


def koch_ifs() -> IFSystem:
    """Von Koch curve from (0, 0) to (1, 0): four similarities of ratio 1/3."""
    third = 1.0 / 3.0
    return IFSystem((
        similarity(third, 0.0, 0.0, 0.0, "k1"),
        similarity(third, math.pi / 3, third, 0.0, "k2"),
        similarity(third, -math.pi / 3, 0.5, SQRT3 / 6, "k3"),
        similarity(third, 0.0, 2 * third, 0.0, "k4"),
    ), name="koch")


UNIT_TRIANGLE = Polygon(((0.0, 0.0), (1.0, 0.0), (0.5, SQRT3 / 2)))
KOCH_HULL = Polygon(((0.0, 0.0), (1.0, 0.0), (0.5, SQRT3 / 6)))

BUILTIN_FRAMES = {
    # name: (bounds, seed region)
    "example41": ((-0.05, -0.05, 1.05, 0.95), UNIT_TRIANGLE),
    "example41-first3": ((-0.05, -0.05, 1.05, 0.95), UNIT_TRIANGLE),
    "example41-last3": ((-0.05, -0.05, 1.05, 0.95), UNIT_TRIANGLE),
    "koch": ((-0.05, -0.1, 1.05, 0.4), KOCH_HULL),
}


def builtin_ifs(name: str) -> IFSystem:
    if name == "example41":
        return example_41_ifs("all")
    if name == "example41-first3":
        return example_41_ifs("first3")
    if name == "example41-last3":
        return example_41_ifs("last3")
    if name == "koch":
        return koch_ifs()
    raise KeyError(f"unknown built-in IFS {name!r}")


def render_attractor(F: IFSystem, bounds, resolution: float, seed_region=None,
                     tol: Optional[float] = None, max_iter: int = 100) -> AttractorReport:
    """Deterministic attractor on a fresh grid, seeded by ``seed_region`` (default: whole frame shrunk 1%)."""
    if seed_region is None:
        x0, y0, x1, y1 = bounds
        mx, my = 0.01 * (x1 - x0), 0.01 * (y1 - y0)
        seed_region = Rect(x0 + mx, y0 + my, x1 - mx, y1 - my)
    seed = new_grid(bounds, resolution, seed_region)
    return attractor_deterministic(F, seed, tol, max_iter)


def subdivision_render(F: IFSystem, seed: BitGrid, depth: int) -> BitGrid:
    """``depth`` applications of the Hutchinson operator to ``seed``."""
    g = seed
    for _ in range(depth):
        g = hutchinson(F, g)
    return g


def annotate(report: AttractorReport, interior_eps: Optional[float] = None) -> AttractorReport:
    """Fill the interior and connectivity flags (interior scale defaults to 4 pixels)."""
    g = report.attractor
    eps = interior_eps if interior_eps is not None else 4.0 * g.pixel
    report.empty_interior = not interior_nonempty(g, eps)
    comp = components(g)
    report.connected = comp.set_components == 1
    report.holes = comp.bounded_complement_components
    return report

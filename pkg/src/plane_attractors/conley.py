"""Conley attractors of invertible IFS without contraction, and their continuation.

An attractor block is a grid set ``Q`` with ``F(Q)`` inside the interior of
``Q``.  Iterating the set map from ``Q`` gives a nested sequence (the raster
set map is monotone, so ``F(Q) <= Q`` propagates), whose limit is the Conley
attractor.  Along a parametrised family the attractor is continued by keeping
the block fixed: wherever ``Q`` still verifies, the attractor inside it is
the continuation of the base one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConvergenceError, EmptySetError, NestednessError, OutOfBoundsError
from .grid import BitGrid, components, dilate, require_nonempty, subset_of_interior
from .hyperspace import ConvergenceTrace, hausdorff_distance
from .ifs import AttractorReport, IFSystem
from .raster import union_image

VERIFIED = "verified"
BLOCK_LOST = "block-lost"


@dataclass(frozen=True)
class InvertibleIFS:
    """Finite family of invertible plane maps; no contraction is assumed."""

    maps: tuple
    name: str = ""

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("an IFS needs at least one map")
        for m in maps:
            if not getattr(m, "invertible", False):
                raise ValueError(f"map {getattr(m, 'name', m)!r} is not invertible")
        object.__setattr__(self, "maps", maps)

    @classmethod
    def from_ifs(cls, F: IFSystem) -> "InvertibleIFS":
        return cls(F.maps, F.name)

    def round_trip_error(self, X: BitGrid, samples: int = 1000, seed: int = 0) -> float:
        """Worst ``|f^-1(f(p)) - p|`` over random points of ``X`` and all maps."""
        require_nonempty(X, "working region")
        rng = np.random.default_rng(seed)
        x, y = X.occupied_centers()
        idx = rng.integers(0, x.size, samples)
        h = 0.5 / X.resolution
        px = x[idx] + rng.uniform(-h, h, samples)
        py = y[idx] + rng.uniform(-h, h, samples)
        worst = 0.0
        for m in self.maps:
            fx, fy = m.forward(px, py)
            bx, by = m.inverse(fx, fy)
            worst = max(worst, float(np.nanmax(np.hypot(bx - px, by - py))))
        return worst


@dataclass(frozen=True)
class AttractorBlock:
    Q: BitGrid
    margin: float
    verified: bool


def system_image(F: InvertibleIFS, S: BitGrid) -> BitGrid:
    """``union f_i(S)``, backward rasterised; escaping the frame raises :class:`OutOfBoundsError`."""
    return union_image(S, F.maps)


def verify_attractor_block(F: InvertibleIFS, Q: BitGrid, margin: float = 2) -> bool:
    """``F(Q)`` inside the interior of ``Q`` with a ``margin``-pixel guard band.

    An image leaving the frame means ``Q`` is not a block, so the answer is
    ``False`` rather than an error.
    """
    require_nonempty(Q, "block")
    try:
        image = system_image(F, Q)
    except OutOfBoundsError:
        return False
    return subset_of_interior(image, Q, margin)


def attractor_block(F: InvertibleIFS, Q: BitGrid, margin: float = 2) -> AttractorBlock:
    return AttractorBlock(Q, margin, verify_attractor_block(F, Q, margin))


def conley_attractor(F: InvertibleIFS, Q: BitGrid, tol: Optional[float] = None, k_max: int = 200,
                     margin: float = 2, check_block: bool = True) -> AttractorReport:
    """Limit of ``F^k(Q)`` for a verified block ``Q``.

    Stops when a step moves the set by at most ``tol`` (default two pixels;
    ``tol=0`` waits for exact stationarity, which a nested sequence of grid
    sets always reaches).  Each iterate must lie inside its predecessor.
    """
    if check_block and not verify_attractor_block(F, Q, margin):
        raise ValueError("Q is not a verified attractor block")
    if tol is None:
        tol = 2.0 * Q.pixel
    trace = ConvergenceTrace()
    S = Q
    for k in range(1, k_max + 1):
        nxt = system_image(F, S)
        if nxt.is_empty():
            raise EmptySetError(f"iterate {k} is empty")
        if not nxt.issubset(S):
            raise NestednessError(f"iterate {k} is not inside its predecessor")
        step = 0.0 if nxt == S else hausdorff_distance(nxt, S)
        trace.append(k, step)
        S = nxt
        if step <= tol:
            trace.converged = True
            return AttractorReport(S, trace, k)
    raise ConvergenceError(f"Conley iteration did not settle within {k_max} steps", trace)


@dataclass
class ContinuationEntry:
    lam: float
    status: str
    attractor: Optional[BitGrid] = None
    hausdorff_to_base: Optional[float] = None
    contained: Optional[bool] = None
    set_components: Optional[int] = None
    holes: Optional[int] = None
    iterations: Optional[int] = None
    error: str = ""

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "status": self.status,
                "hausdorff_to_base": self.hausdorff_to_base,
                "contained_in_eps_neighbourhood": self.contained,
                "set_components": self.set_components,
                "bounded_complement_components": self.holes,
                "iterations": self.iterations, "error": self.error}


@dataclass
class ContinuationReport:
    eps: float
    entries: list = field(default_factory=list)
    base_verified: bool = False
    range_end: Optional[float] = None  # first lambda where the block is lost
    hausdorff_converges: Optional[bool] = None

    @property
    def all_contained(self) -> bool:
        return all(e.contained for e in self.entries if e.status == VERIFIED)

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "base_verified": self.base_verified,
            "block_lost_at": self.range_end,
            "convergence": "eps-neighbourhood containment; Hausdorff distance informational",
            "hausdorff_converges": self.hausdorff_converges,
            "entries": [e.to_dict() for e in self.entries],
        }


def continuation(family: Callable[[float], InvertibleIFS], Q: BitGrid, lambdas: Sequence[float],
                 tol: Optional[float] = None, eps: Optional[float] = None, margin: float = 2,
                 k_max: int = 200, base_lambda: float = 0.0,
                 contractive: bool = False) -> ContinuationReport:
    """Continue the Conley attractor of ``family(base_lambda)`` inside the fixed block ``Q``.

    For each ``lam`` the block is re-verified; where it holds, ``K_lam`` is
    computed and checked for ``K_lam <= dilate(K_0, eps)`` (``eps`` defaults
    to three pixels).  ``contractive=True`` also checks that the Hausdorff
    distance to ``K_0`` decreases (within a pixel) as ``lam`` approaches the
    base value.
    """
    lambdas = list(lambdas)
    if sorted(lambdas) != lambdas:
        raise ValueError("parameter values must be ascending")
    if eps is None:
        eps = 3.0 * Q.pixel
    report = ContinuationReport(eps)
    F0 = family(base_lambda)
    if not verify_attractor_block(F0, Q, margin):
        report.range_end = base_lambda
        report.entries.append(ContinuationEntry(base_lambda, BLOCK_LOST,
                                                error="block does not verify at the base parameter"))
        return report
    report.base_verified = True
    K0 = conley_attractor(F0, Q, tol, k_max, margin, check_block=False).attractor
    hood = dilate(K0, eps, clamp=True)
    for lam in lambdas:
        F = family(lam)
        if not verify_attractor_block(F, Q, margin):
            report.entries.append(ContinuationEntry(lam, BLOCK_LOST))
            if report.range_end is None:
                report.range_end = lam
            continue
        entry = ContinuationEntry(lam, VERIFIED)
        try:
            rep = conley_attractor(F, Q, tol, k_max, margin, check_block=False)
            K = rep.attractor
            comp = components(K)
            entry.attractor = K
            entry.iterations = rep.iterations
            entry.hausdorff_to_base = hausdorff_distance(K, K0)
            entry.contained = K.issubset(hood)
            entry.set_components = comp.set_components
            entry.holes = comp.bounded_complement_components
        except (ConvergenceError, EmptySetError, NestednessError) as exc:
            entry.error = f"{type(exc).__name__}: {exc}"
        report.entries.append(entry)
    if contractive:
        pts = sorted((abs(e.lam - base_lambda), e.hausdorff_to_base) for e in report.entries
                     if e.hausdorff_to_base is not None)
        report.hausdorff_converges = all(a <= b + Q.pixel for (_, a), (_, b) in zip(pts, pts[1:]))
    return report


def rotation(angle: float, scale: float = 1.0, center=(0.0, 0.0)):
    """``z -> center + scale e^{i angle} (z - center)`` as an affine map."""
    from .ifs import AffineMap2

    c, s = scale * math.cos(angle), scale * math.sin(angle)
    cx, cy = center
    return AffineMap2(c, -s, s, c, cx - c * cx + s * cy, cy - s * cx - c * cy, f"rot({angle:.4g})")

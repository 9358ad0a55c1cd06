"""Shape classification of plane continua from complement component counts.

Two plane continua have the same shape exactly when they cut the plane into
the same number of components, so a grid render is classified by counting
bounded complement components at several resolutions:

=========================  ==========================================
stabilised count 0         ``Trivial`` (shape of a point)
stabilised count 1         ``Circle``
stabilised count n >= 2    ``WedgeOfCircles`` with ``n`` circles
strict growth, top three   ``HawaiianLike`` (infinitely many holes)
=========================  ==========================================

A hole only counts when it holds a cell at distance at least
``min_hole_depth_px`` from the set.  The default of sqrt(2) pixels discards
single-pixel-wide pockets, which rasterisation produces where a curve nearly
touches itself, and keeps every hole that contains a cell with four empty
edge neighbours.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import ndimage

from .errors import DisconnectedError, EmptySetError, InconclusiveShapeError
from .grid import BitGrid, components, interior_nonempty

DEFAULT_HOLE_DEPTH_PX = math.sqrt(2.0)


class Verdict(str, enum.Enum):
    TRIVIAL = "Trivial"
    CIRCLE = "Circle"
    WEDGE = "WedgeOfCircles"
    HAWAIIAN = "HawaiianLike"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Evidence:
    resolution: float
    bounded_components: int
    raw_bounded_components: int
    set_components: int


@dataclass(frozen=True)
class ShapeClass:
    verdict: Verdict
    evidence: tuple
    stable: bool
    circles: Optional[int] = None  # wedge size for WedgeOfCircles

    @property
    def counts(self) -> tuple:
        return tuple(e.bounded_components for e in self.evidence)

    def __str__(self):
        if self.verdict is Verdict.WEDGE:
            return f"WedgeOfCircles({self.circles})"
        return self.verdict.value

    def to_dict(self) -> dict:
        return {
            "verdict": str(self),
            "stable": self.stable,
            "evidence": [
                {"resolution": e.resolution, "bounded_complement_components": e.bounded_components,
                 "raw_bounded_complement_components": e.raw_bounded_components}
                for e in self.evidence
            ],
        }


@dataclass(frozen=True)
class H1Rank:
    rank: Optional[int]
    infinite: bool
    basis: int

    def to_dict(self) -> dict:
        return {"rank": "infinite" if self.infinite else self.rank, "basis": self.basis}


def significant_holes(g: BitGrid, connectivity: int = 8,
                      min_hole_depth_px: float = DEFAULT_HOLE_DEPTH_PX):
    """Return ``(significant, raw, set_components)`` hole counts for one render."""
    rep = components(g, connectivity)
    raw = rep.bounded_complement_components
    if raw == 0:
        return 0, 0, rep.set_components
    depth = ndimage.distance_transform_edt(~g.bits)
    ids = -rep.labels[rep.labels <= -2] - 2
    deepest = np.zeros(raw)
    np.maximum.at(deepest, ids, depth[rep.labels <= -2])
    significant = int((deepest >= min_hole_depth_px - 1e-9).sum())
    return significant, raw, rep.set_components


def verdict_from_counts(counts: Sequence[int]):
    """Apply the stability rule to counts ordered by increasing resolution."""
    if len(counts) < 3:
        raise ValueError("at least three resolutions are needed")
    last = counts[-1]
    if counts[-1] == counts[-2]:
        if last == 0:
            return Verdict.TRIVIAL, True, None
        if last == 1:
            return Verdict.CIRCLE, True, None
        return Verdict.WEDGE, True, last
    if counts[-3] < counts[-2] < counts[-1]:
        return Verdict.HAWAIIAN, False, None
    return Verdict.INCONCLUSIVE, False, None


def classify_shape(render: Callable[[float], BitGrid], resolutions: Sequence[float],
                   connectivity: int = 8,
                   min_hole_depth_px: float = DEFAULT_HOLE_DEPTH_PX) -> ShapeClass:
    """Classify a continuum given a renderer ``resolution -> BitGrid``.

    Every render must be non-empty and connected, otherwise
    :class:`DisconnectedError` is raised.
    """
    resolutions = sorted(resolutions)
    if len(resolutions) < 3:
        raise ValueError("classify_shape needs at least three resolutions")
    evidence = []
    for res in resolutions:
        g = render(res)
        if g.is_empty():
            raise EmptySetError(f"render at resolution {res} is empty")
        sig, raw, nset = significant_holes(g, connectivity, min_hole_depth_px)
        if nset != 1:
            raise DisconnectedError(f"render at resolution {res} has {nset} components")
        evidence.append(Evidence(res, sig, raw, nset))
    verdict, stable, n = verdict_from_counts([e.bounded_components for e in evidence])
    return ShapeClass(verdict, tuple(evidence), stable, n)


def classify_grids(grids: Sequence[BitGrid], **kw) -> ShapeClass:
    """Classify pre-rendered grids (any order; sorted by resolution)."""
    by_res = {g.resolution: g for g in grids}
    return classify_shape(by_res.__getitem__, list(by_res), **kw)


def cech_h1_rank(c: ShapeClass) -> H1Rank:
    """First Cech homology rank of a plane continuum from its shape class."""
    last = c.evidence[-1].bounded_components
    if c.verdict is Verdict.HAWAIIAN:
        return H1Rank(None, True, last)
    if c.verdict is Verdict.INCONCLUSIVE:
        raise InconclusiveShapeError(f"counts {c.counts} neither stabilise nor grow strictly")
    return H1Rank(last, False, last)


# empty-interior dichotomy ----------------------------------------------------
CONSISTENT = "consistent"
HYPOTHESIS_UNMET = "hypothesis-unmet"
VIOLATION = "violation"
INCONCLUSIVE = "inconclusive"


@dataclass
class DichotomyReport:
    """Outcome of testing a contractive IFS attractor against the point/earring dichotomy."""

    status: str
    shape: Optional[ShapeClass]
    interior: dict = field(default_factory=dict)  # resolution -> interior nonempty
    connected: dict = field(default_factory=dict)
    reason: str = ""
    h1: Optional[H1Rank] = None
    renders: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "theorem_4_1_status": self.status,
            "reason": self.reason,
            "shape": self.shape.to_dict() if self.shape else None,
            "h1_rank": self.h1.to_dict() if self.h1 else None,
            "interior_nonempty": {str(k): v for k, v in self.interior.items()},
            "connected": {str(k): v for k, v in self.connected.items()},
        }


def check_theorem_41(F, resolutions: Sequence[float], bounds, seed_region=None,
                     tol: Optional[float] = None, interior_px: float = 4.0,
                     renders: Optional[dict] = None, **classify_kw) -> DichotomyReport:
    """Render the attractor of ``F`` per resolution and test the dichotomy.

    With empty interior at every resolution the verdict must be ``Trivial``
    or ``HawaiianLike``; ``Circle`` or a finite wedge then means a bug in the
    pipeline and is reported as ``violation``.  A disconnected attractor or
    one with interior leaves the hypothesis unmet.
    """
    from .ifs import render_attractor

    F.require_contractive()
    resolutions = sorted(resolutions)
    renders = dict(renders or {})
    for res in resolutions:
        if res not in renders:
            renders[res] = render_attractor(F, bounds, res, seed_region, tol=tol).attractor
    report = DichotomyReport(status=HYPOTHESIS_UNMET, shape=None, renders=renders)
    for res in resolutions:
        g = renders[res]
        report.interior[res] = interior_nonempty(g, interior_px / res)
        report.connected[res] = components(g).set_components == 1
    if not all(report.connected.values()):
        report.reason = "attractor is not connected at every resolution"
        return report
    report.shape = classify_shape(renders.__getitem__, resolutions, **classify_kw)
    if report.shape.verdict is not Verdict.INCONCLUSIVE:
        report.h1 = cech_h1_rank(report.shape)
    if any(report.interior.values()):
        report.reason = "attractor has nonempty interior at some resolution"
        return report
    v = report.shape.verdict
    if v in (Verdict.TRIVIAL, Verdict.HAWAIIAN):
        report.status = CONSISTENT
        report.reason = f"empty interior and verdict {report.shape}"
    elif v is Verdict.INCONCLUSIVE:
        report.status = INCONCLUSIVE
        report.reason = f"empty interior but counts {report.shape.counts} are inconclusive"
    else:
        report.status = VIOLATION
        report.reason = f"empty interior with verdict {report.shape}: pipeline bug"
    return report

"""Attractors of parametrised plane homeomorphisms via trapping regions.

The attractor inside a trapping region ``N`` is ``A = intersection of f^k(N)``.
It is computed as the nested sequence ``N_{j+1} = f^{m_j}(N_j) & N_j`` with the
step power ``m_j`` doubling, so the total power also doubles.  Each cell
carries the exact backward orbit of its centre, so a cell survives if
``f^{-n}(centre)`` still lies in ``N`` (no rasterisation error accumulates),
or if it is hit by the forward image of a surviving centre (this keeps
attractors smaller than a cell, such as an attracting fixed point).  Doubling
the power avoids the stall of one-step raster iteration when contraction
towards the attractor is weak (a slowly attracting invariant circle moves its
boundary by less than a pixel per step).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import (AttractorError, ConvergenceError, EmptySetError, GeometryError,
                     NestednessError, NotRepellingError, OutOfBoundsError)
from .grid import (BitGrid, closing, components, dilate, downsample, erode, fill_holes,
                   subset_of_interior)
from .hyperspace import ConvergenceTrace, hausdorff_distance
from .ifs import AttractorReport
from .raster import FunctionMap, map_image
from .shape import ShapeClass, Verdict, classify_grids


@dataclass(frozen=True)
class MapFamily:
    """``lam -> Phi_lam`` with vectorised ``forward(lam, x, y)`` and optional inverse."""

    forward: Callable
    inverse: Optional[Callable] = None
    lam_range: tuple = (-math.inf, math.inf)
    name: str = ""
    params: dict = field(default_factory=dict)

    def at(self, lam: float) -> FunctionMap:
        lo, hi = self.lam_range
        if not lo <= lam <= hi:
            raise ValueError(f"lambda={lam} outside the family range {self.lam_range}")
        inv = None
        if self.inverse is not None:
            inv = lambda x, y: self.inverse(lam, x, y)  # noqa: E731
        return FunctionMap(lambda x, y: self.forward(lam, x, y), inv, f"{self.name}@{lam}")

    def perturbed(self, amplitude: float, frequency: float = 5.0) -> "MapFamily":
        """Compose with the shear pair ``S_d``, which moves points by at most ``amplitude`` per axis.

        ``S_d(x, y) = (x1, y + d sin(k x1))`` with ``x1 = x + d sin(k y)``;
        ``S_d`` fixes the origin and has an explicit inverse.
        """
        d, k = float(amplitude), float(frequency)
        if d == 0.0:
            return self
        fwd, inv = self.forward, self.inverse

        def forward(lam, x, y):
            u, v = fwd(lam, x, y)
            u = u + d * np.sin(k * v)
            return u, v + d * np.sin(k * u)

        inverse = None
        if inv is not None:
            def inverse(lam, x, y):
                v = y - d * np.sin(k * x)
                u = x - d * np.sin(k * v)
                return inv(lam, u, v)

        params = dict(self.params, perturbation=d, frequency=k)
        return MapFamily(forward, inverse, self.lam_range, f"{self.name}+shear({d})", params)

    def check_injective(self, lam: float, bounds, samples: int = 2000, seed: int = 0,
                        pixel: float = 1e-2) -> bool:
        """Spot check on random points of ``bounds``.

        With an inverse, every sample must come back to within ``pixel``.
        Without one, no two samples more than ten pixels apart may have
        images closer than ``pixel``.
        """
        rng = np.random.default_rng(seed)
        x0, y0, x1, y1 = bounds
        x = rng.uniform(x0, x1, samples)
        y = rng.uniform(y0, y1, samples)
        fx, fy = self.forward(lam, x, y)
        if self.inverse is not None:
            bx, by = self.inverse(lam, fx, fy)
            with np.errstate(invalid="ignore"):
                return bool(np.all(np.hypot(bx - x, by - y) <= pixel))
        pairs = cKDTree(np.column_stack([fx, fy])).query_pairs(pixel, output_type="ndarray")
        if pairs.size == 0:
            return True
        i, j = pairs[:, 0], pairs[:, 1]
        return bool(np.all(np.hypot(x[i] - x[j], y[i] - y[j]) <= 10 * pixel))


def radial_inverse(lam: float, R):
    """Smallest non-negative root of ``(1 + lam) r - r^3 = R`` (NaN if none on the monotone branch)."""
    R = np.asarray(R, dtype=float)
    p = 1.0 + lam
    s = math.sqrt(p / 3.0)
    peak = 2.0 * p * s / 3.0  # value at the turning point r = s
    with np.errstate(invalid="ignore"):
        arg = np.clip(-(R / peak), -1.0, 1.0)
        phi = np.arccos(arg) / 3.0
        r = 2.0 * s * np.cos(phi - 2.0 * math.pi / 3.0)
        # one Newton polish step on g(r) - R
        g = p * r - r ** 3 - R
        dg = p - 3.0 * r ** 2
        r = np.where(np.abs(dg) > 1e-12, r - g / np.where(dg == 0, 1.0, dg), r)
    r = np.where((R < 0) | (R > peak * (1 + 1e-12)), np.nan, np.maximum(r, 0.0))
    return r


def neimark_sacker_family(omega: float = 0.9, b: float = 0.3, r_max: float = 0.5,
                          lam_range: tuple = (-0.2, 0.3)) -> MapFamily:
    """Truncated normal form ``(r, t) -> ((1 + lam) r - r^3, t + omega + b r^2)``.

    The origin is fixed for every ``lam``, attracting for ``lam <= 0`` and
    repelling for ``lam > 0``, where the circle ``r = sqrt(lam)`` attracts.
    Radial monotonicity ``1 + lam - 3 r^2 > 0`` must hold for ``r <= r_max``
    over the whole ``lam_range`` so each member is a homeomorphism of the
    working disk.
    """
    lo, hi = lam_range
    if not 1.0 + lo - 3.0 * r_max ** 2 > 0:
        raise GeometryError(
            f"radial map is not monotone on r <= {r_max} for lambda >= {lo}: "
            f"1 + lambda - 3 r^2 = {1 + lo - 3 * r_max ** 2:.4f}")

    def forward(lam, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r2 = x * x + y * y
        r = np.sqrt(r2)
        rn = np.maximum(r * (1.0 + lam - r2), 0.0)
        t = np.arctan2(y, x) + omega + b * r2
        return rn * np.cos(t), rn * np.sin(t)

    def inverse(lam, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = radial_inverse(lam, np.hypot(x, y))
        t = np.arctan2(y, x) - omega - b * r * r
        return r * np.cos(t), r * np.sin(t)

    return MapFamily(forward, inverse, (lo, hi), "neimark-sacker",
                     {"omega": omega, "b": b, "r_max": r_max})


def scaling_family(factor: float) -> MapFamily:
    """``z -> factor z`` regardless of ``lam`` (reference family for tests and demos)."""
    return MapFamily(lambda lam, x, y: (factor * np.asarray(x, float), factor * np.asarray(y, float)),
                     lambda lam, x, y: (np.asarray(x, float) / factor, np.asarray(y, float) / factor),
                     name=f"scale({factor})")


BUILTIN_FAMILIES = {"neimark-sacker": neimark_sacker_family}


# trapping regions -------------------------------------------------------------
def map_image_any(N: BitGrid, f) -> BitGrid:
    """Image of ``N``: backward rasterised if ``f`` inverts, else forward scatter closed by one pixel."""
    if f.invertible:
        return map_image(N, f)
    return closing(map_image(N, f, backward=False), N.pixel)


def verify_trapping_region(f, N: BitGrid, margin: float = 2) -> bool:
    """``f(N)`` inside the interior of ``N`` with a ``margin``-pixel guard band."""
    if N.is_empty():
        raise EmptySetError("trapping region is empty")
    return subset_of_interior(map_image_any(N, f), N, margin)


def _iterate(f, pts, m):
    x, y = pts
    for _ in range(m):
        x, y = f(x, y)
    return x, y


def attractor_from_trapping(f, N: BitGrid, tol: Optional[float] = None, k_max: int = 24,
                            margin: float = 2, max_power: int = 1024,
                            check_trapping: bool = True) -> AttractorReport:
    """Attractor ``intersection f^n(N)`` by the nested doubling iteration.

    Converged once two consecutive steps move the set by at most ``tol``
    (default two pixels) in the Hausdorff metric.  Raises
    :class:`NestednessError` if an iterate is not inside its predecessor and
    :class:`ConvergenceError` after ``k_max`` steps.
    """
    if not f.invertible:
        raise ValueError("attractor_from_trapping needs an invertible map")
    if check_trapping and not verify_trapping_region(f, N, margin):
        raise ValueError("N is not a trapping region for f")
    if tol is None:
        tol = 2.0 * N.pixel
    rows, cols = np.nonzero(N.bits)
    cx, cy = N.centers(rows, cols)
    px, py = cx.copy(), cy.copy()  # f^{-n}(centre) for each live cell
    prev = N
    trace = ConvergenceTrace()
    notes = []
    n, m, quiet = 0, 1, 0
    for k in range(1, k_max + 1):
        px, py = _iterate(f.inverse, (px, py), m)
        back = N.contains_points(px, py)
        fx, fy = _iterate(f.forward, (cx, cy), m)
        frows, fcols, inside = N.locate(fx, fy)
        hit = np.zeros(N.shape, dtype=bool)
        hit[frows[inside], fcols[inside]] = True
        stray = int((hit & ~prev.bits).sum())
        if stray:
            notes.append(f"step {k}: {stray} forward-image cells outside the previous iterate")
        keep = back | hit[rows, cols]
        rows, cols, cx, cy, px, py = (a[keep] for a in (rows, cols, cx, cy, px, py))
        bits = np.zeros(N.shape, dtype=bool)
        bits[rows, cols] = True
        cur = N.with_bits(bits)
        if cur.is_empty():
            raise EmptySetError(f"iterate {k} is empty")
        if not cur.issubset(prev):
            raise NestednessError(f"iterate {k} is not inside its predecessor")
        n += m
        step = hausdorff_distance(cur, prev)
        trace.append(n, step)
        prev = cur
        quiet = quiet + 1 if step <= tol else 0
        if quiet >= 2:
            trace.converged = True
            return AttractorReport(cur, trace, n, notes=notes)
        m = min(n, max_power)
    raise ConvergenceError(f"trapping iteration did not settle within {k_max} steps", trace)


def is_repelling(f, center=(0.0, 0.0), radius: float = 1e-3, samples: int = 720,
                 max_power: int = 64) -> bool:
    """Fixed ``center`` such that some ``f^n``, ``n <= max_power``, maps the circle of
    ``radius`` strictly outside itself (so the disk lies inside its own image)."""
    cx, cy = center
    fx, fy = f.forward(np.array([cx]), np.array([cy]))
    if math.hypot(fx[0] - cx, fy[0] - cy) > 1e-9:
        return False
    t = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
    bx, by = cx + radius * np.cos(t), cy + radius * np.sin(t)
    for _ in range(max_power):
        bx, by = f.forward(bx, by)
        if np.all(np.hypot(bx - cx, by - cy) > radius * (1 + 1e-12)):
            return True
    return False


def repulsion_basin(f, within: BitGrid, seed_radius: Optional[float] = None, k_max: int = 8192,
                    center=(0.0, 0.0)) -> BitGrid:
    """Cells of ``within`` lying in ``f^k(D)`` for some ``k <= k_max``, ``D`` a small disk at ``center``.

    A cell belongs iff the backward orbit of its centre enters ``D`` (radius
    default four pixels).  Candidates whose backward orbit leaves ``within``
    are dropped; the union is declared stable once a window as long as the
    orbit length so far adds no cell.
    """
    if not f.invertible:
        raise ValueError("repulsion basin needs an invertible map")
    if seed_radius is None:
        seed_radius = 4.0 * within.pixel
    if not is_repelling(f, center, seed_radius):
        raise NotRepellingError(f"{center} is not a repelling fixed point of {f.name or 'f'}")
    cx0, cy0 = center
    r2 = seed_radius ** 2
    rows, cols = np.nonzero(within.bits)
    x, y = within.centers(rows, cols)
    joined = np.zeros(within.shape, dtype=bool)
    inside = (x - cx0) ** 2 + (y - cy0) ** 2 <= r2
    joined[rows[inside], cols[inside]] = True
    rows, cols, x, y = (a[~inside] for a in (rows, cols, x, y))
    last_join = 0
    for j in range(1, k_max + 1):
        if rows.size == 0:
            break
        x, y = f.inverse(x, y)
        hit = (x - cx0) ** 2 + (y - cy0) ** 2 <= r2
        if hit.any():
            joined[rows[hit], cols[hit]] = True
            last_join = j
        alive = ~hit & within.contains_points(x, y)
        rows, cols, x, y = (a[alive] for a in (rows, cols, x, y))
        if j - last_join > max(64, last_join):
            break
    return within.with_bits(joined)


# Hopf scenario -----------------------------------------------------------------
PRE_BIFURCATION = "pre-bifurcation"
OK = "ok"
FAILED = "failed"


@dataclass
class HopfEntry:
    lam: float
    status: str
    A: Optional[BitGrid] = None
    R: Optional[BitGrid] = None
    K: Optional[BitGrid] = None
    shape: Optional[ShapeClass] = None
    surrounds_origin: Optional[bool] = None
    outer_radius: Optional[float] = None
    iterations: Optional[int] = None
    error: str = ""

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "status": self.status,
            "shape": self.shape.to_dict() if self.shape else None,
            "surrounds_origin": self.surrounds_origin,
            "outer_radius": self.outer_radius,
            "iterations": self.iterations,
            "error": self.error,
        }


@dataclass
class HopfReport:
    entries: list
    radii_monotone: Optional[bool] = None
    shrinks_to_origin: Optional[bool] = None
    robustness: Optional["RobustnessReport"] = None

    def entry(self, lam: float) -> HopfEntry:
        return next(e for e in self.entries if e.lam == lam)

    def to_dict(self) -> dict:
        out = {"entries": [e.to_dict() for e in self.entries],
               "radii_monotone": self.radii_monotone,
               "shrinks_to_origin": self.shrinks_to_origin}
        if self.robustness is not None:
            out["robustness"] = self.robustness.to_dict()
        return out


def _origin_cell(g: BitGrid, center=(0.0, 0.0)):
    # nudge off cell corners so the lookup is deterministic
    rows, cols, inside = g.locate(np.array([center[0] + 1e-12]), np.array([center[1] + 1e-12]))
    return (int(rows[0]), int(cols[0])) if inside[0] else None


def annular_attractor(A: BitGrid, R: BitGrid, rim_px: float = 2.0, close_px: float = 1.0) -> BitGrid:
    """``A`` minus the open basin ``R``, then closed by one dilate-erode round.

    ``R`` is open, so only its cells at least ``rim_px`` pixels inside are
    removed; this keeps a closed band of cells along the basin frontier.
    """
    core = erode(R, rim_px * R.pixel)
    K = A - core
    if close_px > 0:
        K = closing(K, close_px * A.pixel) & A
    return K


def _hopf_stage(f, D: BitGrid, tol, seed_radius_px, k_max):
    rep = attractor_from_trapping(f, D, tol, k_max=k_max)
    A = rep.attractor
    R = repulsion_basin(f, A, seed_radius_px * D.pixel)
    return rep, A, R, annular_attractor(A, R)


def _hopf_entry(family_map, lam, D: BitGrid, tol, seed_radius_px, k_max, factors):
    f = family_map
    if lam <= 0:
        entry = HopfEntry(lam, PRE_BIFURCATION)
        try:
            rep = attractor_from_trapping(f, D, tol, k_max=k_max)
            entry.A = entry.K = rep.attractor
            entry.iterations = rep.iterations
            entry.outer_radius = _outer_radius(rep.attractor)
        except AttractorError as exc:
            entry.error = f"{type(exc).__name__}: {exc}"
        return entry
    entry = HopfEntry(lam, FAILED)
    try:
        if not verify_trapping_region(f, D):
            raise ValueError("D is not a trapping region at this parameter")
        rep, A, R, K = _hopf_stage(f, D, tol, seed_radius_px, k_max)
        entry.A, entry.R, entry.K, entry.iterations = A, R, K, rep.iterations
        grids = [K]
        for fac in factors:
            if fac == 1:
                continue
            Dc = downsample(D, fac)
            grids.append(_hopf_stage(f, Dc, None, seed_radius_px, k_max)[3])
        entry.shape = classify_grids(grids)
        labels = components(K).labels
        cell = _origin_cell(K)
        entry.surrounds_origin = bool(cell is not None and labels[cell] <= -2)
        entry.outer_radius = _outer_radius(K)
        entry.status = OK
    except (AttractorError, ValueError) as exc:
        entry.error = f"{type(exc).__name__}: {exc}"
    return entry


def _outer_radius(g: BitGrid, center=(0.0, 0.0)) -> float:
    x, y = g.occupied_centers()
    return float(np.hypot(x - center[0], y - center[1]).max())


def hopf_scan(family: MapFamily, lambdas: Sequence[float], D: BitGrid, tol: Optional[float] = None,
              seed_radius_px: float = 4.0, k_max: int = 24,
              classify_factors: Sequence[int] = (4, 2, 1)) -> HopfReport:
    """Per-parameter cellular attractor, repulsion basin and annular attractor.

    For every ``lam > 0`` the annular attractor ``K`` is classified from
    renders at ``D``'s resolution divided by each of ``classify_factors``.
    Failures are recorded per entry; the scan never aborts.
    """
    lambdas = list(lambdas)
    if not lambdas:
        raise ValueError("hopf_scan needs at least one parameter value")
    if sorted(lambdas) != lambdas:
        raise ValueError("parameter values must be ascending")
    xs, ys = np.array([0.0]), np.array([0.0])
    for lam in lambdas:
        fx, fy = family.forward(lam, xs, ys)
        if math.hypot(fx[0], fy[0]) > 0.01 * D.pixel:
            raise ValueError(f"family does not fix the origin at lambda={lam}")
    entries = [_hopf_entry(family.at(lam), lam, D, tol, seed_radius_px, k_max, classify_factors)
               for lam in lambdas]
    report = HopfReport(entries)
    good = [e for e in entries if e.status == OK]
    if len(good) >= 2:
        radii = [e.outer_radius for e in good]
        report.radii_monotone = all(a < b for a, b in zip(radii, radii[1:]))
        report.shrinks_to_origin = report.radii_monotone and radii[0] <= radii[-1]
    return report


def fits_inside(inner: BitGrid, outer: BitGrid, slack_px: float = 1.0) -> bool:
    """``inner`` inside the filled ``outer`` dilated by ``slack_px`` pixels."""
    return inner.issubset(dilate(fill_holes(outer), slack_px * outer.pixel, clamp=True))


# robustness ---------------------------------------------------------------------
IN_RANGE = "ok"
OUT_OF_RANGE = "out-of-range"


@dataclass
class RobustnessEntry:
    amplitude: float
    status: str
    traps: bool
    shape: Optional[ShapeClass] = None
    same_shape: Optional[bool] = None
    hausdorff_to_base: Optional[float] = None
    K: Optional[BitGrid] = None
    error: str = ""

    def to_dict(self) -> dict:
        return {"amplitude": self.amplitude, "status": self.status, "traps": self.traps,
                "shape": self.shape.to_dict() if self.shape else None,
                "same_shape": self.same_shape, "hausdorff_to_base": self.hausdorff_to_base,
                "error": self.error}


@dataclass
class RobustnessReport:
    lam: float
    base: HopfEntry
    entries: list
    monotone: Optional[bool] = None

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "base": self.base.to_dict(),
                "entries": [e.to_dict() for e in self.entries], "monotone": self.monotone}


def robustness_check(family: MapFamily, lam: float, amplitudes: Sequence[float], N: BitGrid,
                     tol: Optional[float] = None, frequency: float = 5.0, k_max: int = 24,
                     seed_radius_px: float = 4.0,
                     classify_factors: Sequence[int] = (4, 2, 1)) -> RobustnessReport:
    """Compare the annular attractor at ``lam`` with those of shear-perturbed maps.

    Each amplitude first re-checks that ``N`` still traps; if it does not,
    the entry is marked out of range.  ``monotone`` records whether the
    Hausdorff distance to the base attractor does not increase (within one
    pixel) as the amplitude decreases.
    """
    base = _hopf_entry(family.at(lam), lam, N, tol, seed_radius_px, k_max, classify_factors)
    if base.status != OK:
        raise ValueError(f"base attractor failed: {base.error}")
    entries = []
    for amp in amplitudes:
        f = family.perturbed(amp, frequency).at(lam)
        try:
            traps = verify_trapping_region(f, N)
        except OutOfBoundsError:
            traps = False
        if not traps:
            entries.append(RobustnessEntry(amp, OUT_OF_RANGE, False))
            continue
        e = _hopf_entry(f, lam, N, tol, seed_radius_px, k_max, classify_factors)
        entry = RobustnessEntry(amp, e.status if e.status != OK else IN_RANGE, True,
                                e.shape, K=e.K, error=e.error)
        if e.status == OK:
            entry.same_shape = e.shape.verdict == base.shape.verdict
            entry.hausdorff_to_base = hausdorff_distance(e.K, base.K)
        entries.append(entry)
    report = RobustnessReport(lam, base, entries)
    measured = sorted((e.amplitude, e.hausdorff_to_base) for e in entries
                      if e.hausdorff_to_base is not None)
    if len(measured) >= 2:
        report.monotone = all(d_small <= d_big + N.pixel
                              for (_, d_small), (_, d_big) in zip(measured, measured[1:]))
    return report

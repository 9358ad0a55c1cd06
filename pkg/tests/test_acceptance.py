"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import hashlib
import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from plane_attractors.cli import main
from plane_attractors.conley import InvertibleIFS, VERIFIED, conley_attractor, continuation
from plane_attractors.grid import BitGrid, Disk, Rect, dilate, interior_nonempty, new_grid
from plane_attractors.homeo import OK, fits_inside, hopf_scan, neimark_sacker_family, robustness_check
from plane_attractors.hyperspace import directed_distance, hausdorff_distance
from plane_attractors.ifs import (KOCH_HULL, UNIT_TRIANGLE, AffineMap2, attractor_chaos_game,
                                  box_counting_dimension, example_41_ifs, hutchinson, koch_ifs,
                                  render_attractor, sierpinski_ifs, subdivision_render)
from plane_attractors.shape import (CONSISTENT, Verdict, check_theorem_41, classify_grids,
                                    significant_holes)

FRAME41 = (-0.05, -0.05, 1.05, 0.95)
KOCH_FRAME = (-0.05, -0.1, 1.05, 0.4)
pytestmark = pytest.mark.slow

HOPF_FRAME = (-0.55, -0.55, 0.55, 0.55)
HOPF_RES = 800
HOPF_LAMBDAS = [0.01, 0.04, 0.09, 0.16]


@contextmanager
def criterion(capsys, number, title):
    """Print one PASS/FAIL line for the criterion; details collect in the yielded list."""
    details = []
    ok = False
    try:
        yield details
        ok = True
    finally:
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}: {title}"
                  + (f" [{'; '.join(details)}]" if details else ""))


# 1 ------------------------------------------------------------------------------
def test_criterion_01_example41_circle(capsys):
    with criterion(capsys, 1, "six-map system converges and has the shape of a circle") as out:
        t0 = time.perf_counter()
        rep = render_attractor(example_41_ifs(), FRAME41, 1024, UNIT_TRIANGLE)
        grids = [rep.attractor] + [render_attractor(example_41_ifs(), FRAME41, res,
                                                    UNIT_TRIANGLE).attractor for res in (256, 512)]
        shape = classify_grids(grids)
        elapsed = time.perf_counter() - t0
        raw = [e.raw_bounded_components for e in shape.evidence]
        out += [f"iterations {rep.iterations}", f"final step {rep.trace.final_distance * 1024:.2f} px",
                f"holes {shape.counts} raw {tuple(raw)}", f"{elapsed:.1f} s"]
        assert rep.trace.converged and rep.iterations <= 60
        assert rep.trace.final_distance <= 2 / 1024
        assert shape.counts == (1, 1, 1) and raw == [1, 1, 1]
        assert shape.verdict is Verdict.CIRCLE
        assert elapsed <= 60


# 2 ------------------------------------------------------------------------------
def test_criterion_02_sierpinski_dichotomy(capsys):
    with criterion(capsys, 2, "gasket: empty interior, Hawaiian-like, holes 1, 4, 13, 40") as out:
        F = sierpinski_ifs()
        expected = [1]
        while len(expected) < 4:
            expected.append(3 * expected[-1] + 1)
        resolutions = (128, 256, 512, 1024)
        sub = {res: subdivision_render(F, new_grid(FRAME41, res, UNIT_TRIANGLE), depth)
               for depth, res in enumerate(resolutions, 1)}
        sub_shape = classify_grids(list(sub.values()))
        rep = check_theorem_41(F, list(resolutions), FRAME41, UNIT_TRIANGLE)
        out += [f"subdivision holes {sub_shape.counts}", f"attractor holes {rep.shape.counts}",
                f"interior {list(rep.interior.values())}", f"status {rep.status}"]
        assert list(sub_shape.counts) == expected == [1, 4, 13, 40]
        assert sub_shape.verdict is Verdict.HAWAIIAN
        assert not any(rep.interior.values())
        assert rep.shape.verdict is Verdict.HAWAIIAN and rep.status == CONSISTENT


# 3 ------------------------------------------------------------------------------
def test_criterion_03_koch_dichotomy(capsys):
    with criterion(capsys, 3, "Koch curve: empty interior, Trivial") as out:
        rep = check_theorem_41(koch_ifs(), [256, 512, 1024], KOCH_FRAME, KOCH_HULL)
        raw = [e.raw_bounded_components for e in rep.shape.evidence]
        out += [f"holes {rep.shape.counts} (one-pixel pockets ignored: {raw})",
                f"interior {list(rep.interior.values())}", f"status {rep.status}"]
        assert not any(rep.interior.values())
        assert rep.shape.counts == (0, 0, 0) and rep.shape.verdict is Verdict.TRIVIAL
        assert rep.status == CONSISTENT


# 4 ------------------------------------------------------------------------------
def test_criterion_04_dimensions(capsys):
    with criterion(capsys, 4, "box dimensions of gasket, Koch curve and square") as out:
        gasket = render_attractor(sierpinski_ifs(), (-0.25, -0.25, 1.25, 1.25), 1024,
                                  UNIT_TRIANGLE).attractor
        d_gasket = box_counting_dimension(gasket, [2, 4, 8, 16, 32, 64, 128, 256])
        koch = render_attractor(koch_ifs(), (-1 / 9, -1 / 9, 1 + 1 / 9, 4 / 9), 2187,
                                KOCH_HULL).attractor
        d_koch = box_counting_dimension(koch, [3, 9, 27])
        square = new_grid((0, 0, 1, 1), 1024, Rect(0, 0, 1, 1))
        d_square = box_counting_dimension(square, [2, 4, 8, 16, 32, 64, 128, 256])
        out += [f"gasket {d_gasket.value:.4f}", f"koch {d_koch.value:.4f}",
                f"square {d_square.value:.4f}"]
        assert abs(d_gasket.value - math.log(3) / math.log(2)) <= 0.05
        assert abs(d_koch.value - math.log(4) / math.log(3)) <= 0.05
        assert abs(d_square.value - 2.0) <= 0.05
        for g, d in ((gasket, d_gasket), (koch, d_koch)):
            assert d.value < 2
            assert not interior_nonempty(g, 4 * g.pixel)


# 5 ------------------------------------------------------------------------------
@pytest.fixture(scope="module")
def hopf_disk():
    return new_grid(HOPF_FRAME, HOPF_RES, Disk(0, 0, 0.5))


def test_criterion_05_hopf_scan(capsys, hopf_disk):
    with criterion(capsys, 5, "annular attractors of circle shape shrinking to the origin") as out:
        rep = hopf_scan(neimark_sacker_family(), HOPF_LAMBDAS, hopf_disk)
        for e in rep.entries:
            out.append(f"lambda {e.lam}: {e.shape} r={e.outer_radius:.4f}"
                       if e.status == OK else f"lambda {e.lam}: {e.status} {e.error}")
        for e in rep.entries:
            assert e.status == OK
            assert e.shape.verdict is Verdict.CIRCLE and e.surrounds_origin
            assert abs(e.outer_radius - math.sqrt(e.lam)) <= 0.1 * math.sqrt(e.lam)
        radii = [e.outer_radius for e in rep.entries]
        assert all(a < b for a, b in zip(radii, radii[1:]))
        assert fits_inside(rep.entry(0.01).K, rep.entry(0.04).K, 1.0)


# 6 ------------------------------------------------------------------------------
def test_criterion_06_robustness(capsys, hopf_disk):
    with criterion(capsys, 6, "perturbations keep the circle shape and converge") as out:
        amps = [0.02, 0.01, 0.005, 0.0025]
        rep = robustness_check(neimark_sacker_family(), 0.09, amps, hopf_disk)
        for e in rep.entries:
            out.append(f"amp {e.amplitude}: {e.shape} dH={e.hausdorff_to_base}")
        assert all(e.traps and e.shape.verdict is Verdict.CIRCLE for e in rep.entries)
        d = [e.hausdorff_to_base for e in sorted(rep.entries, key=lambda e: -e.amplitude)]
        assert all(b <= a + hopf_disk.pixel for a, b in zip(d, d[1:]))
        assert rep.monotone


# 7 ------------------------------------------------------------------------------
def _random_grid(rng, shape=(48, 48), res=40.0):
    bits = rng.random(shape) < rng.uniform(0.002, 0.05)
    if not bits.any():
        bits[rng.integers(shape[0]), rng.integers(shape[1])] = True
    return BitGrid((0.0, 0.0, shape[1] / res, shape[0] / res), res, bits)


def test_criterion_07_metric_suite(capsys):
    with criterion(capsys, 7, "Hausdorff metric: symmetry, triangle inequality, dilation bound") as out:
        rng = np.random.default_rng(7)
        n = 250
        worst_tri = worst_dil = 0.0
        for _ in range(n):
            a, b, c = (_random_grid(rng) for _ in range(3))
            diag = math.sqrt(2) * a.pixel
            ab, bc, ac = hausdorff_distance(a, b), hausdorff_distance(b, c), hausdorff_distance(a, c)
            assert ab == hausdorff_distance(b, a)
            assert ab == max(directed_distance(a, b), directed_distance(b, a))
            assert ac <= ab + bc + diag
            worst_tri = max(worst_tri, ac - ab - bc)
            eps = rng.uniform(0, 0.3)
            dil = hausdorff_distance(dilate(a, eps, clamp=True), a)
            assert dil <= eps + diag
            worst_dil = max(worst_dil, dil - eps)
        out += [f"{n} triples", f"max triangle excess {worst_tri:.4f}",
                f"max dilation excess {worst_dil:.4f}"]


# 8 ------------------------------------------------------------------------------
def test_criterion_08_contraction(capsys):
    with criterion(capsys, 8, "Hutchinson operator contracts the Hausdorff metric") as out:
        rng = np.random.default_rng(8)
        res = 128
        systems = [(example_41_ifs(), FRAME41, Rect(0, 0, 1, 0.9)),
                   (sierpinski_ifs(), FRAME41, Rect(0, 0, 1, 0.9)),
                   (koch_ifs(), KOCH_FRAME, Rect(0, 0, 1, 0.3))]
        for F, frame, box in systems:
            region = new_grid(frame, res, box)
            worst = -np.inf
            for _ in range(100):
                a, b = (region.with_bits(region.bits & (rng.random(region.shape) < rng.uniform(0.001, 0.05)))
                        for _ in range(2))
                if a.is_empty() or b.is_empty():
                    continue
                lhs = hausdorff_distance(hutchinson(F, a), hutchinson(F, b))
                rhs = F.factor * hausdorff_distance(a, b) + 2 * a.pixel
                assert lhs <= rhs
                worst = max(worst, (lhs - rhs) * res)
            out.append(f"{F.name}: max slack {worst:.2f} px")


# 9 ------------------------------------------------------------------------------
def test_criterion_09_chaos_game(capsys):
    with criterion(capsys, 9, "chaos game agrees with the deterministic attractor") as out:
        res = 512
        for F in (sierpinski_ifs(), example_41_ifs()):
            det = render_attractor(F, FRAME41, res, UNIT_TRIANGLE).attractor
            cg = attractor_chaos_game(F, 2_000_000, 100, 2024, det.empty_like())
            d = hausdorff_distance(cg, det)
            out.append(f"{F.name}: {d * res:.2f} px")
            assert d <= 3 / res


# 10 -----------------------------------------------------------------------------
def test_criterion_10_conley(capsys):
    with criterion(capsys, 10, "Conley attractor equals IFS attractor; continuation tracks drift") as out:
        res = 512
        tol = 2 / res
        F = example_41_ifs()
        A = render_attractor(F, FRAME41, res, UNIT_TRIANGLE, tol=tol).attractor
        K = conley_attractor(InvertibleIFS.from_ifs(F), dilate(A, 8 / res), tol=tol).attractor
        d = hausdorff_distance(K, A)
        out.append(f"example41 Conley vs deterministic {d * res:.2f} px")
        assert d <= 2 * tol

        res = 200
        v = (0.03, 0.04)
        speed = math.hypot(*v)
        Q = new_grid((-0.6, -0.6, 0.6, 0.6), res, Disk(0, 0, 0.5))
        family = lambda lam: InvertibleIFS((AffineMap2(0.5, 0, 0, 0.5, lam * v[0], lam * v[1]),))
        lambdas = [round(0.01 * k, 2) for k in range(11)]
        rep = continuation(family, Q, lambdas, eps=3 / res, contractive=True)
        worst = max(abs(e.hausdorff_to_base - 2 * e.lam * speed) for e in rep.entries)
        out.append(f"drift: max |dH - 2 lambda |v|| = {worst * res:.2f} px")
        for e in rep.entries:
            assert e.status == VERIFIED and e.contained
            assert abs(e.hausdorff_to_base - 2 * e.lam * speed) <= 1 / res


# 11 -----------------------------------------------------------------------------
def _hashes(directory):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(directory.iterdir())}


def test_criterion_11_determinism(capsys, tmp_path):
    with criterion(capsys, 11, "repeated runs give bit-identical artifacts") as out:
        cont = tmp_path / "drift.json"
        cont.write_text(json.dumps({
            "maps": [{"a": 0.5, "b": 0, "c": 0, "d": 0.5,
                      "e": {"base": 0, "per_lambda": 0.03}, "f": {"base": 0, "per_lambda": 0.04}}],
            "bounds": [-0.6, -0.6, 0.6, 0.6], "resolution": 200,
            "block": {"type": "disk", "radius": 0.5}, "lambdas": [0, 0.05, 0.1]}))
        commands = {
            "render": ["render-ifs", "--builtin", "example41", "--res", "512",
                       "--chaos-points", "200000", "--seed", "5"],
            "classify": ["classify", "--builtin", "example41-last3", "--res", "512"],
            "hopf": ["hopf-scan", "--lambdas", "0.04,0.09", "--res", "200", "--perturb", "0.005"],
            "conley": ["conley-continue", "--config", str(cont)],
        }
        files = 0
        for name, argv in commands.items():
            runs = []
            for k in range(2):
                target = tmp_path / f"{name}-{k}"
                status = main(argv + ["--out", str(target)])
                assert status in (0, 1)
                runs.append(_hashes(target))
            assert runs[0] == runs[1], name
            files += len(runs[0])
        out.append(f"{len(commands)} commands, {files} artifacts compared by sha256")

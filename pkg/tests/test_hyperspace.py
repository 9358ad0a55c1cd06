import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plane_attractors.errors import EmptySetError, GeometryError
from plane_attractors.grid import Disk, Rect, dilate, new_grid
from plane_attractors.hyperspace import ConvergenceTrace, directed_distance, hausdorff_distance

from conftest import random_grid, single

SQUARE2 = (-1.0, -1.0, 1.0, 1.0)
LATTICE = (-0.005, -0.005, 0.505, 0.505)  # centres at multiples of 0.01


def brute_hausdorff(a, b):
    pa = np.column_stack(a.occupied_centers())
    pb = np.column_stack(b.occupied_centers())
    d = np.sqrt(((pa[:, None, :] - pb[None, :, :]) ** 2).sum(-1))
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def test_identical_sets():
    g = new_grid(SQUARE2, 50, Disk(0, 0, 0.5))
    assert hausdorff_distance(g, g) == 0.0


def test_singletons_345():
    a = single(LATTICE, 100, 0.0, 0.0)
    b = single(LATTICE, 100, 0.3, 0.4)
    assert hausdorff_distance(a, b) == pytest.approx(0.5, abs=0.01)


def test_disk_and_its_dilation():
    res = 50
    a = new_grid(SQUARE2, res, Disk(0, 0, 0.5))
    b = dilate(a, 0.1)
    d = hausdorff_distance(a, b)
    assert abs(d - 0.1) <= 1.5 / res
    assert d == pytest.approx(brute_hausdorff(a, b), abs=1e-12)


def test_directed_containment():
    a = new_grid(SQUARE2, 100, Disk(0, 0, 0.3))
    b = new_grid(SQUARE2, 100, Disk(0, 0, 0.5))
    assert directed_distance(a, b) == 0.0
    assert directed_distance(b, a) == pytest.approx(0.2, abs=1.5 / 100)


def test_segment_to_midpoint():
    seg = new_grid((-0.005, -0.105, 1.005, 0.105), 100, Rect(0.0, -0.001, 1.0, 0.001))
    mid = single((-0.005, -0.105, 1.005, 0.105), 100, 0.5, 0.0)
    assert directed_distance(seg, mid) == pytest.approx(0.5, abs=0.01)
    assert directed_distance(mid, seg) == 0.0


def test_empty_input_is_an_error():
    with pytest.raises(EmptySetError):
        hausdorff_distance(new_grid(SQUARE2, 10), new_grid(SQUARE2, 10, Disk(0, 0, 0.5)))


def test_geometry_mismatch():
    with pytest.raises(GeometryError):
        hausdorff_distance(new_grid(SQUARE2, 10, Disk(0, 0, 0.5)), new_grid(SQUARE2, 20, Disk(0, 0, 0.5)))


def test_trace():
    t = ConvergenceTrace()
    with pytest.raises(ValueError):
        t.final_distance
    t.append(1, 0.5)
    t.append(2, 0.25)
    assert t.final_distance == 0.25
    assert t.to_dict()["entries"] == [[1, 0.5], [2, 0.25]]


seeds = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=40, deadline=None)
@given(seeds, seeds)
def test_matches_brute_force(s1, s2):
    a = random_grid(np.random.default_rng(s1), (20, 20), 0.05)
    b = random_grid(np.random.default_rng(s2), (20, 20), 0.05)
    assert hausdorff_distance(a, b) == pytest.approx(brute_hausdorff(a, b), abs=1e-12)
    assert hausdorff_distance(a, b) == max(directed_distance(a, b), directed_distance(b, a))


@settings(max_examples=40, deadline=None)
@given(seeds, seeds, seeds)
def test_metric_axioms(s1, s2, s3):
    a, b, c = (random_grid(np.random.default_rng(s), (30, 30), 0.03) for s in (s1, s2, s3))
    diag = math.sqrt(2) * a.pixel
    assert hausdorff_distance(a, b) == hausdorff_distance(b, a)
    assert hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + diag
    assert hausdorff_distance(a, a) == 0.0


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(0, 0.3))
def test_dilation_identity(seed, eps):
    g = random_grid(np.random.default_rng(seed), (40, 40), 0.03)
    assert hausdorff_distance(dilate(g, eps, clamp=True), g) <= eps + math.sqrt(2) * g.pixel

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plane_attractors.errors import GeometryError
from plane_attractors.grid import Disk, new_grid
from plane_attractors.pgm import from_pgm_bytes, read_pgm, to_pgm_bytes, write_pgm

from conftest import random_grid


def test_header_and_orientation():
    g = new_grid((0.0, 0.0, 0.3, 0.2), 10, Disk(0.05, 0.15, 0.01))
    data = to_pgm_bytes(g)
    assert data.startswith(b"P5\n# bounds=0.0,0.0,0.3,0.2 res=10.0\n3 2\n255\n")
    # the occupied cell is in the top row of the image (largest y)
    assert data[-6:] == bytes([255, 0, 0, 0, 0, 0])


def test_round_trip_file(tmp_path):
    g = new_grid((-1.0, -1.0, 1.0, 1.0), 37.5, Disk(0.1, -0.2, 0.6))
    write_pgm(g, tmp_path / "disk.pgm")
    h = read_pgm(tmp_path / "disk.pgm")
    assert h == g and h.bounds == g.bounds and h.resolution == g.resolution
    assert not list(tmp_path.glob("*.tmp"))


def test_foreign_pgm_without_geometry():
    raw = b"P5\n2 2\n255\n" + bytes([0, 200, 10, 0])
    g = from_pgm_bytes(raw)
    assert g.bounds == (0.0, 0.0, 2.0, 2.0) and g.resolution == 1.0
    assert g.bits.tolist() == [[False, False], [False, True]]


def test_rejects_ascii_pgm():
    with pytest.raises(GeometryError):
        from_pgm_bytes(b"P2\n1 1\n255\n0\n")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(1.0, 500.0), st.floats(-10, 10))
def test_exact_round_trip(seed, res, x0):
    g = random_grid(np.random.default_rng(seed), (13, 17), 0.4)
    h = new_grid((x0, -1.0, x0 + 17 / res, -1.0 + 13 / res), res)
    if h.shape != g.shape:
        return
    g = h.with_bits(g.bits)
    back = from_pgm_bytes(to_pgm_bytes(g))
    assert back == g and back.bounds == g.bounds and back.resolution == g.resolution

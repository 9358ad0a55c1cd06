import numpy as np
import pytest

from plane_attractors.grid import BitGrid, new_grid


def random_grid(rng, shape=(40, 40), density=0.05, bounds=None, margin=0):
    """Random sparse grid on a unit-pixel-per-cell frame; ``margin`` cells stay empty."""
    ny, nx = shape
    bits = rng.random(shape) < density
    if margin:
        bits[:margin] = bits[-margin:] = False
        bits[:, :margin] = bits[:, -margin:] = False
    if not bits.any():
        bits[ny // 2, nx // 2] = True
    if bounds is None:
        bounds = (0.0, 0.0, nx / 20.0, ny / 20.0)
    return BitGrid(bounds, 20.0, bits)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def single(bounds, res, x, y):
    """Grid with the one cell containing ``(x, y)`` occupied."""
    g = new_grid(bounds, res)
    rows, cols, inside = g.locate(np.array([x]), np.array([y]))
    assert inside[0]
    bits = np.zeros(g.shape, dtype=bool)
    bits[rows[0], cols[0]] = True
    return g.with_bits(bits)

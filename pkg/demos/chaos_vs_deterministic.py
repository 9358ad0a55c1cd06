"""Chaos game against the deterministic Hutchinson iteration.

Both methods render the gasket; their Hausdorff distance drops to a pixel
or two once enough points are played.  Box-counting dimensions follow.

    python3 demos/chaos_vs_deterministic.py
"""
import math

from plane_attractors.hyperspace import hausdorff_distance
from plane_attractors.ifs import (UNIT_TRIANGLE, attractor_chaos_game, box_counting_dimension,
                                  render_attractor, sierpinski_ifs)

res = 512
F = sierpinski_ifs()
det = render_attractor(F, (-0.05, -0.05, 1.05, 0.95), res, UNIT_TRIANGLE)
print(f"deterministic: {det.iterations} iterations, final step {det.trace.final_distance * res:.2f} px")
for n in (10_000, 100_000, 1_000_000):
    cg = attractor_chaos_game(F, n, 100, 1, det.attractor.empty_like())
    print(f"chaos game {n:>9} points: {hausdorff_distance(cg, det.attractor) * res:6.2f} px away")

# box sizes must divide the grid, so use a square 1024-pixel frame
square = render_attractor(F, (-0.25, -0.25, 1.25, 1.25), 1024, UNIT_TRIANGLE).attractor
dim = box_counting_dimension(square, [2, 4, 8, 16, 32, 64, 128, 256])
print(f"box dimension {dim.value:.3f} (log 3 / log 2 = {math.log(3) / math.log(2):.3f})")

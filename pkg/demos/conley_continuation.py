"""Conley attractors without contraction, continued through a fixed block.

First the six-map example is recomputed as a Conley attractor from a thick
neighbourhood of its attractor.  Then a one-map family z/2 + lambda v is
followed across lambda with the block held fixed: the attractor is the
point 2 lambda v and its distance to the base attractor grows linearly.

    python3 demos/conley_continuation.py
"""
import math

from plane_attractors.conley import InvertibleIFS, conley_attractor, continuation
from plane_attractors.grid import Disk, dilate, new_grid
from plane_attractors.hyperspace import hausdorff_distance
from plane_attractors.ifs import UNIT_TRIANGLE, AffineMap2, example_41_ifs, render_attractor

res = 256
F = example_41_ifs()
A = render_attractor(F, (-0.05, -0.05, 1.05, 0.95), res, UNIT_TRIANGLE).attractor
K = conley_attractor(InvertibleIFS.from_ifs(F), dilate(A, 8 / res)).attractor
print(f"six-map example: Conley vs deterministic attractor {hausdorff_distance(K, A) * res:.2f} px")

v = (0.03, 0.04)
family = lambda lam: InvertibleIFS((AffineMap2(0.5, 0, 0, 0.5, lam * v[0], lam * v[1]),))
Q = new_grid((-0.6, -0.6, 0.6, 0.6), 200, Disk(0, 0, 0.5))
rep = continuation(family, Q, [0.0, 0.025, 0.05, 0.075, 0.1], contractive=True)
for e in rep.entries:
    print(f"lambda {e.lam:5.3f}: {e.status}, distance to base {e.hausdorff_to_base:.4f}"
          f" (expected {2 * e.lam * math.hypot(*v):.4f}), inside eps-neighbourhood: {e.contained}")
print("distance shrinks towards the base parameter:", rep.hausdorff_converges)

"""Annular attractors born in a Neimark-Sacker bifurcation.

For small positive lambda the origin repels and an invariant circle of radius
about sqrt(lambda) attracts.  The script traps the dynamics in a disk,
extracts the annular attractor and checks it has the shape of a circle,
then perturbs the map and watches the shape survive.

    python3 demos/hopf_scan.py        # about a minute on one core
"""
import math

from plane_attractors.grid import Disk, new_grid
from plane_attractors.homeo import OK, hopf_scan, neimark_sacker_family, robustness_check

family = neimark_sacker_family()
D = new_grid((-0.55, -0.55, 0.55, 0.55), 400, Disk(0, 0, 0.5))

report = hopf_scan(family, [-0.05, 0.01, 0.04, 0.09, 0.16], D)
for e in report.entries:
    if e.status == OK:
        print(f"lambda {e.lam:5.2f}: {e.shape.verdict.value:<8} outer radius {e.outer_radius:.4f}"
              f" (sqrt(lambda) = {math.sqrt(e.lam):.4f}), surrounds origin: {e.surrounds_origin}")
    else:
        print(f"lambda {e.lam:5.2f}: {e.status}")
print("radii increase:", report.radii_monotone, " shrink towards the origin:", report.shrinks_to_origin)

rob = robustness_check(family, 0.09, [0.02, 0.01, 0.005], D)
for e in rob.entries:
    print(f"perturbation {e.amplitude:<6} shape {e.shape.verdict.value:<8} "
          f"distance to unperturbed {e.hausdorff_to_base:.4f}")

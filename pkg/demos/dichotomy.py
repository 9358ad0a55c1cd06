"""Empty-interior dichotomy on three systems.

Renders the six-map example, its last three maps (a Sierpinski gasket) and
the Koch curve at three resolutions, and prints hole counts with verdicts.
A connected attractor with empty interior should be either tree-like (no
holes) or carry holes at every scale; a single stable hole is only allowed
when the interior is not empty.

    python3 demos/dichotomy.py
"""
from plane_attractors.ifs import KOCH_HULL, UNIT_TRIANGLE, example_41_ifs, koch_ifs, sierpinski_ifs
from plane_attractors.shape import check_theorem_41

FRAME = (-0.05, -0.05, 1.05, 0.95)
RESOLUTIONS = [128, 256, 512]

cases = [
    (example_41_ifs(), FRAME, UNIT_TRIANGLE),
    (sierpinski_ifs(), FRAME, UNIT_TRIANGLE),
    (koch_ifs(), (-0.05, -0.1, 1.05, 0.4), KOCH_HULL),
]

for F, frame, seed in cases:
    rep = check_theorem_41(F, RESOLUTIONS, frame, seed)
    interior = ", ".join(f"{r}: {v}" for r, v in rep.interior.items())
    print(f"{F.name:>16}  holes {rep.shape.counts}  verdict {rep.shape.verdict.value:<12}"
          f" interior [{interior}]  -> {rep.status}")

# The six-map attractor has a single stable hole, so the dichotomy does not
# apply to it: its first three maps cover a solid triangle.

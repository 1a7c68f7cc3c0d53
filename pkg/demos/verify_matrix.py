"""Zero mean curvature over the whole family matrix, next to a control that must fail.

    python3 demos/verify_matrix.py
"""
import math

import numpy as np

from lorentz_riemann import classify_case
from lorentz_riemann.surface import default_q_grid, default_v_grid, mean_curvature_grid, sphere_control

CASES = [("s3", lam) for lam in (-3.0, -1.0, 0.0, 1.0, 2.0, 3.0)] + [
    (sel, lam) for sel in ("t4-a10", "t4-a01", "t4-a11", "t5-a10", "t5-a01", "t5-a11") for lam in (-3.0, 3.0)
] + [("s3-const", 0.0), ("t4-const", 0.0), ("t5-const", 0.0)]

for sel, lam in CASES:
    for rep in classify_case(sel, lam):
        p = rep.profile
        q, v = default_q_grid(p, 40), default_v_grid(p, 40)
        res = mean_curvature_grid(p, q[:, None], v[None, :])
        print(f"{sel:9} lambda={lam:+.0f} {p.branch.value:4}  max |H| = {res.max_abs:.1e}  skipped {res.skipped}")

u = np.linspace(0.1, math.pi - 0.1, 40)
sphere = mean_curvature_grid(sphere_control(), u[:, None], np.linspace(0, 2 * math.pi, 40)[None, :])
print(f"Euclidean sphere control: max |H| = {sphere.max_abs:.1e} (must be large)")

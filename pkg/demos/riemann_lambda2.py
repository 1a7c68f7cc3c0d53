"""The lambda = 2 example end to end: profile, causal map, limit line, period, mesh.

    python3 demos/riemann_lambda2.py [out_dir]
"""
import math
import sys
from pathlib import Path

import numpy as np

from lorentz_riemann import (
    causal_map,
    detect_boundary_line,
    lightlike_locus,
    make_profile,
    periodic_extend,
    schwarz_reflect,
)
from lorentz_riemann.extension import period_vector
from lorentz_riemann.io import write_mesh
from lorentz_riemann.minkowski import lorentz_inner
from lorentz_riemann.quadrature import asymptotic_limits, closed_form, profile_integrals
from lorentz_riemann.surface import default_q_grid, default_v_grid, patch_mean_curvature

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

p = make_profile("s3", 2.0)
print(f"profile q in ({p.q_lo}, {p.q_hi}), radicand coefficients {p.coeffs}")

# quadrature against the explicit z = arctan(sqrt q), m = sqrt q - arctan(sqrt q)
for q in (0.25, 1.0, 9.0):
    e = profile_integrals(p, q)
    z, m = closed_form(p, q)
    print(f"q={q:5}: z={e.z:.12f} (closed {z:.12f})  m={e.m:.12f} (closed {m:.12f})")

lim = asymptotic_limits(p)
print(f"slab height z0 = {lim.z0:.12f}  (pi/2 = {math.pi / 2:.12f}),  c = {lim.c:.12f}")

# 40 x 40 grid, lightlike band 1e-9: only the meridian v = 0 is lightlike
patch = causal_map(p, default_q_grid(p, 40), default_v_grid(p, 40), band=1e-9)
print("census", patch.census)
(locus,) = lightlike_locus(p)
print(f"lightlike locus: line through {locus.point} with direction {locus.direction}")
print(f"max normalized H on the grid: {patch_mean_curvature(patch).max_abs:.2e}")

line = detect_boundary_line(p)
reflected = schwarz_reflect(patch, line)
T = period_vector(p, line)
print(f"limit line through {np.round(line.point, 12)}, period T = {np.round(T, 12)}, <T,T> = {lorentz_inner(T, T):.1e}")

copies = periodic_extend(patch, reflected, 1)
write_mesh(out / "lambda2_periodic.ply", copies, "ply")
print(f"wrote {len(copies)} patches to {out / 'lambda2_periodic.ply'}")

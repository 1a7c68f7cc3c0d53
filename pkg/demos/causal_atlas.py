"""Which lambda give which causal regions, per family.

    python3 demos/causal_atlas.py
"""
import numpy as np

from lorentz_riemann import classify_case
from lorentz_riemann.families import SELECTORS

LAMBDAS = np.linspace(-4.0, 4.0, 9)

for sel in sorted(k for k, f in SELECTORS.items() if not f.constant_radius):
    print(f"\n{sel}")
    for lam in LAMBDAS:
        reports = classify_case(sel, lam)
        if not reports:
            print(f"  lambda={lam:+.1f}  discarded")
            continue
        for rep in reports:
            p = rep.profile
            kinds = "/".join(sorted(c.value[0].upper() for c in rep.predicted_causal))
            print(
                f"  lambda={lam:+.1f}  {p.branch.value:4}  q in ({p.q_lo:.4g}, {p.q_hi:.4g})  {kinds:5}  "
                f"{rep.limit_low.value} -> {rep.limit_high.value}"
            )

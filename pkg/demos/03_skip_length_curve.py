"""
Optimal skip length as the expected flood grows
===============================================

The optimal m grows like the square root of E[X]. The table shows that for
a few cost ratios, and checks one value against exhaustive search.
"""
import numpy as np

from gateway_shield.costmodel import CostParams, brute_force_m, mstar_curve, optimal_m

exs = np.array([1e3, 1e4, 1e5, 1e6])
print("E[X]      " + "".join(f"b/a={r:<6}" for r in (0.5, 1.0, 2.0)))
curves = {r: dict(mstar_curve(20, r, exs)) for r in (0.5, 1.0, 2.0)}
for ex in exs:
    print(f"{ex:<10.0f}" + "".join(f"{curves[r][ex]:<10}" for r in curves))

p = CostParams(alpha=1, beta=1, expected_x=1000, w=20)
print("closed form:", optimal_m(p), " exhaustive:", brute_force_m(p, 2000)[0])

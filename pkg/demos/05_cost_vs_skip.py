"""
Simulated cost against skip length
==================================

Sweep m for a flood whose size varies around 1000 packets and compare the
replicated cost with the analytic curve. The analytic reprocessing term
also charges tau*f*X for the attack packets themselves, so it sits a
roughly constant amount above the simulated cost, which only charges for
benign packets lost. Compare the shapes and the argmin, not the levels.
"""
import numpy as np

from gateway_shield.costmodel import optimal_m
from gateway_shield.scenario import load_scenario
from gateway_shield.sim import sweep_m

s = load_scenario("fig5_sweep")
rows = sweep_m(s, list(range(40, 401, 20)), reps=20)
for r in rows:
    print(f"m={r.m:<4} analytic {r.analytic_ms:8.1f} ms   simulated {r.sim_mean_ms:8.1f} +- {r.sim_ci95_ms:5.1f} ms")
best = rows[int(np.argmin([r.sim_mean_ms for r in rows]))].m
print("simulated argmin:", best, " closed form m*:", optimal_m(s.cost_params()))

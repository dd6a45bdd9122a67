"""
Inspector backlog with and without shaping
==========================================

A 10 s flood at 15000 packets/s hits an inspector that needs 3 ms per
packet. Without shaping the backlog reaches ~146k packets; with shaping
the queue in front of the inspector stays at one.
"""
from gateway_shield.scenario import load_scenario
from gateway_shield.sim import run_scenario

S = 1e9
for name in ("fig4_baseline", "fig4_sqf", "fig4_sqf_jitter"):
    r = run_scenario(load_scenario(name))
    drain = f"{r.ad_drain_time / S:.1f} s" if r.ad_drain_time is not None else "n/a"
    print(f"{name:<16} peak inspector queue {r.peak_ad_queue:>7}  "
          f"peak shaper queue {r.peak_sqf_queue:>7}  drain {drain}")

"""
Pacing a burst with the shaping forwarder
=========================================

A burst of packets arriving faster than the inspector can handle gets
spread out so that departures are at least D apart.
"""
import numpy as np

from gateway_shield.qdtp import QdtpConfig, delay_recursion, departures

MS = 1_000_000

# five packets 0.5 ms apart, then an idle gap, then two more
arrivals = np.array([0, 0.5, 1.0, 1.5, 2.0, 30.0, 30.2]) * MS
arrivals = arrivals.astype(np.int64)

cfg = QdtpConfig(d_spacing=3 * MS)
dep = departures(arrivals, cfg.d_spacing)
for a, t in zip(arrivals, dep):
    print(f"arrive {a / MS:6.1f} ms  depart {t / MS:6.1f} ms  waited {(t - a) / MS:4.1f} ms")

# the same delays fall out of the interarrival recursion
q = delay_recursion(np.diff(arrivals).tolist(), cfg)
assert q == (dep - arrivals).tolist()
print("minimum spacing:", np.diff(dep).min() / MS, "ms")

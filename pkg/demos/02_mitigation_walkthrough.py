"""
Stepping the mitigation state machine by hand
=============================================

Twelve attack packets followed by benign traffic, W=4 and m=3, with a
perfect detector. Each line is one packet and what happened to it.
"""
import numpy as np

from gateway_shield.aam import AamConfig, AamState, aam_step
from gateway_shield.detector import DetectorConfig
from gateway_shield.traffic import Label, PacketRecord

cfg = AamConfig(window_w=4, skip_m=3)
det = DetectorConfig(tpr=1.0, tnr=1.0, window_w=4)
rng = np.random.default_rng(0)

pattern = "A" * 12 + "B" * 10
state = AamState()
for seq, c in enumerate(pattern):
    pkt = PacketRecord(seq, Label.ATTACK if c == "A" else Label.BENIGN, 0, seq)
    actions, state = aam_step(state, cfg, det, pkt, rng)
    names = ", ".join(type(a).__name__ for a in actions) or "buffered"
    print(f"{seq:2d} {c}  {state.mode.name:<10} {names}")

"""Quasi-deterministic transmission policy (QDTP) forwarder.

The forwarder releases packet n at ``t_n = max(t_{n-1} + D, a_n)`` with
``t_0 = a_0``, so consecutive departures are at least ``D`` apart.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import ConfigError, OrderingError
from .traffic import PacketRecord


@dataclass(frozen=True)
class QdtpConfig:
    d_spacing: int = 3_000_000  # ns; 0 is a pass-through shaper

    def __post_init__(self):
        if self.d_spacing < 0:
            raise ConfigError(f"d_spacing must be >= 0, got {self.d_spacing}")


@dataclass(frozen=True)
class QdtpState:
    last_departure: Optional[int] = None
    forwarded_count: int = 0
    last_arrival: Optional[int] = None


class ShapedPacket(NamedTuple):
    packet: PacketRecord
    departure: int
    delay: int


def forward_one(state: QdtpState, cfg: QdtpConfig, arrival: int) -> tuple[int, QdtpState]:
    if state.last_arrival is not None and arrival < state.last_arrival:
        raise OrderingError(f"arrival {arrival} precedes previous arrival {state.last_arrival}")
    if state.last_departure is None:
        departure = arrival
    else:
        departure = max(state.last_departure + cfg.d_spacing, arrival)
    return departure, QdtpState(departure, state.forwarded_count + 1, arrival)


def departures(arrivals: np.ndarray, d_spacing: int) -> np.ndarray:
    """Vectorized departure times for a sorted arrival array.

    Unrolling the max-recursion gives ``t_n = n*D + max_{k<=n}(a_k - k*D)``.
    """
    a = np.asarray(arrivals, dtype=np.int64)
    if a.size == 0:
        return a.copy()
    if np.any(np.diff(a) < 0):
        raise OrderingError("arrivals must be non-decreasing")
    step = np.arange(a.size, dtype=np.int64) * np.int64(d_spacing)
    return step + np.maximum.accumulate(a - step)


_SHORT_TRACE = 64


def shape_trace(trace: Sequence[PacketRecord], cfg: QdtpConfig) -> list[ShapedPacket]:
    if not trace:
        return []
    if len(trace) < _SHORT_TRACE:
        # numpy call overhead dominates for short traces
        d, last_a = cfg.d_spacing, trace[0].arrival_time
        dep = last_a - d
        out = []
        for p in trace:
            a = p.arrival_time
            if a < last_a:
                raise OrderingError("arrivals must be non-decreasing")
            dep = max(dep + d, a)
            out.append(ShapedPacket(p, dep, dep - a))
            last_a = a
        return out
    a = np.fromiter((p.arrival_time for p in trace), dtype=np.int64, count=len(trace))
    t = departures(a, cfg.d_spacing)
    return [ShapedPacket(p, int(dep), int(dep - p.arrival_time))
            for p, dep in zip(trace, t.tolist())]


def delay_recursion(interarrivals: Sequence[int], cfg: QdtpConfig) -> list[int]:
    """Per-packet shaping delay from interarrival gaps.

    ``interarrivals[k]`` is ``a_{k+1} - a_k``; the result has one more entry
    than the input and starts with ``Q_0 = 0``.
    """
    d = cfg.d_spacing
    q = 0
    out = [0]
    for gap in interarrivals:
        if gap < 0:
            raise OrderingError(f"negative interarrival {gap}")
        q = q + d - gap
        if q < 0:
            q = 0
        out.append(q)
    return out

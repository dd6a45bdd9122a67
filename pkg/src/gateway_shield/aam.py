"""Adaptive attack mitigation: windowed test, drop, and skip.

In NORMAL mode the stream is tiled into W-packet windows, each one inspected.
A NO_ATTACK window is forwarded. An ATTACK window is dropped and opens a
mitigation episode: the next ``m`` packets are dropped untested, the
following W are tested, and so on until a window comes back NO_ATTACK; that
window is forwarded and the machine returns to NORMAL.

Two drivers share these semantics: :func:`aam_step` (one packet at a time,
functional state) and :func:`run_mitigation` (window at a time, used by the
simulator). They consume detector draws in the same order, so they produce
identical outcomes for the same seed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .detector import DetectorConfig, Verdict, WindowVerdict, window_verdict
from .errors import ConfigError, InvalidInputError, OrderingError
from .traffic import Label, PacketRecord, trace_arrays


@dataclass(frozen=True)
class AamConfig:
    window_w: int = 20
    skip_m: int = 80

    def __post_init__(self):
        if self.window_w < 1:
            raise ConfigError(f"window_w must be >= 1, got {self.window_w}")
        if self.skip_m < 1:
            raise ConfigError(f"skip_m must be >= 1, got {self.skip_m}")


class Mode(enum.Enum):
    NORMAL = "normal"
    MITIGATING = "mitigating"


@dataclass(frozen=True)
class AamState:
    mode: Mode = Mode.NORMAL
    pending_window: tuple[PacketRecord, ...] = ()
    skip_remaining: int = 0
    last_seq: int = -1


@dataclass(frozen=True)
class Forward:
    packet: PacketRecord


@dataclass(frozen=True)
class Drop:
    packet: PacketRecord
    tested: bool


@dataclass(frozen=True)
class Inspected:
    window: WindowVerdict
    mode: Mode  # mode the machine was in when the window was tested


Action = Union[Forward, Drop, Inspected]


def aam_step(state: AamState, cfg: AamConfig, det: DetectorConfig, packet: PacketRecord,
             rng: np.random.Generator) -> tuple[list[Action], AamState]:
    if cfg.window_w != det.window_w:
        raise ConfigError("AamConfig.window_w and DetectorConfig.window_w differ")
    if packet.seq <= state.last_seq:
        raise OrderingError(f"packet seq {packet.seq} after seq {state.last_seq}")

    if state.mode is Mode.MITIGATING and state.skip_remaining > 0:
        return [Drop(packet, tested=False)], replace(
            state, skip_remaining=state.skip_remaining - 1, last_seq=packet.seq)

    pending = state.pending_window + (packet,)
    if len(pending) < cfg.window_w:
        return [], replace(state, pending_window=pending, last_seq=packet.seq)

    wv = window_verdict(det, [p.label for p in pending], rng, pending[0].seq)
    actions: list[Action] = [Inspected(wv, state.mode)]
    if wv.verdict is Verdict.ATTACK:
        actions += [Drop(p, tested=True) for p in pending]
        new = AamState(Mode.MITIGATING, (), cfg.skip_m, packet.seq)
    else:
        actions += [Forward(p) for p in pending]
        new = AamState(Mode.NORMAL, (), 0, packet.seq)
    return actions, new


# -- batch driver ------------------------------------------------------------

class Fate(enum.IntEnum):
    """What happened to each packet in a batch run."""

    FORWARDED_TESTED = 0
    DROPPED_TESTED = 1
    DROPPED_SKIPPED = 2
    BUFFERED = 3
    FORWARDED_UNTESTED = 4  # trailing partial window released by ``flush``


INSPECTED = (Fate.FORWARDED_TESTED, Fate.DROPPED_TESTED)


@dataclass
class Episode:
    start_seq: int
    skip_m: int
    end_seq: Optional[int] = None
    n_windows: int = 0          # windows tested while mitigating, incl. the closing one
    delta_dropped: int = 0
    benign_dropped: int = 0
    omega_ns: int = 0           # n_windows * W * tau
    closed: bool = False


@dataclass
class MitigationOutcome:
    window_w: int
    tau_inspect: int
    windows_tested_total: int = 0
    mitigation_windows_n: int = 0
    dropped_total: int = 0
    dropped_benign: int = 0
    forwarded_total: int = 0
    buffered: int = 0
    consumed: int = 0
    episodes: list[Episode] = field(default_factory=list)

    @property
    def inspection_time_omega(self) -> int:
        """Inspection time of every tested window, NORMAL and MITIGATING."""
        return self.windows_tested_total * self.window_w * self.tau_inspect

    @property
    def mitigation_omega(self) -> int:
        """Inspection time spent in MITIGATING mode only (the attack overhead)."""
        return self.mitigation_windows_n * self.window_w * self.tau_inspect


def mitigate_arrays(is_attack: np.ndarray, seqs: np.ndarray, cfg: AamConfig, det: DetectorConfig,
                    rng: np.random.Generator, *, flush: bool = False,
                    m_for_episode: Optional[Callable[[int], int]] = None,
                    ) -> tuple[MitigationOutcome, np.ndarray]:
    """Window-at-a-time AAM over label/seq arrays.

    ``m_for_episode(i)`` (if given) picks the skip length when an episode is
    opened by the window starting at index ``i``; otherwise ``cfg.skip_m``.
    Returns the outcome and a per-packet :class:`Fate` array.
    """
    if cfg.window_w != det.window_w:
        raise ConfigError("AamConfig.window_w and DetectorConfig.window_w differ")
    w = cfg.window_w
    truth = np.asarray(is_attack, dtype=bool)
    n = truth.size
    fate = np.full(n, Fate.BUFFERED, dtype=np.int8)
    out = MitigationOutcome(w, det.tau_inspect, consumed=n)
    mode = Mode.NORMAL
    m = cfg.skip_m
    ep: Optional[Episode] = None
    skip = 0
    i = 0

    def drop(lo, hi, code):
        fate[lo:hi] = code
        benign = (hi - lo) - int(np.count_nonzero(truth[lo:hi]))
        out.dropped_total += hi - lo
        out.dropped_benign += benign
        ep.delta_dropped += hi - lo
        ep.benign_dropped += benign

    while True:
        if mode is Mode.MITIGATING:
            k = min(skip, n - i)
            drop(i, i + k, Fate.DROPPED_SKIPPED)
            i += k
            skip -= k
            if skip:
                break
        if i + w > n:
            break
        wv = window_verdict(det, truth[i:i + w], rng, int(seqs[i]))
        out.windows_tested_total += 1
        if mode is Mode.MITIGATING:
            out.mitigation_windows_n += 1
            ep.n_windows += 1
            ep.omega_ns += w * det.tau_inspect
        if wv.verdict is Verdict.ATTACK:
            if mode is Mode.NORMAL:
                m = m_for_episode(i) if m_for_episode else cfg.skip_m
                if m < 1:
                    raise ConfigError(f"skip length must be >= 1, got {m}")
                ep = Episode(start_seq=int(seqs[i]), skip_m=m)
                out.episodes.append(ep)
                mode = Mode.MITIGATING
            drop(i, i + w, Fate.DROPPED_TESTED)
            skip = m
        else:
            fate[i:i + w] = Fate.FORWARDED_TESTED
            out.forwarded_total += w
            if mode is Mode.MITIGATING:
                ep.end_seq = int(seqs[i + w - 1])
                ep.closed = True
                mode = Mode.NORMAL
        i += w

    if ep is not None and not ep.closed:
        ep.end_seq = int(seqs[i - 1]) if i > 0 else None
    rest = n - i
    if rest:
        if flush:
            fate[i:] = Fate.FORWARDED_UNTESTED
            out.forwarded_total += rest
        else:
            out.buffered = rest
    return out, fate


def run_mitigation(trace: Sequence[PacketRecord], cfg: AamConfig, det: DetectorConfig,
                   seed: Optional[int] = None, *, flush: bool = False) -> MitigationOutcome:
    """Run AAM over a whole trace; ``seed`` defaults to ``det.seed``."""
    for prev, cur in zip(trace, trace[1:]):
        if cur.seq <= prev.seq:
            raise OrderingError(f"packet seq {cur.seq} after seq {prev.seq}")
    _, is_attack = trace_arrays(trace)
    seqs = np.fromiter((p.seq for p in trace), dtype=np.int64, count=len(trace))
    rng = np.random.default_rng(det.seed if seed is None else seed)
    outcome, _ = mitigate_arrays(is_attack, seqs, cfg, det, rng, flush=flush)
    return outcome

"""Synthetic packet traces: periodic/Poisson benign telemetry plus flood bursts.

All times are integer nanoseconds. Every generator is a pure function of its
config and seed.
"""
from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, replace
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError, InvariantError

NS_PER_S = 1_000_000_000
NS_PER_MS = 1_000_000


class Label(enum.IntEnum):
    BENIGN = 0
    ATTACK = 1


@dataclass(frozen=True, slots=True)
class PacketRecord:
    arrival_time: int
    label: Label
    source_id: int
    seq: int


# -- X distributions ---------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    x: int

    def __post_init__(self):
        if self.x < 1:
            raise ConfigError(f"Constant x must be >= 1, got {self.x}")

    @property
    def mean(self) -> float:
        return float(self.x)

    @property
    def upper(self) -> int:
        return self.x

    def sample(self, rng: np.random.Generator) -> int:
        return int(self.x)


@dataclass(frozen=True)
class Uniform:
    """Integer-uniform on the closed range [lo, hi]."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 1 or self.hi < self.lo:
            raise ConfigError(f"Uniform needs 1 <= lo <= hi, got ({self.lo}, {self.hi})")

    @property
    def mean(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def upper(self) -> int:
        return self.hi

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.lo, self.hi, endpoint=True))

    @classmethod
    def around(cls, expected_x: float, spread: float = 0.5) -> "Uniform":
        """Uniform((1-spread)*E[X], (1+spread)*E[X]); the replication default."""
        return cls(max(1, math.ceil((1 - spread) * expected_x)),
                   math.floor((1 + spread) * expected_x))


@dataclass(frozen=True)
class Geometric:
    """Geometric on {1, 2, ...} with the given mean."""

    mean_x: float

    def __post_init__(self):
        if self.mean_x < 1:
            raise ConfigError(f"Geometric mean must be >= 1, got {self.mean_x}")

    @property
    def mean(self) -> float:
        return float(self.mean_x)

    @property
    def upper(self) -> None:
        return None

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.geometric(1.0 / self.mean_x))


XDistribution = Union[Constant, Uniform, Geometric]


# -- configs -----------------------------------------------------------------

@dataclass(frozen=True)
class BenignSourceConfig:
    """Benign telemetry sources.

    ``mode="periodic"``: each source emits every ``period`` ns, sources are
    phase-shifted by ``period / source_count``, and each packet gets an extra
    delay drawn uniformly from ``[0, jitter]``.  ``mode="poisson"``: each source
    is a Poisson stream with mean interarrival ``period``.
    """

    period: int = NS_PER_S
    source_count: int = 1
    jitter: int = 0
    mode: str = "periodic"

    def __post_init__(self):
        if self.period <= 0:
            raise ConfigError(f"period must be > 0, got {self.period}")
        if self.source_count < 1:
            raise ConfigError(f"source_count must be >= 1, got {self.source_count}")
        if self.jitter < 0:
            raise ConfigError(f"jitter must be >= 0, got {self.jitter}")
        if self.mode not in ("periodic", "poisson"):
            raise ConfigError(f"unknown benign mode {self.mode!r}")


@dataclass(frozen=True)
class FloodConfig:
    start_time: int
    x_distribution: XDistribution
    attack_fraction_f: float = 1.0
    attack_rate: float = 15_000.0
    source_id: int = 99

    def __post_init__(self):
        if not 0 < self.attack_fraction_f <= 1:
            raise ConfigError(f"attack fraction must be in (0, 1], got {self.attack_fraction_f}")
        if self.attack_rate <= 0:
            raise ConfigError(f"attack rate must be > 0, got {self.attack_rate}")
        if self.start_time < 0:
            raise ConfigError(f"start_time must be >= 0, got {self.start_time}")

    @property
    def expected_x(self) -> float:
        return self.x_distribution.mean

    def duration(self, x: int) -> int:
        return int(math.ceil(x * NS_PER_S / self.attack_rate))


# -- generators --------------------------------------------------------------

def generate_benign(cfg: BenignSourceConfig, horizon: int, seed: int) -> list[PacketRecord]:
    """Benign packets with arrival times in ``[0, horizon)``, sorted."""
    if horizon <= 0:
        raise ConfigError(f"horizon must be > 0, got {horizon}")
    rng = np.random.default_rng(seed)
    times, sources = [], []
    for src in range(cfg.source_count):
        if cfg.mode == "periodic":
            offset = src * cfg.period // cfg.source_count
            t = np.arange(offset, horizon, cfg.period, dtype=np.int64)
        else:
            # Over-draw, then cut at the horizon.
            n = int(horizon / cfg.period * 1.5) + 16
            gaps = rng.exponential(cfg.period, size=n)
            t = np.floor(np.cumsum(gaps)).astype(np.int64)
            while t[-1] < horizon:
                more = np.floor(t[-1] + np.cumsum(rng.exponential(cfg.period, size=n))).astype(np.int64)
                t = np.concatenate([t, more])
            t = t[t < horizon]
        if cfg.jitter:
            t = t + rng.integers(0, cfg.jitter, size=t.size, endpoint=True)
            t = t[t < horizon]
        times.append(t)
        sources.append(np.full(t.size, src, dtype=np.int64))
    t_all = np.concatenate(times)
    s_all = np.concatenate(sources)
    order = np.lexsort((s_all, t_all))
    return [PacketRecord(int(t_all[i]), Label.BENIGN, int(s_all[i]), k)
            for k, i in enumerate(order)]


def generate_flood(cfg: FloodConfig, seed: int) -> tuple[list[PacketRecord], int]:
    """One flood burst: ``realized_x`` packets evenly spaced at ``1/attack_rate``.

    Each packet is independently ATTACK with probability ``f``.
    """
    rng = np.random.default_rng(seed)
    x = cfg.x_distribution.sample(rng)
    k = np.arange(x, dtype=np.int64)
    times = cfg.start_time + (k * NS_PER_S / cfg.attack_rate).astype(np.int64)
    if cfg.attack_fraction_f >= 1:
        is_attack = np.ones(x, dtype=bool)
    else:
        is_attack = rng.random(x) < cfg.attack_fraction_f
    trace = [PacketRecord(int(t), Label.ATTACK if a else Label.BENIGN, cfg.source_id, i)
             for i, (t, a) in enumerate(zip(times.tolist(), is_attack.tolist()))]
    return trace, x


def _check_sorted(trace: Sequence[PacketRecord], which: int) -> None:
    for prev, cur in zip(trace, trace[1:]):
        if cur.arrival_time < prev.arrival_time:
            raise InvariantError(f"input trace {which} is not sorted at seq {cur.seq}")


def merge_traces(traces: Sequence[Sequence[PacketRecord]]) -> list[PacketRecord]:
    """Merge sorted traces; ties go to the earlier input, then original seq."""
    for i, tr in enumerate(traces):
        _check_sorted(tr, i)
    keyed = [[(p.arrival_time, i, p.seq, p) for p in tr] for i, tr in enumerate(traces)]
    merged = heapq.merge(*keyed, key=lambda item: item[:3])
    return [replace(item[3], seq=k) for k, item in enumerate(merged)]


def trace_arrays(trace: Sequence[PacketRecord]) -> tuple[np.ndarray, np.ndarray]:
    """(arrival_ns int64, is_attack bool) views of a trace."""
    n = len(trace)
    arrivals = np.fromiter((p.arrival_time for p in trace), dtype=np.int64, count=n)
    labels = np.fromiter((p.label for p in trace), dtype=np.int8, count=n)
    return arrivals, labels.astype(bool)

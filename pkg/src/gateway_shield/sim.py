"""Event-level gateway simulation: traffic -> (SQF) -> AD/AAM -> server.

The AAM works on the packet sequence as the forwarder releases it (FIFO, so
the same order as arrival); its decisions fix which packets reach the
detector. The detector queue is then a single deterministic-service server
(optionally jittered) fed at the forwarder's departure instants. Packets
dropped untested never enter that queue.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .aam import INSPECTED, AamConfig, MitigationOutcome, mitigate_arrays
from .costmodel import CostParams, cost_curve, optimal_m
from .detector import DetectorConfig
from .errors import ConfigError
from .qdtp import QdtpConfig, departures
from .traffic import (BenignSourceConfig, FloodConfig, PacketRecord, generate_benign,
                      generate_flood, merge_traces, trace_arrays)

NS_PER_MS = 1_000_000
SAMPLE_CADENCE = 100 * NS_PER_MS


@dataclass(frozen=True)
class CostWeights:
    alpha: float = 1.0
    beta: float = 1.0


@dataclass(frozen=True)
class Scenario:
    """One experiment.

    ``adaptive_m`` makes each mitigation episode use the closed-form optimum
    for the flood under way (its configured E[X] and f) instead of
    ``aam.skip_m``. ``service_jitter`` is the half-width of the uniform
    relative perturbation of each inspection time (0.15 for +-15%).
    """

    benign: BenignSourceConfig
    floods: tuple[FloodConfig, ...] = ()
    qdtp: Optional[QdtpConfig] = None
    detector: DetectorConfig = DetectorConfig()
    aam: Optional[AamConfig] = None
    horizon: int = 60_000 * NS_PER_MS
    seed: int = 0
    cost: CostWeights = CostWeights()
    adaptive_m: bool = False
    service_jitter: float = 0.0
    flush: bool = False
    name: str = "scenario"

    def __post_init__(self):
        object.__setattr__(self, "floods", tuple(self.floods))
        if self.horizon <= 0:
            raise ConfigError("horizon must be > 0")
        for fl in self.floods:
            upper = fl.x_distribution.upper
            end = fl.start_time + (fl.duration(upper) if upper is not None else 0)
            if end > self.horizon:
                raise ConfigError(f"flood starting at {fl.start_time} ns runs past the horizon")
        if self.aam is not None and self.aam.window_w != self.detector.window_w:
            raise ConfigError("aam.window_w must equal detector.window_w")
        if not 0 <= self.service_jitter < 1:
            raise ConfigError(f"service_jitter must be in [0, 1), got {self.service_jitter}")

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)

    def cost_params(self, flood: Optional[FloodConfig] = None) -> CostParams:
        flood = flood or (self.floods[0] if self.floods else None)
        w = self.detector.window_w
        ex = max(float(w), flood.expected_x) if flood else float(w)
        f = flood.attack_fraction_f if flood else 1.0
        return CostParams(self.cost.alpha, self.cost.beta, f, ex, self.detector.tau_inspect, w)


@dataclass
class SimResult:
    sqf_queue_series: np.ndarray   # (k, 2) int64: t_ns, length
    ad_queue_series: np.ndarray
    outcome: MitigationOutcome
    realized_cost: float           # ns
    peak_ad_queue: int
    peak_sqf_queue: int
    realized_x: list[int] = field(default_factory=list)
    n_packets: int = 0
    ad_drain_time: Optional[int] = None  # first flood start -> AD queue empty after its peak

    @property
    def realized_cost_ms(self) -> float:
        return self.realized_cost / NS_PER_MS


@dataclass(frozen=True)
class RepSummary:
    rep: int
    seed: int
    realized_x: int
    n: int
    delta: int
    benign_dropped: int
    omega_ms: float
    k_ms: float
    cost_ms: float


@dataclass(frozen=True)
class ReplicationResult:
    mean_cost: float   # ns
    ci95: float        # ns, half-width
    per_rep: list[RepSummary]

    @property
    def mean_cost_ms(self) -> float:
        return self.mean_cost / NS_PER_MS

    @property
    def ci95_ms(self) -> float:
        return self.ci95 / NS_PER_MS


# -- pieces ------------------------------------------------------------------

def _child_seeds(seed: int, k: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(k)]


def build_trace(s: Scenario) -> tuple[list[PacketRecord], list[int]]:
    """Merged benign + flood trace and the realized size of each flood."""
    seeds = _child_seeds(s.seed, 3 + len(s.floods))
    parts = [generate_benign(s.benign, s.horizon, seeds[0])]
    xs = []
    for fl, sd in zip(s.floods, seeds[3:]):
        tr, x = generate_flood(fl, sd)
        parts.append(tr)
        xs.append(x)
    return merge_traces(parts), xs


def _detector_seed(s: Scenario) -> int:
    return _child_seeds(s.seed, 3 + len(s.floods))[1] ^ s.detector.seed


def _service_seed(s: Scenario) -> int:
    return _child_seeds(s.seed, 3 + len(s.floods))[2]


def realized_cost(outcome: MitigationOutcome, p: CostParams) -> float:
    """alpha*K + beta*Omega for one run, in ns.

    K re-inspects every wrongly dropped benign packet in W-windows; Omega
    counts only windows tested while mitigating (steady-state inspection is
    not attack overhead).
    """
    k = k_realized(outcome, p)
    omega = outcome.mitigation_windows_n * p.w * p.tau
    return p.alpha * k + p.beta * omega


def k_realized(outcome: MitigationOutcome, p: CostParams) -> int:
    return p.tau * p.w * -(-outcome.dropped_benign // p.w)


def server_departures(arrivals: np.ndarray, service: np.ndarray) -> np.ndarray:
    """FIFO single server: ``dep_i = max(arr_i, dep_{i-1}) + s_i``, vectorized."""
    if arrivals.size == 0:
        return arrivals.copy()
    csum = np.cumsum(service)
    before = csum - service
    return csum + np.maximum.accumulate(arrivals - before)


def queue_series(arrivals: np.ndarray, deps: np.ndarray, cadence: int = SAMPLE_CADENCE) -> np.ndarray:
    """Queue length at every event instant plus a fixed cadence.

    A departure and an arrival at the same instant are both applied before
    the length is read.
    """
    if arrivals.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    t_end = int(max(arrivals[-1], deps.max()))
    grid = np.arange(0, t_end + cadence, cadence, dtype=np.int64)
    t = np.unique(np.concatenate([arrivals, deps, grid]))
    dep_sorted = np.sort(deps)
    q = np.searchsorted(arrivals, t, "right") - np.searchsorted(dep_sorted, t, "right")
    return np.column_stack([t, q]).astype(np.int64)


def _drain_time(series: np.ndarray, origin: Optional[int]) -> Optional[int]:
    if origin is None or series.size == 0:
        return None
    k_peak = int(np.argmax(series[:, 1]))
    if series[k_peak, 0] < origin:
        return None
    empty = np.nonzero(series[k_peak:, 1] == 0)[0]
    if empty.size == 0:
        return None
    return int(series[k_peak + empty[0], 0]) - origin


def _episode_m_picker(s: Scenario, arrivals: np.ndarray):
    starts = np.array([fl.start_time for fl in s.floods], dtype=np.int64)
    order = np.argsort(starts, kind="stable")

    def pick(i: int) -> int:
        t = arrivals[i]
        k = int(np.searchsorted(starts[order], t, "right")) - 1
        flood = s.floods[order[max(k, 0)]]
        return optimal_m(s.cost_params(flood))

    return pick


def mitigate_scenario(s: Scenario, trace: Sequence[PacketRecord], skip_m: Optional[int] = None):
    """Run the scenario's AAM over ``trace``; returns (outcome, fate array)."""
    arrivals, is_attack = trace_arrays(trace)
    seqs = np.arange(len(trace), dtype=np.int64)
    aam = s.aam if skip_m is None else replace(s.aam, skip_m=skip_m)
    picker = _episode_m_picker(s, arrivals) if (s.adaptive_m and skip_m is None and s.floods) else None
    rng = np.random.default_rng(_detector_seed(s))
    return mitigate_arrays(is_attack, seqs, aam, s.detector, rng, flush=s.flush, m_for_episode=picker)


# -- drivers -----------------------------------------------------------------

def run_scenario(s: Scenario) -> SimResult:
    trace, xs = build_trace(s)
    arrivals, _ = trace_arrays(trace)
    n = arrivals.size
    tau = s.detector.tau_inspect

    if s.qdtp is not None:
        fwd = departures(arrivals, s.qdtp.d_spacing)
        sqf_series = queue_series(arrivals, fwd)
    else:
        fwd = arrivals
        sqf_series = np.zeros((0, 2), dtype=np.int64)

    if s.aam is not None:
        outcome, fate = mitigate_scenario(s, trace)
        to_ad = np.isin(fate, np.array(INSPECTED, dtype=np.int8))
    else:
        # Detection only: every packet is inspected and forwarded.
        outcome = MitigationOutcome(s.detector.window_w, tau, forwarded_total=n, consumed=n)
        to_ad = np.ones(n, dtype=bool)

    ad_arr = fwd[to_ad]
    if s.service_jitter:
        rng = np.random.default_rng(_service_seed(s))
        service = np.rint(tau * (1 + rng.uniform(-s.service_jitter, s.service_jitter, ad_arr.size)))
        service = service.astype(np.int64)
    else:
        service = np.full(ad_arr.size, tau, dtype=np.int64)
    ad_series = queue_series(ad_arr, server_departures(ad_arr, service))

    first_flood = min((fl.start_time for fl in s.floods), default=None)
    return SimResult(
        sqf_queue_series=sqf_series,
        ad_queue_series=ad_series,
        outcome=outcome,
        realized_cost=realized_cost(outcome, s.cost_params()),
        peak_ad_queue=int(ad_series[:, 1].max()) if ad_series.size else 0,
        peak_sqf_queue=int(sqf_series[:, 1].max()) if sqf_series.size else 0,
        realized_x=xs,
        n_packets=n,
        ad_drain_time=_drain_time(ad_series, first_flood),
    )


def replication_seeds(s: Scenario, reps: int) -> list[int]:
    return _child_seeds(s.seed, reps)


def _summarize(rep: int, seed: int, xs: list[int], outcome: MitigationOutcome, p: CostParams) -> RepSummary:
    k = k_realized(outcome, p)
    return RepSummary(
        rep=rep, seed=seed, realized_x=sum(xs), n=outcome.mitigation_windows_n,
        delta=outcome.dropped_total, benign_dropped=outcome.dropped_benign,
        omega_ms=outcome.mitigation_windows_n * p.w * p.tau / NS_PER_MS,
        k_ms=k / NS_PER_MS, cost_ms=realized_cost(outcome, p) / NS_PER_MS,
    )


def _rep_worker(args):
    s, rep, seed = args
    r = run_scenario(s.with_seed(seed))
    return _summarize(rep, seed, r.realized_x, r.outcome, s.cost_params())


def _mean_ci(costs_ns: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(costs_ns))
    if costs_ns.size < 2:
        return mean, 0.0
    return mean, float(1.96 * np.std(costs_ns, ddof=1) / math.sqrt(costs_ns.size))


def run_replications(s: Scenario, reps: int, workers: Optional[int] = None) -> ReplicationResult:
    """``reps`` independent runs with seeds spawned from ``s.seed``.

    ``workers > 1`` fans the runs out to processes; results do not depend on it.
    """
    if reps < 1:
        raise ConfigError(f"reps must be >= 1, got {reps}")
    jobs = [(s, i, sd) for i, sd in enumerate(replication_seeds(s, reps))]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            per_rep = list(ex.map(_rep_worker, jobs))
    else:
        per_rep = [_rep_worker(j) for j in jobs]
    mean, ci = _mean_ci(np.array([r.cost_ms for r in per_rep]) * NS_PER_MS)
    return ReplicationResult(mean, ci, per_rep)


@dataclass(frozen=True)
class SweepRow:
    m: int
    analytic_ms: float
    sim_mean_ms: float
    sim_ci95_ms: float


def sweep_m(s: Scenario, m_grid: Sequence[int], reps: int) -> list[SweepRow]:
    """Mean realized cost against a grid of fixed skip lengths.

    Each replication's trace and detector stream are shared across the grid
    (common random numbers); for any single m the per-rep costs equal those
    of :func:`run_replications` on the scenario with that ``skip_m``.
    """
    if not len(m_grid):
        raise ConfigError("empty m grid")
    if s.aam is None:
        raise ConfigError("sweep needs an [aam] section")
    if reps < 1:
        raise ConfigError(f"reps must be >= 1, got {reps}")
    p = s.cost_params()
    fixed = replace(s, adaptive_m=False)
    costs = np.empty((len(m_grid), reps))
    for r, seed in enumerate(replication_seeds(s, reps)):
        rs = fixed.with_seed(seed)
        trace, _ = build_trace(rs)
        for j, m in enumerate(m_grid):
            outcome, _ = mitigate_scenario(rs, trace, skip_m=int(m))
            costs[j, r] = realized_cost(outcome, p)
    analytic = cost_curve(p, np.asarray(m_grid))
    rows = []
    for j, m in enumerate(m_grid):
        mean, ci = _mean_ci(costs[j])
        rows.append(SweepRow(int(m), float(analytic[j]) / NS_PER_MS, mean / NS_PER_MS, ci / NS_PER_MS))
    return rows

"""CSV readers and writers for traces, shaped traces, episodes, sweeps and series.

Every file has a mandatory header row. Floats are written with fixed
precision so identical runs give byte-identical files.
"""
from __future__ import annotations

import csv
from typing import IO, Iterable, Sequence

import numpy as np

from .aam import MitigationOutcome
from .costmodel import CostParams, total_cost
from .errors import ParseError
from .qdtp import ShapedPacket
from .sim import RepSummary, SweepRow
from .traffic import Label, PacketRecord

TRACE_HEADER = ["seq", "arrival_ns", "label", "source_id"]
SHAPED_HEADER = ["seq", "arrival_ns", "departure_ns", "delay_ns", "label"]
EPISODE_HEADER = ["episode", "start_seq", "end_seq", "n_windows", "delta_dropped",
                  "benign_dropped", "omega_ns"]
COST_SWEEP_HEADER = ["m", "e_n", "e_omega_ms", "e_k_ms", "c_total_ms"]
CURVE_HEADER = ["ex", "beta_over_alpha", "m_star"]
SERIES_HEADER = ["t_ns", "sqf_queue", "ad_queue"]
REPS_HEADER = ["rep", "seed", "realized_x", "n", "delta", "benign_dropped", "omega_ms",
               "k_ms", "cost_ms"]
SIM_SWEEP_HEADER = ["m", "analytic_c_ms", "sim_mean_ms", "sim_ci95_ms"]


def _f(x: float) -> str:
    return f"{x:.6f}"


def _writer(fh: IO[str], header: Sequence[str]):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    return w


def write_trace(fh: IO[str], trace: Iterable[PacketRecord]) -> None:
    w = _writer(fh, TRACE_HEADER)
    for p in trace:
        w.writerow([p.seq, p.arrival_time, p.label.name, p.source_id])


def read_trace(fh: IO[str]) -> list[PacketRecord]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != TRACE_HEADER:
        raise ParseError(f"expected header {','.join(TRACE_HEADER)}", line=1)
    out = []
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", line=line)
        try:
            seq, arrival, source = int(row[0]), int(row[1]), int(row[3])
            label = Label[row[2].strip().upper()]
        except (ValueError, KeyError):
            raise ParseError(f"malformed row {row!r}", line=line) from None
        if out and arrival < out[-1].arrival_time:
            raise ParseError("arrival_ns decreases", line=line)
        out.append(PacketRecord(arrival, label, source, seq))
    return out


def write_shaped(fh: IO[str], shaped: Iterable[ShapedPacket]) -> None:
    w = _writer(fh, SHAPED_HEADER)
    for sp in shaped:
        w.writerow([sp.packet.seq, sp.packet.arrival_time, sp.departure, sp.delay, sp.packet.label.name])


def write_episodes(fh: IO[str], outcome: MitigationOutcome) -> None:
    w = _writer(fh, EPISODE_HEADER)
    for k, e in enumerate(outcome.episodes):
        w.writerow([k, e.start_seq, "" if e.end_seq is None else e.end_seq, e.n_windows,
                    e.delta_dropped, e.benign_dropped, e.omega_ns])


def write_cost_sweep(fh: IO[str], p: CostParams, ms: Iterable[int]) -> None:
    w = _writer(fh, COST_SWEEP_HEADER)
    for m in ms:
        r = total_cost(p, int(m))
        w.writerow([r.at_m, _f(r.e_n), _f(r.e_omega_ms), _f(r.e_k_ms), _f(r.c_total_ms)])


def write_curve(fh: IO[str], rows: Iterable[tuple[float, float, int]]) -> None:
    w = _writer(fh, CURVE_HEADER)
    for ex, ratio, m in rows:
        w.writerow([_f(ex), _f(ratio), m])


def write_series(fh: IO[str], sqf: np.ndarray, ad: np.ndarray) -> None:
    """Both queue step functions on the union of their sample instants."""
    t = np.union1d(sqf[:, 0] if sqf.size else [], ad[:, 0] if ad.size else []).astype(np.int64)

    def at(series):
        if not series.size:
            return np.zeros(t.size, dtype=np.int64)
        k = np.searchsorted(series[:, 0], t, "right") - 1
        return np.where(k >= 0, series[np.maximum(k, 0), 1], 0)

    w = _writer(fh, SERIES_HEADER)
    w.writerows(zip(t.tolist(), at(sqf).tolist(), at(ad).tolist()))


def write_replications(fh: IO[str], reps: Iterable[RepSummary]) -> None:
    w = _writer(fh, REPS_HEADER)
    for r in reps:
        w.writerow([r.rep, r.seed, r.realized_x, r.n, r.delta, r.benign_dropped,
                    _f(r.omega_ms), _f(r.k_ms), _f(r.cost_ms)])


def write_sim_sweep(fh: IO[str], rows: Iterable[SweepRow]) -> None:
    w = _writer(fh, SIM_SWEEP_HEADER)
    for r in rows:
        w.writerow([r.m, _f(r.analytic_ms), _f(r.sim_mean_ms), _f(r.sim_ci95_ms)])

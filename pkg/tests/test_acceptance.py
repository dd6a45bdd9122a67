"""Acceptance gate: one test per exit criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from gateway_shield.aam import AamConfig, mitigate_arrays
from gateway_shield.costmodel import (CostParams, brute_force_m, exact_windows, expected_windows,
                                      mstar_continuous, mstar_curve, optimal_m)
from gateway_shield.detector import DetectorConfig
from gateway_shield.qdtp import QdtpConfig, delay_recursion, shape_trace
from gateway_shield.scenario import load_scenario
from gateway_shield.sim import CostWeights, Scenario, run_scenario, sweep_m
from gateway_shield.traffic import (BenignSourceConfig, Constant, FloodConfig, Label, PacketRecord)

MS = 1_000_000
S = 1_000_000_000
RESULTS: list[str] = []


def record(num, title, ok, detail, elapsed, limit):
    in_time = elapsed < limit
    line = (f"[{'PASS' if ok and in_time else 'FAIL'}] criterion {num:>2}: {title} -- {detail} "
            f"({elapsed:.2f}s / limit {limit:.0f}s)")
    RESULTS.append(line)
    print(line)
    assert ok, line
    assert in_time, line


def random_traces(rng, count):
    """Yield (D, trace, gaps) with bursts (gap < D) mixed with idle gaps (up to 4D)."""
    ds = rng.integers(0, 5 * MS, count)
    ns = rng.integers(1, 60, count)
    u = rng.random(ns.sum())
    burst = rng.random(ns.sum()) < 0.5
    pos = 0
    for d, n in zip(ds.tolist(), ns.tolist()):
        span = np.where(burst[pos:pos + n - 1], max(d, 1), 4 * max(d, 1) + 1)
        gaps = (u[pos:pos + n - 1] * span).astype(np.int64)
        pos += n
        t = np.concatenate([[0], np.cumsum(gaps)]) + 10**9
        yield d, [PacketRecord(a, Label.BENIGN, 0, i) for i, a in enumerate(t.tolist())], gaps


def test_c01_qdtp_pacing():
    # the clock covers shaping and checking; building the input records is excluded
    elapsed = 0.0
    rng = np.random.default_rng(1)
    violations = checked = 0
    for d, trace, _ in random_traces(rng, 10**5):
        t0 = time.perf_counter()
        dep = [sp.departure for sp in shape_trace(trace, QdtpConfig(d))]
        violations += sum(b - a < d for a, b in zip(dep, dep[1:]))
        checked += len(dep) - 1
        elapsed += time.perf_counter() - t0
    record(1, "QDTP pacing t[n+1]-t[n] >= D", violations == 0,
           f"{violations} violations over {checked} departure pairs in 1e5 traces",
           elapsed, 10)


def test_c02_recursion_equivalence():
    elapsed = 0.0
    rng = np.random.default_rng(2)
    mismatches = 0
    for d, trace, gaps in random_traces(rng, 10**4):
        t0 = time.perf_counter()
        via_departures = [sp.delay for sp in shape_trace(trace, QdtpConfig(d))]
        via_recursion = delay_recursion(gaps.tolist(), QdtpConfig(d))
        mismatches += via_departures != via_recursion
        elapsed += time.perf_counter() - t0
    record(2, "shape_trace == delay_recursion", mismatches == 0,
           f"{mismatches} mismatching traces of 1e4", elapsed, 5)


def test_c03_closed_form_vs_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    compared = skipped = worst = 0
    for _ in range(1000):
        a, b = rng.uniform(0.1, 10, 2)
        w = int(rng.integers(2, 101))
        ex = float(10 ** rng.uniform(math.log10(w), 6))
        p = CostParams(a, b, 1.0, ex, 3 * MS, w)
        m_max = int(4 * math.sqrt(b / a * w * ex)) + 10
        m_bf, _ = brute_force_m(p, m_max)
        if mstar_continuous(p) < 1 or m_bf in (1, m_max):
            skipped += 1
            continue
        compared += 1
        worst = max(worst, abs(optimal_m(p) - m_bf))
    record(3, "|optimal_m - brute_force_m| <= 1", worst <= 1 and compared > 900,
           f"max gap {worst} over {compared} params ({skipped} clamp-bound skipped)",
           time.perf_counter() - t0, 30)


def unimodal(mean, ci):
    k = int(np.argmin(mean))
    tol = ci[:-1] + ci[1:]
    d = np.diff(mean)
    return bool(np.all(d[:k] <= tol[:k]) and np.all(d[k:] >= -tol[k:]))


def test_c04_cost_curve_constant_x():
    t0 = time.perf_counter()
    benign = BenignSourceConfig(period=S, source_count=10, jitter=5 * MS)
    det = DetectorConfig(tpr=1, tnr=1, tau_inspect=3 * MS, window_w=20)
    details, ok = [], True
    for ex, grid in [(1000, range(20, 401, 20)), (10_000, range(60, 1201, 60))]:
        s = Scenario(benign, (FloodConfig(5 * S, Constant(ex), 1.0, 15_000),), None, det,
                     AamConfig(20, 80), horizon=120 * S, seed=42, cost=CostWeights(1, 1))
        rows = sweep_m(s, list(grid), reps=30)
        mean = np.array([r.sim_mean_ms for r in rows])
        ci = np.array([r.sim_ci95_ms for r in rows])
        m_star = optimal_m(s.cost_params())
        m_best = rows[int(np.argmin(mean))].m
        uni = unimodal(mean, ci)
        near = abs(m_best - m_star) <= 0.25 * m_star
        ok &= uni and near
        details.append(f"E[X]={ex}: argmin {m_best} vs m* {m_star}, unimodal={uni}")
    record(4, "simulated cost unimodal, argmin within 25% of m*", ok, "; ".join(details),
           time.perf_counter() - t0, 120)


def test_c05_mstar_curve_shape():
    t0 = time.perf_counter()
    exs = np.logspace(3, 6, 31)
    ok, details = True, []
    for ratio in (0.5, 1.0, 2.0):
        rows = mstar_curve(20, ratio, exs)
        ms = np.array([m for _, m in rows], dtype=float)
        slope = np.polyfit(np.log(exs - 20), np.log(ms + 20), 1)[0]
        mono = bool(np.all(np.diff(ms) >= 0))
        ok &= mono and abs(slope - 0.5) <= 0.05
        details.append(f"b/a={ratio}: slope {slope:.4f}, monotone={mono}")
    record(5, "m* curve monotone, log-log slope 0.50 +- 0.05", ok, "; ".join(details),
           time.perf_counter() - t0, 1)


def test_c06_backlog_without_sqf():
    t0 = time.perf_counter()
    s = load_scenario("fig4_baseline")
    r = run_scenario(s)
    x, rate, tau = r.realized_x[0], s.floods[0].attack_rate, s.detector.tau_inspect
    duration = x / rate
    fluid_peak = x - duration * S / tau
    fluid_drain = x * tau / S
    peak_err = abs(r.peak_ad_queue - fluid_peak) / fluid_peak
    drain_err = abs(r.ad_drain_time / S - fluid_drain) / fluid_drain
    record(6, "no-SQF backlog matches fluid bound", peak_err <= 0.05 and drain_err <= 0.05,
           f"peak {r.peak_ad_queue} vs {fluid_peak:.0f} ({peak_err:.2%}); drain "
           f"{r.ad_drain_time / S:.1f}s vs {fluid_drain:.0f}s ({drain_err:.2%})",
           time.perf_counter() - t0, 30)


def test_c07_bounded_queue_with_sqf():
    t0 = time.perf_counter()
    plain = run_scenario(load_scenario("fig4_sqf"))
    jitter = run_scenario(load_scenario("fig4_sqf_jitter"))
    ok = plain.peak_ad_queue <= 2 and jitter.peak_ad_queue <= 30
    record(7, "SQF keeps AD queue <= 2 (deterministic) / <= 30 (+-15% jitter)", ok,
           f"deterministic peak {plain.peak_ad_queue}, jittered peak {jitter.peak_ad_queue}",
           time.perf_counter() - t0, 30)


def test_c08_aam_accounting():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    aligned = straddle = bad = 0
    while aligned < 1000:
        w = int(rng.integers(1, 41))
        m = int(rng.integers(1, 301))
        x = int(rng.integers(w + 1, 20 * (m + w)))
        lead = w * int(rng.integers(0, 5))  # attack starts on a window boundary
        truth = np.r_[np.zeros(lead, bool), np.ones(x, bool), np.zeros(2 * (m + w), bool)]
        det = DetectorConfig(tpr=1, tnr=1, window_w=w)
        out, _ = mitigate_arrays(truth, np.arange(truth.size), AamConfig(w, m), det,
                                 np.random.default_rng(0))
        j0 = int(exact_windows(x, w, m))
        closing_start = j0 * (m + w)  # attack offset of the window tested in cycle j0
        in_closing = max(0, min(x, closing_start + w) - closing_start)
        n, delta = out.mitigation_windows_n, out.dropped_total
        if 2 * in_closing <= w:
            aligned += 1
            bad += not (n == j0 and delta == w + n * (m + w) - w)
        else:
            # the attack ends inside a tested window with an attack majority: one more cycle
            straddle += 1
            bad += not (n == j0 + 1 and delta == w + n * (m + w) - w)
    record(8, "realized N = ceil((X-W)/(m+W)), delta = W + N(m+W) - W", bad == 0,
           f"{bad} mismatches over {aligned} boundary-aligned triples "
           f"(+{straddle} straddling draws checked against N+1)", time.perf_counter() - t0, 20)


def test_c09_first_order_window_approximation():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    worst, cells = 0.0, 0
    for ex in (1_000, 10_000, 100_000):
        xs = rng.integers(math.ceil(0.5 * ex), math.floor(1.5 * ex), 10**4, endpoint=True)
        for w in (5, 20, 50):
            for stride in ((ex - w) / 5, (ex - w) / 20, (ex - w) / 100):
                m = int(stride) - w
                if m < 1:
                    continue
                p = CostParams(expected_x=ex, w=w)
                err = abs(exact_windows(xs, w, m).mean() - expected_windows(p, m)) / expected_windows(p, m)
                worst, cells = max(worst, err), cells + 1
    record(9, "E[N] first-order approximation within 5%", worst <= 0.05,
           f"worst relative error {worst:.2%} over {cells} grid cells", time.perf_counter() - t0, 30)


def test_c10_two_attack_timeline():
    t0 = time.perf_counter()
    s = load_scenario("fig6_two_attacks")
    r = run_scenario(s)
    w = s.detector.window_w
    eps = r.outcome.episodes
    ms = [e.skip_m for e in eps]
    ok = (r.peak_ad_queue <= w + 10 and len(eps) == 2
          and 110 <= ms[0] <= 145 and 230 <= ms[1] <= 285)
    record(10, "two floods: AD queue <= W+10, two episodes, m* per episode", ok,
           f"peak AD queue {r.peak_ad_queue}, episodes {len(eps)}, m* {ms} "
           f"(beta/alpha={s.cost.beta / s.cost.alpha})", time.perf_counter() - t0, 60)


def test_c11_mstar_invariance():
    t0 = time.perf_counter()
    distinct = set()
    for tau in np.logspace(5, 7, 9).astype(int):  # 0.1 ms .. 10 ms
        for f in (0.001, 0.1, 0.5, 0.9, 1.0):
            distinct.add(optimal_m(CostParams(alpha=1.5, beta=4.0, f=f, expected_x=50_000, tau=int(tau), w=20)))
    record(11, "m* invariant to tau and f", len(distinct) == 1, f"distinct m* values {sorted(distinct)}",
           time.perf_counter() - t0, 1)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))

"""Command-line front end: ``gateway-shield {shape,optimize,simulate,sweep}``.

All commands write CSV into ``--out`` and print a short summary. Exit codes:
0 success, 2 configuration error, 3 input parse error, 4 verification failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import csvio
from .costmodel import (CostParams, brute_force_m, mstar_continuous, mstar_curve, optimal_cost,
                        optimal_m, total_cost)
from .errors import ConfigError, InvalidInputError, ParseError, VerificationError
from .qdtp import QdtpConfig, shape_trace
from .scenario import load_scenario
from .sim import run_replications, run_scenario, sweep_m
from .traffic import NS_PER_MS

SEED_ENV = "GATEWAY_SHIELD_SEED"
EXIT_OK, EXIT_CONFIG, EXIT_PARSE, EXIT_VERIFY = 0, 2, 3, 4


def _resolve_seed(arg: Optional[int]) -> Optional[int]:
    if arg is not None:
        return arg
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return None
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _outdir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    return out


def _ms_to_ns(ms: float) -> int:
    return int(round(ms * NS_PER_MS))


def search_limit(p: CostParams) -> int:
    """Exhaustive-search bound from the problem scale, comfortably past m*."""
    return max(10, 4 * math.ceil(math.sqrt(p.beta_over_alpha * p.w * p.expected_x)))


def parse_grid(text: str) -> list[int]:
    """``"20:400:20"`` (inclusive range) or ``"20,40,60"``."""
    try:
        if ":" in text:
            lo, hi, step = (int(v) for v in text.split(":"))
            grid = list(range(lo, hi + 1, step))
        else:
            grid = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad m grid {text!r}") from None
    if not grid:
        raise ConfigError("empty m grid")
    return grid


# -- commands ----------------------------------------------------------------

def cmd_shape(args) -> int:
    try:
        with open(args.trace) as fh:
            trace = csvio.read_trace(fh)
    except FileNotFoundError:
        raise ConfigError(f"trace file not found: {args.trace}") from None
    cfg = QdtpConfig(_ms_to_ns(args.d_ms))
    shaped = shape_trace(trace, cfg)
    out = _outdir(args.out)
    with open(out / "shaped.csv", "w", newline="") as fh:
        csvio.write_shaped(fh, shaped)
    deps = [sp.departure for sp in shaped]
    violations = sum(1 for a, b in zip(deps, deps[1:]) if b - a < cfg.d_spacing)
    max_delay = max((sp.delay for sp in shaped), default=0)
    print(f"packets={len(shaped)} max_delay_ms={max_delay / NS_PER_MS:.3f} spacing_violations={violations}")
    return EXIT_OK if violations == 0 else EXIT_VERIFY


def cmd_optimize(args) -> int:
    p = CostParams(args.alpha, args.beta, args.f, args.ex, _ms_to_ns(args.tau_ms), args.w)
    raw = mstar_continuous(p)
    m_star = optimal_m(p)
    if raw < 1:
        print(f"warning: closed-form optimum {raw:.2f} is below 1; clamped to m*=1", file=sys.stderr)
    c_star = optimal_cost(p)
    m_max = args.m_max or search_limit(p)
    out = _outdir(args.out)
    with open(out / "cost_sweep.csv", "w", newline="") as fh:
        csvio.write_cost_sweep(fh, p, range(1, m_max + 1))
    print(f"m_star={m_star} m_star_continuous={raw:.3f}")
    print(f"c_star_ms={c_star / NS_PER_MS:.3f} c_at_m_star_ms={total_cost(p, m_star).c_total_ms:.3f}")
    if args.curve:
        ratios = [float(r) for r in args.curve.split(",")]
        exs = np.unique(np.round(np.logspace(math.log10(max(p.w, 100)), 6, 41)))
        rows = [(ex, r, m) for r in ratios for ex, m in mstar_curve(p.w, r, exs)]
        with open(out / "curve.csv", "w", newline="") as fh:
            csvio.write_curve(fh, rows)
    if args.verify:
        m_bf, _ = brute_force_m(p, m_max)
        print(f"brute_force_m={m_bf} (searched 1..{m_max})")
        if abs(m_bf - m_star) > 1:
            raise VerificationError(f"closed form m*={m_star} disagrees with exhaustive argmin {m_bf}")
    return EXIT_OK


def _write_sim_outputs(out: Path, result, reps_result) -> None:
    with open(out / "timeseries.csv", "w", newline="") as fh:
        csvio.write_series(fh, result.sqf_queue_series, result.ad_queue_series)
    with open(out / "episodes.csv", "w", newline="") as fh:
        csvio.write_episodes(fh, result.outcome)
    with open(out / "replications.csv", "w", newline="") as fh:
        csvio.write_replications(fh, reps_result.per_rep)


def cmd_simulate(args) -> int:
    s = load_scenario(args.scenario, args.set, _resolve_seed(args.seed))
    if args.flush:
        s = replace(s, flush=True)
    result = run_scenario(s)
    reps = run_replications(s, args.reps, workers=args.workers)
    out = _outdir(args.out)
    _write_sim_outputs(out, result, reps)
    if args.write_trace:
        from .sim import build_trace
        with open(out / "trace.csv", "w", newline="") as fh:
            csvio.write_trace(fh, build_trace(s)[0])
    o = result.outcome
    print(f"scenario={s.name} seed={s.seed} packets={result.n_packets} realized_x={result.realized_x}")
    print(f"peak_sqf_queue={result.peak_sqf_queue} peak_ad_queue={result.peak_ad_queue}")
    if result.ad_drain_time is not None:
        print(f"ad_drain_s={result.ad_drain_time / 1e9:.3f}")
    print(f"episodes={len(o.episodes)} dropped={o.dropped_total} benign_dropped={o.dropped_benign} "
          f"forwarded={o.forwarded_total} buffered={o.buffered}")
    for k, e in enumerate(o.episodes):
        print(f"  episode {k}: m={e.skip_m} n_windows={e.n_windows} dropped={e.delta_dropped} "
              f"seq={e.start_seq}..{e.end_seq}")
    print(f"mean_cost_ms={reps.mean_cost_ms:.3f} ci95_ms={reps.ci95_ms:.3f} reps={args.reps}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    s = load_scenario(args.scenario, args.set, _resolve_seed(args.seed))
    grid = parse_grid(args.m_grid)
    rows = sweep_m(s, grid, args.reps)
    out = _outdir(args.out)
    with open(out / "sweep.csv", "w", newline="") as fh:
        csvio.write_sim_sweep(fh, rows)
    best = min(rows, key=lambda r: r.sim_mean_ms)
    print(f"{'m':>6} {'analytic_ms':>12} {'sim_mean_ms':>12} {'ci95_ms':>9}")
    for r in rows:
        print(f"{r.m:6d} {r.analytic_ms:12.3f} {r.sim_mean_ms:12.3f} {r.sim_ci95_ms:9.3f}")
    print(f"sim_argmin_m={best.m} closed_form_m_star={optimal_m(s.cost_params())}")
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gateway-shield", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, scenario=True):
        sp.add_argument("--out", default="results", help="output directory (default: results)")
        if scenario:
            sp.add_argument("scenario", help="scenario .ini path or bundled name")
            sp.add_argument("--seed", type=int, default=None,
                            help=f"override the scenario seed (fallback: ${SEED_ENV})")
            sp.add_argument("--reps", type=int, default=30)
            sp.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")

    sp = sub.add_parser("shape", help="apply the QDTP forwarder to a trace CSV")
    sp.add_argument("trace")
    sp.add_argument("--d-ms", type=float, default=3.0, help="minimum departure spacing D in ms")
    common(sp, scenario=False)
    sp.set_defaults(func=cmd_shape)

    sp = sub.add_parser("optimize", help="closed-form optimal skip length and cost sweep")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--f", type=float, default=1.0)
    sp.add_argument("--ex", type=float, required=True, help="expected packets per attack, E[X]")
    sp.add_argument("--tau-ms", type=float, default=3.0)
    sp.add_argument("--w", type=int, default=20)
    sp.add_argument("--m-max", type=int, default=None)
    sp.add_argument("--verify", action="store_true", help="check m* against an exhaustive search")
    sp.add_argument("--curve", default=None, metavar="RATIOS",
                    help="comma-separated beta/alpha values; writes curve.csv of m* against E[X]")
    common(sp, scenario=False)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("simulate", help="run a scenario and its replications")
    common(sp)
    sp.add_argument("--flush", action="store_true", help="forward a trailing partial window untested")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--write-trace", action="store_true")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="simulated and analytic cost against a grid of m")
    common(sp)
    sp.add_argument("--m-grid", default="20:400:20")
    sp.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigError, InvalidInputError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())

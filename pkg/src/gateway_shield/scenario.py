"""Scenario files: a flat INI schema, plus the bundled example scenarios.

Sections and keys (times carry their unit in the key name)::

    [scenario]  name, seed, horizon_s, service_jitter, flush
    [benign]    mode (periodic|poisson), period_ms, source_count, jitter_ms
    [flood]     start_s, x, attack_fraction, rate_pps, source_id
                (repeat as [flood.2], [flood.3], ... for more bursts)
                x is "constant N", "uniform LO HI", "around MEAN [SPREAD]"
                or "geometric MEAN"
    [qdtp]      enabled, d_ms
    [detector]  tpr, tnr, tau_ms, window_w, seed
    [aam]       enabled, skip_m (an integer, or "auto" for per-episode m*)
    [cost]      alpha, beta
"""
from __future__ import annotations

import configparser
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

from .aam import AamConfig
from .detector import DetectorConfig
from .errors import ConfigError
from .qdtp import QdtpConfig
from .sim import CostWeights, Scenario
from .traffic import (NS_PER_MS, NS_PER_S, BenignSourceConfig, Constant, FloodConfig,
                      Geometric, Uniform, XDistribution)

BUNDLED = ("fig4_baseline", "fig4_sqf", "fig4_sqf_jitter", "fig5_sweep", "fig6_two_attacks")

_KEYS = {
    "scenario": {"name", "seed", "horizon_s", "service_jitter", "flush"},
    "benign": {"mode", "period_ms", "source_count", "jitter_ms"},
    "flood": {"start_s", "x", "attack_fraction", "rate_pps", "source_id"},
    "qdtp": {"enabled", "d_ms"},
    "detector": {"tpr", "tnr", "tau_ms", "window_w", "seed"},
    "aam": {"enabled", "skip_m"},
    "cost": {"alpha", "beta"},
}


def _kind(section: str) -> str:
    return "flood" if section == "flood" or section.startswith("flood.") else section


def parse_x(text: str) -> XDistribution:
    parts = text.split()
    try:
        kind, args = parts[0].lower(), [float(a) for a in parts[1:]]
        if kind == "constant" and len(args) == 1:
            return Constant(int(args[0]))
        if kind == "uniform" and len(args) == 2:
            return Uniform(int(args[0]), int(args[1]))
        if kind == "around" and len(args) in (1, 2):
            return Uniform.around(*args)
        if kind == "geometric" and len(args) == 1:
            return Geometric(args[0])
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"bad x distribution {text!r}: {exc}") from None
    raise ConfigError(f"bad x distribution {text!r}")


def _ns(sec: configparser.SectionProxy, key: str, unit: int, default: float) -> int:
    return int(round(sec.getfloat(key, default) * unit))


def apply_overrides(cp: configparser.ConfigParser, overrides: Iterable[str]) -> None:
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, option = key.strip().rpartition(".")
        if not sep or not dot:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        if _kind(section) not in _KEYS or option not in _KEYS[_kind(section)]:
            raise ConfigError(f"unknown override key {key!r}")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, option, value.strip())


def scenario_from_config(cp: configparser.ConfigParser) -> Scenario:
    for section in cp.sections():
        kind = _kind(section)
        if kind not in _KEYS:
            raise ConfigError(f"unknown section [{section}]")
        extra = set(cp[section]) - _KEYS[kind]
        if extra:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(extra)}")
    get = lambda name: cp[name] if cp.has_section(name) else cp[configparser.DEFAULTSECT]
    try:
        sc, bn, dt, cs = get("scenario"), get("benign"), get("detector"), get("cost")
        benign = BenignSourceConfig(
            period=_ns(bn, "period_ms", NS_PER_MS, 1000),
            source_count=bn.getint("source_count", 1),
            jitter=_ns(bn, "jitter_ms", NS_PER_MS, 0),
            mode=bn.get("mode", "periodic"),
        )
        floods = []
        for section in cp.sections():
            if _kind(section) != "flood":
                continue
            fs = cp[section]
            if "x" not in fs:
                raise ConfigError(f"[{section}] needs an x distribution")
            floods.append(FloodConfig(
                start_time=_ns(fs, "start_s", NS_PER_S, 0),
                x_distribution=parse_x(fs["x"]),
                attack_fraction_f=fs.getfloat("attack_fraction", 1.0),
                attack_rate=fs.getfloat("rate_pps", 15_000.0),
                source_id=fs.getint("source_id", 99),
            ))
        detector = DetectorConfig(
            tpr=dt.getfloat("tpr", DetectorConfig.tpr),
            tnr=dt.getfloat("tnr", DetectorConfig.tnr),
            tau_inspect=_ns(dt, "tau_ms", NS_PER_MS, 3),
            window_w=dt.getint("window_w", 20),
            seed=dt.getint("seed", 0),
        )
        qdtp = None
        if cp.has_section("qdtp") and cp["qdtp"].getboolean("enabled", True):
            qdtp = QdtpConfig(_ns(cp["qdtp"], "d_ms", NS_PER_MS, 3))
        aam, adaptive = None, False
        if cp.has_section("aam") and cp["aam"].getboolean("enabled", True):
            raw = cp["aam"].get("skip_m", "auto").strip().lower()
            adaptive = raw == "auto"
            aam = AamConfig(detector.window_w, 1 if adaptive else int(raw))
        return Scenario(
            benign=benign,
            floods=tuple(floods),
            qdtp=qdtp,
            detector=detector,
            aam=aam,
            horizon=_ns(sc, "horizon_s", NS_PER_S, 60),
            seed=sc.getint("seed", 0),
            cost=CostWeights(cs.getfloat("alpha", 1.0), cs.getfloat("beta", 1.0)),
            adaptive_m=adaptive,
            service_jitter=sc.getfloat("service_jitter", 0.0),
            flush=sc.getboolean("flush", False),
            name=sc.get("name", "scenario"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def read_config(source: Union[str, Path]) -> configparser.ConfigParser:
    """Parse a scenario file, or a bundled scenario given by bare name."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    text = None
    if str(source) in BUNDLED:
        text = resources.files(__package__).joinpath(f"scenarios/{source}.ini").read_text()
    else:
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"scenario file not found: {source}")
        text = path.read_text()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse scenario {source}: {exc}") from None
    return cp


def load_scenario(source: Union[str, Path], overrides: Iterable[str] = (),
                  seed: Optional[int] = None) -> Scenario:
    cp = read_config(source)
    apply_overrides(cp, overrides)
    s = scenario_from_config(cp)
    return s if seed is None else s.with_seed(seed)

"""Attack detector modelled as a noisy per-packet classifier with a window vote.

A packet costs ``tau_inspect`` ns to inspect whatever the outcome. A window of
W verdicts says ATTACK only on a strict majority; ties stay NO_ATTACK.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, InvalidInputError
from .traffic import Label

# measured rates of a trained classifier, used when none are configured
DEFAULT_TPR = 0.9971
DEFAULT_TNR = 0.9848


class Verdict(enum.Enum):
    NO_ATTACK = 0
    ATTACK = 1


@dataclass(frozen=True)
class DetectorConfig:
    tpr: float = DEFAULT_TPR
    tnr: float = DEFAULT_TNR
    tau_inspect: int = 3_000_000
    window_w: int = 20
    seed: int = 0

    def __post_init__(self):
        if not (0 <= self.tpr <= 1 and 0 <= self.tnr <= 1):
            raise ConfigError(f"tpr/tnr must lie in [0, 1], got {self.tpr}, {self.tnr}")
        if self.tau_inspect <= 0:
            raise ConfigError(f"tau_inspect must be > 0, got {self.tau_inspect}")
        if self.window_w < 1:
            raise ConfigError(f"window_w must be >= 1, got {self.window_w}")

    @property
    def perfect(self) -> bool:
        return self.tpr == 1 and self.tnr == 1

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass(frozen=True)
class WindowVerdict:
    verdict: Verdict
    attack_votes: int
    window_start_seq: int
    inspection_cost: int


def classify_packet(cfg: DetectorConfig, truth: Label, rng: np.random.Generator) -> Label:
    """One uniform draw per packet; the caller owns and advances ``rng``."""
    u = rng.random()
    if truth == Label.ATTACK:
        return Label.ATTACK if u < cfg.tpr else Label.BENIGN
    return Label.BENIGN if u < cfg.tnr else Label.ATTACK


def classify_many(cfg: DetectorConfig, is_attack: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Vectorized :func:`classify_packet`; consumes the same draws in the same order."""
    truth = np.asarray(is_attack, dtype=bool)
    u = rng.random(truth.size)
    return np.where(truth, u < cfg.tpr, u >= cfg.tnr)


def window_verdict(cfg: DetectorConfig, truths: Sequence[Label] | np.ndarray,
                   rng: np.random.Generator, window_start_seq: int = 0) -> WindowVerdict:
    truth = np.asarray(truths, dtype=bool)
    if truth.size != cfg.window_w:
        raise InvalidInputError(f"window must hold {cfg.window_w} packets, got {truth.size}")
    votes = int(np.count_nonzero(classify_many(cfg, truth, rng)))
    verdict = Verdict.ATTACK if votes > cfg.window_w // 2 else Verdict.NO_ATTACK
    return WindowVerdict(verdict, votes, window_start_seq, cfg.window_w * cfg.tau_inspect)

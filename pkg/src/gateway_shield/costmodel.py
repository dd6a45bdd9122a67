"""Expected-cost model of adaptive mitigation and its optimal skip length.

With W the window size, m the skip length, X the packets in an attack,
f the attack fraction and tau the per-packet inspection time:

* windows during the attack       N  = ceil((X - W) / (m + W)),
                                  E[N] ~ (E[X] - W)/(m + W) + 1/2
* inspection overhead             E[Omega] = tau * W * E[N]
* packets dropped                 E[delta] ~ E[X] + (m + W)/2
* re-inspection of lost packets   E[K] ~ tau * (f E[X] + m/2 + W)
* total cost                      C(m) = alpha E[K] + beta E[Omega]

Setting dC/dm = 0 gives ``m* = sqrt(2 (beta/alpha) W (E[X] - W)) - W``.

Times are nanoseconds (floats for expectations); ``*_ms`` helpers convert.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidInputError

NS_PER_MS = 1e6


@dataclass(frozen=True)
class CostParams:
    alpha: float = 1.0
    beta: float = 1.0
    f: float = 1.0
    expected_x: float = 1000.0
    tau: int = 3_000_000
    w: int = 20

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or (self.alpha == 0 and self.beta == 0):
            raise InvalidInputError(f"need alpha, beta >= 0 and not both zero, got {self.alpha}, {self.beta}")
        if not 0 < self.f <= 1:
            raise InvalidInputError(f"f must be in (0, 1], got {self.f}")
        if self.w < 1:
            raise InvalidInputError(f"w must be >= 1, got {self.w}")
        if self.tau <= 0:
            raise InvalidInputError(f"tau must be > 0, got {self.tau}")
        if self.expected_x < self.w:
            raise InvalidInputError(f"E[X]={self.expected_x} is below W={self.w}")

    @property
    def beta_over_alpha(self) -> float:
        return math.inf if self.alpha == 0 else self.beta / self.alpha


@dataclass(frozen=True)
class CostReport:
    e_n: float
    e_omega: float
    e_delta: float
    e_k: float
    c_total: float
    at_m: int

    @property
    def e_omega_ms(self) -> float:
        return self.e_omega / NS_PER_MS

    @property
    def e_k_ms(self) -> float:
        return self.e_k / NS_PER_MS

    @property
    def c_total_ms(self) -> float:
        return self.c_total / NS_PER_MS


def _m(m):
    if np.any(np.asarray(m) < 1):
        raise InvalidInputError(f"m must be >= 1, got {m}")
    return float(m) if np.ndim(m) == 0 else np.asarray(m, dtype=float)


def expected_windows(p: CostParams, m):
    return (p.expected_x - p.w) / (_m(m) + p.w) + 0.5


def exact_windows(x, w: int, m):
    """ceil((X - W) / (m + W)) in integer arithmetic; ``x`` may be an array."""
    if np.any(np.asarray(x) < w):
        raise InvalidInputError(f"X must be >= W={w}")
    _m(m)
    num = np.asarray(x, dtype=np.int64) - w
    den = np.asarray(m, dtype=np.int64) + w
    res = -((-num) // den)
    return int(res) if res.ndim == 0 else res


def expected_overhead(p: CostParams, m):
    return p.tau * p.w * expected_windows(p, m)


def expected_drops(p: CostParams, m):
    return p.expected_x + (_m(m) + p.w) / 2


def expected_reprocessing(p: CostParams, m):
    return p.tau * (p.f * p.expected_x + _m(m) / 2 + p.w)


def exact_reprocessing(x: int, delta: int, f: float, w: int, tau: int) -> int:
    """K = tau * W * ceil((f X + delta - X) / W) for one realized attack."""
    lost = f * x + delta - x
    return tau * w * max(0, math.ceil(lost / w - 1e-12))


def total_cost(p: CostParams, m: int) -> CostReport:
    e_k = expected_reprocessing(p, m)
    e_omega = expected_overhead(p, m)
    return CostReport(
        e_n=expected_windows(p, m),
        e_omega=e_omega,
        e_delta=expected_drops(p, m),
        e_k=e_k,
        c_total=p.alpha * e_k + p.beta * e_omega,
        at_m=int(m),
    )


def cost_curve(p: CostParams, m: np.ndarray) -> np.ndarray:
    """C(m) in ns for an array of skip lengths."""
    return p.alpha * expected_reprocessing(p, m) + p.beta * expected_overhead(p, m)


def mstar_continuous(p: CostParams) -> float:
    """Unrounded, unclamped stationary point of C(m)."""
    if p.alpha == 0:
        raise InvalidInputError("alpha = 0: cost decreases without bound in m")
    return math.sqrt(2 * p.beta / p.alpha * p.w * (p.expected_x - p.w)) - p.w


def optimal_m(p: CostParams) -> int:
    """m* rounded to the nearest integer and clamped to >= 1."""
    return max(1, int(round(mstar_continuous(p))))


def optimal_cost(p: CostParams) -> float:
    """C*(AAM): the cost at the continuous optimum, in ns."""
    if p.alpha == 0:
        raise InvalidInputError("alpha = 0: no finite optimum")
    ex, w, tau = p.expected_x, p.w, p.tau
    span = ex - w
    root = math.sqrt(2 * p.beta / p.alpha * w * span)
    reproc = p.alpha * tau * (p.f * ex + math.sqrt(p.beta / (2 * p.alpha) * w * span) + w / 2)
    overhead = p.beta * tau * w * ((span / root if root > 0 else 0.0) + 0.5)
    return reproc + overhead


def brute_force_m(p: CostParams, m_max: int, *, x_samples: Optional[np.ndarray] = None,
                  chunk: int = 1 << 20) -> tuple[int, float]:
    """Exhaustive argmin of the cost over integer m in [1, m_max]; ties -> smallest m.

    With ``x_samples`` the cost is the Monte-Carlo mean of the exact
    (ceiling) counts over the given attack sizes instead of the
    first-order expectation; use this outside the region where
    ``m + W`` is small against ``E[X] - W``.
    """
    if m_max < 1:
        raise InvalidInputError(f"m_max must be >= 1, got {m_max}")
    best_m, best_c = 0, math.inf
    for lo in range(1, m_max + 1, chunk):
        ms = np.arange(lo, min(lo + chunk, m_max + 1))
        c = cost_curve(p, ms) if x_samples is None else _mc_cost_curve(p, ms, x_samples)
        k = int(np.argmin(c))
        if c[k] < best_c:
            best_m, best_c = int(ms[k]), float(c[k])
    return best_m, best_c


def _mc_cost_curve(p: CostParams, ms: np.ndarray, x_samples: np.ndarray) -> np.ndarray:
    xs = np.asarray(x_samples, dtype=np.int64)
    out = np.empty(ms.size)
    for j, m in enumerate(ms):
        n = exact_windows(xs, p.w, int(m))
        delta = p.w + n * (int(m) + p.w)
        lost = p.f * xs + delta - xs
        k = p.tau * p.w * np.maximum(0, np.ceil(lost / p.w - 1e-12))
        omega = n * p.tau * p.w
        out[j] = float(np.mean(p.alpha * k + p.beta * omega))
    return out


def mstar_curve(w: int, beta_over_alpha: float, ex_values: Sequence[float]) -> list[tuple[float, int]]:
    """(E[X], m*) rows; tau and f do not enter m*, so unit values are used."""
    rows = []
    for ex in ex_values:
        p = CostParams(alpha=1.0, beta=beta_over_alpha, f=1.0, expected_x=ex, tau=1, w=w)
        rows.append((float(ex), optimal_m(p)))
    return rows

"""Monte Carlo oracle for the expected detection time.

Each trial walks the trajectory and flips a p-coin at every pass over the
treasure.  Coins come from a counter-based SplitMix64 stream keyed by
(seed, trial, pass), so a result depends only on its inputs and not on the
backend or on how trials are split up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import first_successes
from .errors import CensoredError, DomainError
from .trajectory import Strategy, _check_growth, _check_p, _check_placement, _terms_needed, _walk

CENSOR_PROB = 1e-12


@dataclass(frozen=True)
class SimConfig:
    trials: int = 100_000
    seed: int = 0
    max_crossings: int | None = None

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError("trials must be a positive integer")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must fit in an unsigned 64-bit integer")
        if self.max_crossings is not None and self.max_crossings < 1:
            raise DomainError("max_crossings must be positive")


@dataclass(frozen=True)
class SimResult:
    mean: float
    std_error: float
    trials: int
    censored: int
    mean_crossings: float


def default_max_crossings(s: Strategy, p: float, d: float) -> int:
    """10x the series truncation length, and never fewer passes than make
    an undetected trial rarer than 1e-12."""
    k = _terms_needed(s, p, d, 1e-12)
    floor = math.ceil(math.log(CENSOR_PROB) / math.log1p(-p)) + 1
    return max(10 * k, floor)


def simulate_detection_time(s: Strategy, p: float, d: float, cfg: SimConfig | None = None) -> SimResult:
    cfg = cfg or SimConfig()
    _check_p(p)
    _check_placement(d)
    _check_growth(s, p)
    d = float(d)
    max_k = cfg.max_crossings or default_max_crossings(s, p, d)
    idx, censored = first_successes(cfg.seed, cfg.trials, p, max_k)
    if censored:
        raise CensoredError(censored, max_k)
    hits = np.bincount(idx, minlength=int(idx.max()) + 1)
    times = _walk(s, d, hits.size)
    n = cfg.trials
    mean = float(np.dot(hits, times)) / n
    if n > 1:
        var = float(np.dot(hits, (times - mean) ** 2)) / (n - 1)
    else:
        var = 0.0
    crossings = float(np.dot(hits, np.arange(1, hits.size + 1))) / n
    return SimResult(mean=mean, std_error=math.sqrt(var / n), trials=n,
                     censored=0, mean_crossings=crossings)

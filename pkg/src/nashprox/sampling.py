"""Batch-size schedules, the stochastic gradient oracle, and effort counters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .games import AggregativeGame, Game, QuadraticGame, gradient_map
from .noise import NoiseModel
from .profiles import StrategyProfile


@dataclass(frozen=True)
class GeometricBatch:
    """N_k = ceil(ratio^{-(k+1)}); grows geometrically at rate 1/ratio."""

    ratio: float

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise ValueError(f"batch ratio must lie in (0, 1), got {self.ratio}")

    def size(self, k: int) -> int:
        return math.ceil(self.ratio ** -(k + 1))


@dataclass(frozen=True)
class RootGeometricBatch:
    """N_k = ceil(ratio^{-(k+1)/2}); the square root of the geometric schedule."""

    ratio: float

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise ValueError(f"batch ratio must lie in (0, 1), got {self.ratio}")

    def size(self, k: int) -> int:
        return math.ceil(self.ratio ** (-(k + 1) / 2.0))


@dataclass(frozen=True)
class BestResponseBatch:
    """N_k = ceil(m_max^2 c_r^2 / eta_br^{2k}), floored at one sample.

    m_max bounds the per-player oracle error level, c_r the subproblem
    error gain, and eta_br in (0, 1) the target decay of the batch error.
    """

    m_max: float
    c_r: float
    eta_br: float

    def __post_init__(self):
        if not (self.m_max >= 0.0 and math.isfinite(self.m_max)):
            raise ValueError(f"m_max must be finite and >= 0, got {self.m_max}")
        if not (self.c_r > 0.0 and math.isfinite(self.c_r)):
            raise ValueError(f"c_r must be finite and > 0, got {self.c_r}")
        if not (0.0 < self.eta_br < 1.0):
            raise ValueError(f"eta_br must lie in (0, 1), got {self.eta_br}")

    def size(self, k: int) -> int:
        return max(1, math.ceil((self.m_max * self.c_r) ** 2 *
                                self.eta_br ** (-2 * k)))


@dataclass(frozen=True)
class ConstantBatch:
    """N_k = size for every k (classical fixed mini-batch)."""

    size_value: int

    def __post_init__(self):
        if int(self.size_value) < 1:
            raise ValueError(f"batch size must be >= 1, got {self.size_value}")
        object.__setattr__(self, "size_value", int(self.size_value))

    def size(self, k: int) -> int:
        return self.size_value


BatchSchedule = Union[GeometricBatch, RootGeometricBatch, BestResponseBatch,
                      ConstantBatch]


def schedule_size(schedule: BatchSchedule, k: int) -> int:
    """Batch size N_k of a schedule at iteration k >= 0."""
    if k < 0:
        raise ValueError(f"iteration index must be >= 0, got {k}")
    return int(schedule.size(int(k)))


@dataclass
class SampleCounter:
    """Cumulative effort of a run: oracle samples, prox evals, communication
    rounds, and inner best-response solves."""

    total_samples: int = 0
    prox_evals: int = 0
    comm_rounds: int = 0
    inner_solves: int = 0

    def as_dict(self) -> dict:
        return {"total_samples": self.total_samples,
                "prox_evals": self.prox_evals,
                "comm_rounds": self.comm_rounds,
                "inner_solves": self.inner_solves}


def sample_batch_gradient(game: Game, x: StrategyProfile, batch: int,
                          path: tuple[int, ...],
                          counter: SampleCounter | None = None) -> np.ndarray:
    """Average of `batch` noisy joint-gradient observations at x.

    The error is drawn from the game's noise model(s) with second moment
    nu^2 / batch. `path` names the draw site (for example (replication,
    iteration)); equal seeds and paths reproduce the draw bit for bit.
    """
    if batch < 1:
        raise ValueError(f"batch size must be >= 1, got {batch}")
    g = gradient_map(game, x)
    if isinstance(game, QuadraticGame):
        w = game.noise.averaged(g.size, batch, path)
    else:
        w = np.concatenate([
            game.noises[i].averaged(1, batch, tuple(path) + (i,))
            for i in range(game.n_players)])
    if counter is not None:
        counter.total_samples += int(batch)
    return g + w

"""Closed-form proximal operators for the nonsmooth terms r_i.

Supported regularizers: the zero function, a weighted l1 norm, and the
indicator of a box. All three have elementwise proximal maps, so a profile
prox splits across players and coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .profiles import StrategyProfile


@dataclass(frozen=True)
class Zero:
    """r(x) = 0; the prox is the identity."""


@dataclass(frozen=True)
class L1:
    """r(x) = weight * ||x||_1; the prox is soft thresholding."""

    weight: float

    def __post_init__(self):
        if not (self.weight >= 0.0 and np.isfinite(self.weight)):
            raise ValueError(f"l1 weight must be finite and >= 0, got {self.weight}")


@dataclass(frozen=True, eq=False)
class BoxIndicator:
    """r(x) = indicator of [lo, hi]; the prox is the clip to the box."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape:
            raise ValueError("box bounds must have matching shapes")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box bounds must be finite (compact strategy set)")
        if np.any(lo > hi):
            raise ValueError("box requires lo <= hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def corner_norm(self) -> float:
        """max_{x in box} ||x||_2, attained at the componentwise larger corner."""
        return float(np.linalg.norm(np.maximum(np.abs(self.lo), np.abs(self.hi))))


Regularizer = Union[Zero, L1, BoxIndicator]


def prox_apply(reg: Regularizer, x, alpha: float) -> np.ndarray:
    """Evaluate prox_{alpha r}(x) in closed form.

    alpha > 0 is the prox step. For Zero the map is the identity, for L1 it is
    soft thresholding at level alpha*weight, for BoxIndicator the projection.
    """
    if not (alpha > 0.0 and np.isfinite(alpha)):
        raise ValueError(f"prox step must be finite and > 0, got {alpha}")
    x = np.asarray(x, dtype=float)
    if isinstance(reg, Zero):
        return x.copy()
    if isinstance(reg, L1):
        t = alpha * reg.weight
        return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)
    if isinstance(reg, BoxIndicator):
        if x.shape != reg.lo.shape:
            raise ValueError(
                f"point of shape {x.shape} does not match box of shape {reg.lo.shape}")
        return np.clip(x, reg.lo, reg.hi)
    raise TypeError(f"unknown regularizer {type(reg).__name__}")


def prox_profile(regs, x: StrategyProfile, alpha: float, counter=None) -> StrategyProfile:
    """Blockwise prox across players; counts as one composite prox evaluation."""
    if len(regs) != x.n_players:
        raise ValueError(
            f"{len(regs)} regularizers for {x.n_players} players")
    out = StrategyProfile(tuple(
        prox_apply(reg, block, alpha) for reg, block in zip(regs, x.blocks)))
    if counter is not None:
        counter.prox_evals += 1
    return out

"""Per-iteration record of a solver run."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .profiles import StrategyProfile
from .sampling import SampleCounter


@dataclass
class RunTrace:
    """History of one run.

    errors[k] is the distance measure of the k-th iterate to the reference
    equilibrium (squared for gradient-response runs, plain norm for
    best-response runs, per error_metric); it has max_iter + 1 entries and
    is NaN when no reference was supplied. batches, cum_samples and cum_prox
    have one entry per executed iteration; cumulative columns are exact
    integer sums of the schedule. Distributed runs also carry taus, cum_comm
    and consensus_errors; best-response runs carry cum_inner.
    """

    errors: np.ndarray
    error_metric: str
    batches: list[int]
    cum_samples: list[int]
    cum_prox: list[int]
    final: StrategyProfile
    counter: SampleCounter
    taus: list[int] | None = None
    cum_comm: list[int] | None = None
    consensus_errors: list[float] | None = None
    cum_inner: list[int] | None = None

    @property
    def iterations(self) -> int:
        return len(self.batches)

"""Strategy profiles: per-player blocks of a joint decision vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class StrategyProfile:
    """Joint strategy x = (x_1, ..., x_N) stored as per-player 1-D blocks."""

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        coerced = []
        for b in self.blocks:
            arr = np.atleast_1d(np.asarray(b, dtype=float))
            if arr.ndim != 1:
                raise ValueError("strategy blocks must be one-dimensional")
            coerced.append(arr)
        if not coerced:
            raise ValueError("a profile needs at least one player")
        object.__setattr__(self, "blocks", tuple(coerced))

    @property
    def n_players(self) -> int:
        return len(self.blocks)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.size for b in self.blocks)

    @property
    def dim(self) -> int:
        return sum(b.size for b in self.blocks)

    @property
    def vector(self) -> np.ndarray:
        """Concatenation of the blocks (a copy)."""
        return np.concatenate(self.blocks)

    @classmethod
    def from_vector(cls, vec, dims) -> StrategyProfile:
        vec = np.asarray(vec, dtype=float)
        dims = tuple(int(d) for d in dims)
        if vec.ndim != 1 or vec.size != sum(dims):
            raise ValueError(
                f"vector of size {vec.size} does not split into blocks {dims}")
        offsets = np.cumsum((0,) + dims)
        return cls(tuple(vec[offsets[i]:offsets[i + 1]] for i in range(len(dims))))

    @classmethod
    def zeros(cls, dims) -> StrategyProfile:
        return cls(tuple(np.zeros(int(d)) for d in dims))

    def distance(self, other: StrategyProfile) -> float:
        """Euclidean distance between concatenated profiles."""
        return float(np.linalg.norm(self.vector - other.vector))

"""Configuration records shared by the library and the command line."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class GridConfig:
    """Log grid ``2^(i/per_octave)`` for ``i = lo*per_octave, ..., hi*per_octave``."""

    lo: int = -40
    hi: int = 40
    per_octave: int = 16
    tol: float = 1e-10

    def __post_init__(self):
        if self.lo >= self.hi or self.per_octave < 1:
            raise ValueError("need lo < hi and per_octave >= 1")

    def points(self) -> np.ndarray:
        i = np.arange(self.lo * self.per_octave, self.hi * self.per_octave + 1)
        return 2.0 ** (i / self.per_octave)

    @property
    def log_step(self) -> float:
        return float(np.log(2.0) / self.per_octave)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class OptimizerBudget:
    """Search budget of the brute-force optimiser."""

    candidates: int = 256
    local_steps: int = 64
    seed: int = 0
    knot_count: int = 8

    def __post_init__(self):
        if min(self.candidates, self.local_steps, self.knot_count) <= 0 or self.seed < 0:
            raise ValueError("budget entries must be positive")

    def to_dict(self):
        return asdict(self)


DEFAULT_GRID = GridConfig()
DEFAULT_BUDGET = OptimizerBudget()
DEFAULT_DEPTH = 8

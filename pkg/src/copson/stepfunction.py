"""Right-continuous step functions with bounded support on (0, inf)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import weights as W
from .errors import WeightParseError


@dataclass(frozen=True)
class StepFunction:
    """``values[0]`` on ``[0, knots[0])``, ``values[i]`` on ``[knots[i-1], knots[i])``,
    and 0 on ``[knots[-1], inf)``."""

    knots: tuple
    values: tuple

    def __post_init__(self):
        k = tuple(float(x) for x in self.knots)
        v = tuple(float(x) for x in self.values)
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "values", v)
        if len(k) != len(v):
            raise ValueError("a step function needs as many values as knots")
        ka = np.asarray(k)
        if ka.size and (ka[0] <= 0 or np.any(np.diff(ka) <= 0) or not np.all(np.isfinite(ka))):
            raise ValueError("knots must be positive, finite and strictly increasing")
        if not all(math.isfinite(x) for x in v):
            raise ValueError("values must be finite")

    @classmethod
    def from_lengths(cls, lengths, values) -> "StepFunction":
        return cls(tuple(np.cumsum(np.asarray(lengths, dtype=float))), tuple(values))

    @classmethod
    def indicator(cls, x, c=1.0) -> "StepFunction":
        """``c * chi_[0, x)``."""
        return cls((x,), (c,))

    @property
    def lengths(self) -> np.ndarray:
        k = np.asarray(self.knots)
        return np.diff(k, prepend=0.0)

    @property
    def support_end(self) -> float:
        """End of the support of the nonzero part (0 for the zero function)."""
        nz = [i for i, v in enumerate(self.values) if v != 0]
        return self.knots[nz[-1]] if nz else 0.0

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def is_canonical(self) -> bool:
        v = np.asarray(self.values)
        return bool(np.all(v >= 0) and np.all(np.diff(v) <= 0))

    def __call__(self, t):
        return self.evaluate(t)

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        k = np.asarray(self.knots)
        v = np.append(np.asarray(self.values), 0.0)
        out = v[np.searchsorted(k, t, side="right")]
        return out if out.ndim else float(out)

    def scale(self, c) -> "StepFunction":
        return StepFunction(self.knots, tuple(c * x for x in self.values))

    def l1(self) -> float:
        """``int_0^inf |g|``."""
        return math.fsum(abs(v) * l for v, l in zip(self.values, self.lengths))

    def cumulative(self, t):
        """``int_0^t g`` (exact piecewise-linear evaluation)."""
        t = np.asarray(t, dtype=float)
        k = np.concatenate([[0.0], np.asarray(self.knots)])
        v = np.append(np.asarray(self.values), 0.0)
        acc = np.concatenate([[0.0], np.cumsum(v[:-1] * np.diff(k))])
        j = np.clip(np.searchsorted(k, t, side="right") - 1, 0, len(k) - 1)
        out = acc[j] + v[j] * (t - k[j])
        return out if out.ndim else float(out)

    def rearrange(self) -> "StepFunction":
        """Nonincreasing rearrangement of ``|g|``; equal neighbouring levels are merged."""
        vals = np.abs(np.asarray(self.values))
        lens = self.lengths
        keep = vals > 0
        vals, lens = vals[keep], lens[keep]
        if vals.size == 0:
            return StepFunction((), ())
        order = np.argsort(-vals, kind="stable")
        vals, lens = vals[order], lens[order]
        levels, widths = [], []
        for val, ln in zip(vals.tolist(), lens.tolist()):
            if levels and levels[-1] == val:
                widths[-1].append(ln)
            else:
                levels.append(val)
                widths.append([ln])
        merged = [math.fsum(w) for w in widths]
        knots = np.cumsum(merged)
        return StepFunction(tuple(knots), tuple(levels))

    def running_average(self, t):
        """``g**(t) = (1/t) int_0^t g*``."""
        g = self if self.is_canonical() else self.rearrange()
        t = np.asarray(t, dtype=float)
        out = g.cumulative(t) / t
        return out if np.ndim(out) else float(out)

    def as_weight(self) -> W.WeightExpr:
        """The same function as a :class:`PiecewiseConstant` weight (needs values >= 0)."""
        if not self.knots:
            return W.zero()
        return W.PiecewiseConstant(self.knots, self.values + (0.0,))

    def to_text(self) -> str:
        k = ",".join(repr(x) for x in self.knots)
        v = ",".join(repr(x) for x in self.values)
        return f"step([{k}],[{v}])"


def parse_step(text: str) -> StepFunction:
    """Parse ``step([t1,...,tn],[v0,...,v_{n-1}])``."""
    tk = W._Tokens(text)
    name = tk.take("name").lower()
    if name != "step":
        raise WeightParseError(f"expected step(...), got {name!r}")
    tk.take("punct", "(")
    knots = tk.numbers()
    tk.take("punct", ",")
    values = tk.numbers()
    tk.take("punct", ")")
    tk.done()
    try:
        return StepFunction(tuple(knots), tuple(values))
    except ValueError as exc:
        raise WeightParseError(str(exc)) from exc


def rearrange(g: StepFunction) -> StepFunction:
    return g.rearrange()


def running_average(g: StepFunction, t):
    return g.running_average(t)

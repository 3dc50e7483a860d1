"""Problem families shared by the test-suite and the calibration scripts.

``balanced_problem`` draws power weights ``u = t^a``, ``v = t^b`` (variant
``"power"``) or ``u = t^a e^{-t}`` (variant ``"decay"``, which makes ``Phi``
bounded) and a two-piece ``w`` whose growth straddles the critical exponent
``q e / p`` at both ends, where ``Phi(t) ~ t^e`` near 0.  All conditions of
the resulting problem are finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import weights as W
from .stepfunction import StepFunction

CASE_EXPONENTS = {
    "I": [(1, 1, 1), (1, 1, 2), (0.5, 1, 2), (1, 2, 3), (2, 2, 2)],
    "II": [(1, 2, 1), (0.5, 2, 1), (1, 3, 2), (1, 1.5, 1.2), (0.5, 1, 0.75)],
    "III": [(2, 1, 1), (2, 1, 1.5), (3, 2, 2), (1.5, 0.5, 1), (2, 1.5, 1.5)],
    "IV": [(2, 2, 1), (3, 2, 1), (2, 1.5, 1), (1.5, 2, 1), (3, 3, 2)],
}

# unbounded empirical constants: A7, A8, A9/A10 and A12 are infinite
DIVERGENT = [
    ("pow(1,0)", "pow(1,0)", "pow(1,0)", 1.0, 1.0, 1.0),
    ("pow(1,0)", "pow(1,0)", "pow(1,1)", 1.0, 2.0, 1.0),
    ("pow(1,0)", "pow(1,0)", "pow(1,0)", 2.0, 1.0, 1.0),
    ("pow(1,0)", "pow(1,0)", "pow(1,-0.5)", 2.0, 2.0, 1.0),
]


@dataclass(frozen=True)
class Problem:
    u: str
    v: str
    w: str
    m: float
    p: float
    q: float

    def weights(self):
        return W.parse_weight(self.u), W.parse_weight(self.v), W.parse_weight(self.w)

    @property
    def args(self):
        u, v, w = self.weights()
        return u, v, w, self.m, self.p, self.q


def balanced_problem(m, p, q, rng, variant="power") -> Problem:
    a, b = rng.uniform(-0.5, 0.5, 2)
    e = b + 1.0 + (p / m) * (a + 1.0)
    crit = q * e / p
    d0, d1 = rng.uniform(0.3, 1.2, 2)
    a0 = crit + d0
    v = f"pow(1,{b:.3f})"
    if variant == "power":
        u = f"pow(1,{a:.3f})"
        a1 = max(crit - d1, 0.15)
    elif variant == "decay":
        u = f"prod(pow(1,{a:.3f}),exp(1,-1))"
        a1 = -d1
    else:
        raise ValueError(f"unknown variant {variant!r}")
    w = f"sum(restrict(pow(1,{a0 - 1:.3f}),0,1),restrict(pow(1,{a1 - 1:.3f}),1,inf))"
    return Problem(u, v, w, float(m), float(p), float(q))


def case_fixtures(case, count=10, seed=0) -> list:
    """``count`` finite problems of the given case, alternating the two variants."""
    out = []
    for i in range(count):
        m, p, q = CASE_EXPONENTS[case][i % len(CASE_EXPONENTS[case])]
        rng = np.random.default_rng([seed, "I II III IV".split().index(case), i])
        out.append(balanced_problem(m, p, q, rng, "power" if i % 2 == 0 else "decay"))
    return out


def m1_exponents(case, rng):
    """Random ``(p, q)`` with ``m = 1`` falling in ``case``."""
    if case == "I":
        p = rng.uniform(0.5, 2.0)
        return p, p * rng.uniform(1.0, 2.0) if p >= 1 else rng.uniform(1.0, 3.0)
    if case == "II":
        q = rng.uniform(1.0, 2.0)
        return q * rng.uniform(1.1, 2.0), q
    q = rng.uniform(0.4, 0.9)
    if case == "III":
        return q * rng.uniform(0.5, 1.0), q
    return q * rng.uniform(1.1, 2.5), q


def random_h(rng, lo=-5.0, hi=5.0, pieces=5) -> StepFunction:
    """Nonnegative step ``h`` vanishing on ``(0, 2^lo)`` with at most ``pieces`` pieces."""
    n = int(rng.integers(1, pieces + 1))
    knots = 2.0 ** np.sort(rng.uniform(lo, hi, n + 1))
    vals = np.concatenate([[0.0], rng.exponential(size=n)])
    return StepFunction(tuple(knots), tuple(vals))


def random_step(rng, lo=-6.0, hi=6.0, pieces=6, monotone=False) -> StepFunction:
    n = int(rng.integers(1, pieces + 1))
    knots = 2.0 ** np.sort(rng.uniform(lo, hi, n))
    knots = np.unique(knots)
    vals = rng.exponential(size=knots.size)
    if monotone:
        vals = np.sort(vals)[::-1]
    return StepFunction(tuple(knots), tuple(vals))


def geometric_b(rng, n, D, increasing=True):
    """Positive sequence with consecutive ratios in ``[D, 2D]``."""
    ratios = rng.uniform(D, 2 * D, n - 1)
    b = np.concatenate([[1.0], np.cumprod(ratios)]) * math.exp(rng.normal())
    return b if increasing else b[::-1].copy()


def lemma_bound(alpha, D, variant) -> float:
    """Closed-form constant for the sequence inequalities.

    Sum variants: ``D/(D-1)`` for ``alpha <= 1`` (subadditivity) and
    ``(1 - D^{-1/alpha})^{-alpha}`` for ``alpha >= 1`` (Minkowski).  Inner-sup
    variants: ``D/(D-1)``.  Sup-sup variants: ``(1 - D^{-1/alpha})^{-alpha}``.
    """
    geo = (1.0 - D ** (-1.0 / alpha)) ** (-alpha)
    if variant.endswith("supsup"):
        return geo
    if variant.endswith("sup-inner"):
        return D / (D - 1.0)
    return D / (D - 1.0) if alpha <= 1 else geo

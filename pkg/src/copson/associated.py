"""Norm of a step function in the associated space of CL^{m,p}(u,v).

The formulas depend on ``g`` only through ``int_0^t g* = t g**(t)`` and
``||g||_1``, both exact for step functions.  They are evaluated with the grid
blocks of :mod:`copson.conditions`, with exponents written via ``m'`` and
``p'``:

* (i)   ``m <= 1, p <= 1``: ``sup_t t g**(t) Phi(t)^{-1/p}``
* (ii)  ``m <= 1 < p``:     ``(int v sup_{y>t} U^{p/m}(t,y) (y g**(y))^{p'} Phi(y)^{-p'} dt)^{1/p'}``
* (iii) ``p <= 1 < m``:     ``||g||_1 Phi(inf)^{-1/p}`` plus two tail suprema
* (iv)  ``1 < m, 1 < p``:   ``||g||_1 Phi(inf)^{-1/p}`` plus a nested integral
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import conditions as C
from .config import DEFAULT_GRID, GridConfig
from .stepfunction import StepFunction


def quadrant(m, p) -> str:
    if m <= 1:
        return "i" if p <= 1 else "ii"
    return "iii" if p <= 1 else "iv"


@dataclass
class AssociatedReport:
    quadrant: str
    norm: float
    terms: dict
    verdicts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self):
        enc = C._enc
        return {"quadrant": self.quadrant, "norm": enc(self.norm),
                "terms": {k: enc(v) for k, v in self.terms.items()},
                "verdicts": dict(self.verdicts), "notes": list(self.notes)}


def _terms(prims, m, p):
    mc, pc = C.conjugate(m), C.conjugate(p)
    P = p / m
    quad = quadrant(m, p)
    if quad == "i":
        return {"sup": C.ratio_sup(prims, 1.0, -1 / p)}
    if quad == "ii":
        return {"integral": C.sup_kernel_integral(prims, pc, 1 / pc)}
    out = {"norm1": C.ratio_total(prims, 1.0, -1 / p)}
    if quad == "iii":
        out["sup_V"] = C.tail_sup(prims, mc, 2 + mc / p, P, 1 / mc)
        out["sup_phi"] = C.tail_sup(prims, mc, 2 + mc / p, None, 1 / mc)
    else:
        out["integral"] = C.kernel_outer(prims, mc, 1 + mc, (p - 1) / (m - 1),
                                         p * (m - 1) / (m * (p - 1)), 1 / pc)
    return out


def associated_report(u, v, m, p, g: StepFunction, grid: GridConfig = DEFAULT_GRID,
                      prims=None) -> AssociatedReport:
    """All terms of the associated norm of ``g`` (rearranged first)."""
    gs = g.rearrange()
    quad = quadrant(m, p)
    if prims is None:
        prims = C.primitives(u, v, gs, m, p, grid)
    else:
        prims = prims.with_w(gs)
    if gs.is_zero():
        return AssociatedReport(quad, 0.0, {})
    vals = _terms(prims, float(m), float(p))
    terms = {k: x.resolved() for k, x in vals.items()}
    norm = math.fsum(terms.values()) if all(map(math.isfinite, terms.values())) else math.inf
    for k, x in vals.items():
        if x.verdict == "unknown":
            prims.notes.append(f"{k}: endpoint behaviour undecided, grid value reported")
    return AssociatedReport(quad, norm, terms, {k: x.verdict for k, x in vals.items()},
                            list(dict.fromkeys(prims.notes)))


def associated_norm(u, v, m, p, g: StepFunction, grid: GridConfig = DEFAULT_GRID,
                    prims=None) -> float:
    """Associated-space norm of ``g`` (up to the equivalence constants of the formulas)."""
    return associated_report(u, v, m, p, g, grid, prims).norm

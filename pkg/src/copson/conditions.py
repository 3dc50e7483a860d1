"""Conditions for the embedding of CL^{m,p}(u,v) into Lambda^q(w), general m.

Notation used throughout (all functions of ``y > 0``)::

    W(y)   = int_0^y w
    Phi(y) = phi^p(y) = int_0^y v(s) U(s,y)^{p/m} ds
    uJ(y)  = u(y) int_0^y v(s) U(s,y)^{p/m-1} ds

The four regimes are

* I   ``m <= q, p <= q``:  ``C ~ A7``
* II  ``m <= q < p``:      ``C ~ A8``
* III ``p <= q < m``:      ``C ~ A9 + A10 + A11``
* IV  ``q < m, q < p``:    ``C ~ A11 + A12``
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import grid as G
from .config import DEFAULT_GRID, GridConfig
from .errors import NotAdmissible
from .fundamental import FundamentalFunction

CASES = ("I", "II", "III", "IV")
REQUIRED = {
    "I": ("A7",),
    "II": ("A8",),
    "III": ("A9", "A10", "A11"),
    "IV": ("A11", "A12"),
}


def conjugate(x: float) -> float:
    """``x' = x/(x-1)``, with ``1' = inf``; negative for ``0 < x < 1``."""
    return math.inf if x == 1 else x / (x - 1)


@dataclass(frozen=True)
class Exponents:
    m: float
    p: float
    q: float

    def __post_init__(self):
        for name in ("m", "p", "q"):
            val = float(getattr(self, name))
            if not (val > 0 and math.isfinite(val)):
                raise ValueError(f"{name} must be a positive real, got {val}")
            object.__setattr__(self, name, val)

    @property
    def r(self) -> float:
        return math.inf if self.p == self.q else self.p * self.q / (self.p - self.q)

    @property
    def m_conj(self):
        return conjugate(self.m)

    @property
    def p_conj(self):
        return conjugate(self.p)

    @property
    def q_conj(self):
        return conjugate(self.q)

    @property
    def case(self) -> str:
        m, p, q = self.m, self.p, self.q
        if m <= q:
            return "I" if p <= q else "II"
        return "III" if p <= q else "IV"

    def to_dict(self):
        def enc(x):
            return "inf" if math.isinf(x) else x

        return {"m": self.m, "p": self.p, "q": self.q, "r": enc(self.r),
                "m_conj": enc(self.m_conj), "p_conj": enc(self.p_conj),
                "q_conj": enc(self.q_conj), "case": self.case}


def classify(m, p, q) -> Exponents:
    return Exponents(m, p, q)


def _enc(x):
    return "inf" if isinstance(x, float) and math.isinf(x) else x


@dataclass
class ConditionReport:
    case: str
    conditions: dict
    C_estimate: float
    embedding_holds: bool
    verdicts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "case": self.case,
            "conditions": {k: _enc(v) for k, v in self.conditions.items()},
            "C_estimate": _enc(self.C_estimate),
            "embedding_holds": self.embedding_holds,
            "verdicts": dict(self.verdicts),
            "notes": list(self.notes),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


# ---------------------------------------------------------------------------
# building blocks, parameterized by exponents


@dataclass
class Value:
    value: float
    verdict: str
    argmax: float | None = None

    def resolved(self) -> float:
        return math.inf if self.verdict == "inf" else self.value


def _infinite_w(prims) -> bool:
    return prims.Wc.infinite


def ratio_sup(prims: G.Primitives, kw, kphi, refine=True) -> Value:
    """``sup_t W(t)^kw Phi(t)^kphi``."""
    if _infinite_w(prims):
        return Value(math.inf, "inf")
    verdict = G.overall(G.ratio_verdict(prims, kw, kphi))
    vals = G.mul(G.pw(prims.Wt, kw), G.pw(prims.Phi, kphi))
    scalar = None
    if refine:
        def scalar(t):
            return G.smul(G.spow(prims.W_at(t), kw), G.spow(prims.Phi_at(t), kphi))
    best, t = G.grid_sup(prims, vals, scalar)
    return Value(best, verdict, t)


def ratio_total(prims: G.Primitives, kw, kphi) -> Value:
    """``W(inf)^kw Phi(inf)^kphi``."""
    val = G.smul(G.spow(prims.W_inf, kw), G.spow(prims.Phi_inf, kphi))
    return Value(val, "inf" if math.isinf(val) else "finite")


def sup_kernel_integral(prims: G.Primitives, r1, outer) -> Value:
    """``(int_0^inf v(t) sup_{y>t} U(t,y)^P (W/Phi)^{r1}(y) dt)^outer``."""
    if _infinite_w(prims):
        return Value(math.inf, "inf")
    verdict = G.overall(G.sup_kernel_outer_verdict(prims, r1))
    R = G.mul(G.pw(prims.Wt, r1), G.pw(prims.Phi, -r1))
    S = G.kernel_sups(prims, R, prims.P)
    total = G.line_integral(prims, G.mul(prims.vt, S))
    return Value(G.spow(total, outer), verdict)


def _integrand(prims, a, b):
    return G.mul(G.pw(prims.Wt, a), prims.uJ, G.pw(prims.Phi, -b))


def tail_sup(prims: G.Primitives, a, b, kernel, outer) -> Value:
    """``sup_t (F(t) int_t^inf W^a [U(t,y)^kernel] uJ Phi^{-b} dy)^outer``.

    ``F = Phi`` without a kernel (``kernel=None``) and ``F = V`` with it.
    """
    if _infinite_w(prims):
        return Value(math.inf, "inf")
    verdict = G.overall(G.tail_sup_verdict(prims, a, b, kernel))
    g = _integrand(prims, a, b)
    if kernel is None:
        vals = G.mul(prims.Phi, G.tail_integrals(prims, g))
    else:
        vals = G.mul(prims.Vt, G.kernel_integrals(prims, g, kernel))
    best, t = G.grid_sup(prims, vals)
    return Value(G.spow(max(best, 0.0), outer), verdict, t)


def kernel_outer(prims: G.Primitives, a, b, gamma, kappa, outer) -> Value:
    """``(int_0^inf v(t) (int_t^inf W^a U(t,y)^gamma uJ Phi^{-b} dy)^kappa dt)^outer``."""
    if _infinite_w(prims):
        return Value(math.inf, "inf")
    verdict = G.overall(G.kernel_outer_verdict(prims, a, b, gamma, kappa))
    inner = G.kernel_integrals(prims, _integrand(prims, a, b), gamma)
    total = G.line_integral(prims, G.mul(prims.vt, G.pw(inner, kappa)))
    return Value(G.spow(total, outer), verdict)


# ---------------------------------------------------------------------------
# conditions A7 - A12


def A7(prims, e: Exponents) -> Value:
    return ratio_sup(prims, 1 / e.q, -1 / e.p)


def A8(prims, e: Exponents) -> Value:
    m, p, q = e.m, e.p, e.q
    return sup_kernel_integral(prims, p / (p - q), (p - q) / (p * q))


def _iii_exponents(e):
    m, p, q = e.m, e.p, e.q
    return m / (m - q), 2 + m * q / (p * (m - q)), (m - q) / (m * q)


def A9(prims, e: Exponents) -> Value:
    a, b, outer = _iii_exponents(e)
    return tail_sup(prims, a, b, e.p / e.m, outer)


def A10(prims, e: Exponents) -> Value:
    a, b, outer = _iii_exponents(e)
    return tail_sup(prims, a, b, None, outer)


def A11(prims, e: Exponents) -> Value:
    return ratio_total(prims, 1 / e.q, -1 / e.p)


def A12(prims, e: Exponents) -> Value:
    m, p, q = e.m, e.p, e.q
    return kernel_outer(prims, m / (m - q), 1 + m / (m - q), (p - q) / (m - q),
                        p * (m - q) / (m * (p - q)), (p - q) / (p * q))


EVALUATORS = {"A7": A7, "A8": A8, "A9": A9, "A10": A10, "A11": A11, "A12": A12}


# ---------------------------------------------------------------------------
# public API


def _check(ff: FundamentalFunction):
    adm = ff.is_admissible()
    if not adm.ok:
        raise NotAdmissible(adm.status, adm.witness)


def primitives(u, v, w, m, p, grid: GridConfig = DEFAULT_GRID, check=True) -> G.Primitives:
    """Grid primitives for ``(u, v, w, m, p)``; raises NotAdmissible unless ``check=False``."""
    ff = FundamentalFunction(u, v, m, p, tol=grid.tol)
    if check:
        _check(ff)
    return G.Primitives(u, v, w, m, p, grid, ff)


def _evaluate(names, u, v, w, e, grid, prims, evaluators):
    if prims is None:
        prims = primitives(u, v, w, e.m, e.p, grid)
    out = {}
    for name in names:
        val = evaluators[name](prims, e)
        if val.verdict == "unknown":
            prims.notes.append(f"{name}: endpoint behaviour undecided, grid value reported")
        out[name] = val
    return out, prims


def condition_A7(u, v, w, e: Exponents, grid: GridConfig = DEFAULT_GRID, prims=None):
    return _evaluate(["A7"], u, v, w, e, grid, prims, EVALUATORS)[0]["A7"].resolved()


def condition_A8(u, v, w, e: Exponents, grid: GridConfig = DEFAULT_GRID, prims=None):
    return _evaluate(["A8"], u, v, w, e, grid, prims, EVALUATORS)[0]["A8"].resolved()


def condition_A9_A10_A11(u, v, w, e: Exponents, grid: GridConfig = DEFAULT_GRID, prims=None):
    res = _evaluate(["A9", "A10", "A11"], u, v, w, e, grid, prims, EVALUATORS)[0]
    return tuple(res[k].resolved() for k in ("A9", "A10", "A11"))


def condition_A12(u, v, w, e: Exponents, grid: GridConfig = DEFAULT_GRID, prims=None):
    return _evaluate(["A12"], u, v, w, e, grid, prims, EVALUATORS)[0]["A12"].resolved()


def report_from(values: dict, case: str, notes) -> ConditionReport:
    conds = {k: v.resolved() for k, v in values.items()}
    C = math.fsum(conds.values()) if all(map(math.isfinite, conds.values())) else math.inf
    return ConditionReport(
        case=case,
        conditions=conds,
        C_estimate=C,
        embedding_holds=bool(math.isfinite(C)),
        verdicts={k: v.verdict for k, v in values.items()},
        notes=list(dict.fromkeys(notes)),
    )


def embedding_constant(u, v, w, m, p, q, grid: GridConfig = DEFAULT_GRID,
                       prims=None) -> ConditionReport:
    """Evaluate the conditions of the regime of ``(m, p, q)``.

    ``w`` is a weight expression or a :class:`StepFunction` (taken as ``g*``).
    """
    e = classify(m, p, q)
    values, prims = _evaluate(REQUIRED[e.case], u, v, w, e, grid, prims, EVALUATORS)
    return report_from(values, e.case, prims.notes)


__all__ = [
    "Exponents", "ConditionReport", "classify", "conjugate", "primitives",
    "condition_A7", "condition_A8", "condition_A9_A10_A11", "condition_A12",
    "embedding_constant", "REQUIRED", "CASES",
]

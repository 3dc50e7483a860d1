"""Conditions A1 - A6 for m = 1, transcribed separately from the general-m set.

The exponents are written in terms of ``q' = q/(q-1)`` and ``r = pq/(p-q)``
exactly as they appear in the m = 1 statement; the general-m evaluators in
:mod:`copson.conditions` use ``m/(m-q)`` style exponents instead.  Agreement of
the two sets at m = 1 is checked by the test-suite.

Regimes (m = 1):

* (i)   ``1 <= q, p <= q``:  A1
* (ii)  ``1 <= q < p``:      A2
* (iii) ``p <= q < 1``:      A3 + A4 + A5
* (iv)  ``q < 1, q < p``:    A5 + A6
"""
from __future__ import annotations

from . import conditions as C
from .config import DEFAULT_GRID, GridConfig

REQUIRED_M1 = {
    "I": ("A1",),
    "II": ("A2",),
    "III": ("A3", "A4", "A5"),
    "IV": ("A5", "A6"),
}

# the m = 1 name corresponding to each general-m condition
PAIRS = {"A1": "A7", "A2": "A8", "A3": "A9", "A4": "A10", "A5": "A11", "A6": "A12"}


def A1(prims, e: C.Exponents) -> C.Value:
    return C.ratio_sup(prims, 1 / e.q, -1 / e.p)


def A2(prims, e: C.Exponents) -> C.Value:
    r = e.p * e.q / (e.p - e.q)
    return C.sup_kernel_integral(prims, r / e.q, 1 / r)


def A3(prims, e: C.Exponents) -> C.Value:
    qc = e.q / (e.q - 1)
    return C.tail_sup(prims, 1 - qc, 2 - qc / e.p, e.p, -1 / qc)


def A4(prims, e: C.Exponents) -> C.Value:
    qc = e.q / (e.q - 1)
    return C.tail_sup(prims, 1 - qc, 2 - qc / e.p, None, -1 / qc)


def A5(prims, e: C.Exponents) -> C.Value:
    return C.ratio_total(prims, 1 / e.q, -1 / e.p)


def A6(prims, e: C.Exponents) -> C.Value:
    qc = e.q / (e.q - 1)
    r = e.p * e.q / (e.p - e.q)
    return C.kernel_outer(prims, 1 - qc, 2 - qc, (e.p - e.q) / (1 - e.q), -r / qc, 1 / r)


EVALUATORS_M1 = {"A1": A1, "A2": A2, "A3": A3, "A4": A4, "A5": A5, "A6": A6}


def embedding_constant_m1(u, v, w, p, q, grid: GridConfig = DEFAULT_GRID,
                          prims=None) -> C.ConditionReport:
    """Evaluate the m = 1 conditions for ``(p, q)``."""
    e = C.classify(1.0, p, q)
    values, prims = C._evaluate(REQUIRED_M1[e.case], u, v, w, e, grid, prims, EVALUATORS_M1)
    return C.report_from(values, e.case, prims.notes)


def condition(name, u, v, w, p, q, grid: GridConfig = DEFAULT_GRID, prims=None) -> float:
    e = C.classify(1.0, p, q)
    return C._evaluate([name], u, v, w, e, grid, prims, EVALUATORS_M1)[0][name].resolved()

"""Leading-order bookkeeping at the endpoints 0 and infinity.

An :class:`Order` ``(lam, alpha, beta)`` stands for the size of a positive
function near one endpoint:

* at infinity, ``t^alpha exp(lam t) (log t)^beta``;
* at zero, ``t^alpha (log 1/t)^beta`` (``lam`` is always 0 there).

Constant factors are dropped.  A function that vanishes identically near the
endpoint has ``alpha = +inf`` at 0 or ``lam = -inf`` at infinity.  The ``exact``
flag is cleared whenever an estimate is only valid up to factors that could
matter in a borderline comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import weights as W

ZERO_END = "zero"
INF_END = "inf"


@dataclass(frozen=True)
class Order:
    lam: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    exact: bool = True

    def key(self, end):
        # larger key = larger function near the endpoint
        if end == INF_END:
            return (self.lam, self.alpha, self.beta)
        return (-self.alpha, self.beta)

    def __mul__(self, other: "Order") -> "Order":
        lam = _add(self.lam, other.lam)
        al = _add(self.alpha, other.alpha)
        return Order(lam, al, self.beta + other.beta, self.exact and other.exact)

    def __pow__(self, k: float) -> "Order":
        if k == 0:
            return CONST
        return Order(_scale(self.lam, k), _scale(self.alpha, k), self.beta * k, self.exact)

    def is_zero(self, end):
        return self.lam == -math.inf if end == INF_END else self.alpha == math.inf


CONST = Order()
ZERO_AT_0 = Order(alpha=math.inf)
ZERO_AT_INF = Order(lam=-math.inf)


def _add(a, b):
    s = a + b
    # 0 * inf := 0: a vanishing factor wins
    if math.isnan(s):
        return math.inf if a == math.inf or b == math.inf else -math.inf
    return s


def _scale(a, k):
    if math.isinf(a):
        return a if k > 0 else -a
    return a * k


def zero_of(end) -> Order:
    return ZERO_AT_0 if end == ZERO_END else ZERO_AT_INF


def limit(o: Order, end) -> str:
    """``'0'``, ``'const'`` or ``'inf'``: the limit of the function at ``end``."""
    if o.is_zero(end):
        return "0"
    if end == INF_END:
        k = (o.lam, o.alpha, o.beta)
    else:
        k = (0.0, -o.alpha, o.beta)
    if k > (0.0, 0.0, 0.0):
        return "inf"
    if k < (0.0, 0.0, 0.0):
        return "0"
    return "const"


def integrable(o: Order, end) -> bool:
    if o.is_zero(end):
        return True
    if end == INF_END:
        return o.lam < 0 or (o.lam == 0 and (o.alpha < -1 or (o.alpha == -1 and o.beta < -1)))
    return o.alpha > -1 or (o.alpha == -1 and o.beta < -1)


def cumulative(o: Order, end):
    """Order of ``int_0^t`` (end=zero) or ``int_1^t`` (end=inf); None if divergent."""
    if o.is_zero(end):
        return o if end == ZERO_END else CONST
    if end == ZERO_END:
        if not integrable(o, end):
            return None
        if o.alpha > -1:
            return Order(0.0, o.alpha + 1, o.beta, o.exact)
        return Order(0.0, 0.0, o.beta + 1, o.exact)
    if integrable(o, end):
        return CONST
    if o.lam > 0:
        return Order(o.lam, o.alpha, o.beta, o.exact)
    if o.alpha > -1:
        return Order(0.0, o.alpha + 1, o.beta, o.exact)
    if o.beta > -1:
        return Order(0.0, 0.0, o.beta + 1, o.exact)
    # log log growth; record as constant-size but not exact
    return Order(0.0, 0.0, 0.0, False)


def tail(o: Order, end):
    """Order of ``int_t^inf`` (end=inf) or ``int_t^1`` (end=zero); None if divergent."""
    if o.is_zero(end):
        return o if end == INF_END else CONST
    if end == INF_END:
        if not integrable(o, end):
            return None
        if o.lam < 0:
            return Order(o.lam, o.alpha, o.beta, o.exact)
        if o.alpha < -1:
            return Order(0.0, o.alpha + 1, o.beta, o.exact)
        return Order(0.0, 0.0, o.beta + 1, o.exact)
    if integrable(o, end):
        return CONST
    if o.alpha < -1:
        return Order(0.0, o.alpha + 1, o.beta, o.exact)
    if o.beta > -1:
        return Order(0.0, 0.0, o.beta + 1, o.exact)
    return Order(0.0, 0.0, 0.0, False)


def derivative(o: Order, end):
    """Order of the derivative of a function of order ``o`` that tends to 0 or infinity."""
    if o.is_zero(end):
        return o
    if end == INF_END and o.lam != 0:
        return o
    if o.alpha != 0:
        return Order(0.0, o.alpha - 1, o.beta, o.exact)
    return Order(0.0, -1.0, o.beta - 1, o.exact)


def larger(a: Order, b: Order, end) -> Order:
    if a is None or b is None:
        return None
    out = a if a.key(end) >= b.key(end) else b
    return Order(out.lam, out.alpha, out.beta, a.exact and b.exact)


def smaller(a: Order, b: Order, end) -> Order:
    out = a if a.key(end) <= b.key(end) else b
    return Order(out.lam, out.alpha, out.beta, a.exact and b.exact)


def weight_order(w, end) -> Order:
    """Leading order of a weight expression at ``end``."""
    if end == ZERO_END:
        lead = W.leading_at_zero(w)
        return ZERO_AT_0 if lead is None else Order(0.0, lead[1], 0.0)
    lead = W.leading_at_infinity(w)
    return ZERO_AT_INF if lead is None else Order(lead[1], lead[2], 0.0)


# ---------------------------------------------------------------------------
# the nested integral phi^p(t) = int_0^t v(s) U(s,t)^P ds


def phi_p_order(u, v, P, end):
    """Order of ``phi^p`` at ``end``; None when phi^p is infinite there."""
    ou, ov = weight_order(u, end), weight_order(v, end)
    if end == ZERO_END:
        if ou.is_zero(end) or ov.is_zero(end):
            return ZERO_AT_0
        cu = cumulative(ou, end)
        if cu is None:
            return cumulative(ov * tail(ou, end) ** P, end)
        cv = cumulative(ov, end)
        return None if cv is None else cv * cu ** P
    # infinity
    if ov.is_zero(end) and ou.is_zero(end):
        return CONST
    if ou.lam == 0 and ov.lam == 0 and not ou.is_zero(end) and not ov.is_zero(end):
        return _phi_power_inf(ou, ov, P)
    if integrable(ou, end):
        inner = ov * tail(ou, end) ** P
        out = cumulative(inner, end)
    else:
        out = cumulative(ov, end) * cumulative(ou, end) ** P
        # the mass of v near t sees a shorter U; this is only an upper estimate
        if ov.lam > 0:
            out = Order(out.lam, out.alpha, out.beta, False)
    return out


def _phi_power_inf(ou, ov, P):
    # u ~ t^b, v ~ t^a (with log powers) at infinity
    a, b = ov.alpha, ou.alpha
    # mass of v on (0,1): V(1) * U(1,t)^P
    c1 = cumulative(ou, INF_END) ** P
    # s in (1,t): scaling s = t*sigma
    e = a + P * min(b + 1, 0.0)
    scale = Order(0.0, a + 1 + P * (b + 1), ov.beta + P * ou.beta)
    if b == -1:
        scale = Order(0.0, a + 1, ov.beta)
        e = a
    if e > -1:
        c2 = scale
    elif e == -1:
        c2 = Order(0.0, scale.alpha, scale.beta + 1, False)
    else:
        # small sigma dominates: behaves like int_1^t v(s) U(s,t)^P ds with s fixed scale
        if b < -1:
            c2 = cumulative(ov * tail(ou, INF_END) ** P, INF_END)
        else:
            c2 = cumulative(ov, INF_END) * cumulative(ou, INF_END) ** P
    return larger(c1, c2, INF_END)

"""Grid primitives and endpoint rules shared by the condition evaluators.

Everything lives on the log grid of :class:`~copson.config.GridConfig`.  Integrals
over ``(0, inf)`` are trapezoid sums in ``x = log t`` plus a geometric estimate
of the part outside the window.  Suprema are grid maxima; a caller may supply a
scalar evaluator for a bounded refinement around the grid argmax.

Divergence is never read off the grid.  The ``*_verdict`` helpers combine the
leading orders of :mod:`copson.asymptotics` according to the structure of each
condition and return ``"finite"``, ``"inf"`` or ``"unknown"``.
"""
from __future__ import annotations

import math
from functools import cached_property

import numpy as np
from scipy import optimize

from . import asymptotics as asy
from . import weights as W
from .config import DEFAULT_GRID, GridConfig
from .errors import NonIntegrableNearZero
from .fundamental import FundamentalFunction
from .stepfunction import StepFunction

ENDS = (asy.ZERO_END, asy.INF_END)


# ---------------------------------------------------------------------------
# arithmetic with the conventions 0 * inf = 0, 1/inf = 0, 0^0 = 1


def pw(x, k):
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return np.power(x, k)


def mul(*xs):
    out = xs[0]
    for x in xs[1:]:
        with np.errstate(invalid="ignore", over="ignore"):
            prod = out * x
        out = np.where((out == 0) | (x == 0), 0.0, prod)
    return out


def spow(x: float, k: float) -> float:
    """Scalar power with the same conventions."""
    if x == 0:
        return math.inf if k < 0 else (1.0 if k == 0 else 0.0)
    if math.isinf(x):
        return 0.0 if k < 0 else (1.0 if k == 0 else math.inf)
    return x ** k


def smul(*xs) -> float:
    if any(x == 0 for x in xs):
        return 0.0
    out = 1.0
    for x in xs:
        out *= x
    return out


# ---------------------------------------------------------------------------
# the function W(t) = int_0^t w


class WeightCumulative:
    """``W(t) = int_0^t w`` for a weight expression."""

    def __init__(self, w, tol=1e-10):
        self.w = w
        self.tol = tol
        lead = W.leading_at_zero(w)
        self.infinite = lead is not None and lead[1] <= -1

    def __call__(self, t):
        if self.infinite:
            return np.full(np.shape(t), np.inf) if np.ndim(t) else math.inf
        if np.ndim(t):
            return W.integrate_many(self.w, 0.0, t, tol=self.tol)
        return W.integrate(self.w, 0.0, t, tol=self.tol)

    def total(self) -> float:
        return math.inf if self.infinite else W.integrate(self.w, 0.0, math.inf, tol=self.tol)

    def order(self, end):
        return asy.cumulative(asy.weight_order(self.w, end), end)

    def describe(self):
        return W.to_text(self.w)


class StepCumulative:
    """``int_0^t g*`` for a step function (rearranged on construction)."""

    infinite = False

    def __init__(self, g: StepFunction):
        self.g = g.rearrange()

    def __call__(self, t):
        return self.g.cumulative(t)

    def total(self) -> float:
        return self.g.l1()

    def order(self, end):
        if self.g.is_zero():
            return asy.zero_of(end)
        if end == asy.ZERO_END:
            return asy.Order(0.0, 1.0, 0.0)
        return asy.CONST

    def describe(self):
        return self.g.to_text()


def as_cumulative(w, tol=1e-10):
    if isinstance(w, (WeightCumulative, StepCumulative)):
        return w
    if isinstance(w, StepFunction):
        return StepCumulative(w)
    return WeightCumulative(w, tol)


# ---------------------------------------------------------------------------
# primitives on the grid


class Primitives:
    """Grid values of ``W, V, phi^p, u J`` and the matrix ``U(t_i, t_j)``.

    ``uJ`` is ``u(t) int_0^t v(s) U(s,t)^{p/m-1} ds``, which equals
    ``(m/p) d/dt phi^p(t)``.
    """

    def __init__(self, u, v, w, m, p, grid: GridConfig = DEFAULT_GRID, ff=None):
        self.u, self.v = u, v
        self.m, self.p = float(m), float(p)
        self.P = self.p / self.m
        self.grid = grid
        self.Wc = as_cumulative(w, grid.tol)
        self.ff = ff if ff is not None else FundamentalFunction(u, v, m, p, tol=grid.tol)
        self.t = grid.points()
        self.h = grid.log_step
        self.notes: list[str] = []

    def with_w(self, w) -> "Primitives":
        """Same ``(u, v, m, p)`` and cached grid data, different ``w``."""
        new = Primitives.__new__(Primitives)
        skip = ("Wt", "W_inf", "Wc", "notes")
        new.__dict__.update({k: x for k, x in self.__dict__.items() if k not in skip})
        new.Wc = as_cumulative(w, self.grid.tol)
        new.notes = []
        return new

    @property
    def n(self):
        return self.t.size

    @cached_property
    def Wt(self):
        return np.asarray(self.Wc(self.t), dtype=float)

    @cached_property
    def Vt(self):
        return W.integrate_many(self.v, 0.0, self.t, tol=self.grid.tol)

    @cached_property
    def Phi(self):
        return self.ff.phi_p(self.t)

    @cached_property
    def ut(self):
        return W.evaluate(self.u, self.t)

    @cached_property
    def vt(self):
        return W.evaluate(self.v, self.t)

    @cached_property
    def uJ(self):
        out = np.zeros(self.n)
        nz = self.ut > 0
        if nz.any():
            out[nz] = self.ut[nz] * self.ff.J(self.t[nz])
        return out

    @cached_property
    def U(self):
        """``U[i, j] = int_{t_i}^{t_j} u`` for ``j > i`` and 0 otherwise."""
        n = self.n
        i, j = np.triu_indices(n, 1)
        out = np.zeros((n, n))
        out[i, j] = W.integrate_many(self.u, self.t[i], self.t[j], tol=self.grid.tol)
        return out

    @cached_property
    def Phi_inf(self):
        return self.ff.phi_p_infinity()

    @cached_property
    def W_inf(self):
        return self.Wc.total()

    # -- scalar evaluators used by sup refinement
    def W_at(self, t):
        return float(self.Wc(t))

    def Phi_at(self, t):
        return self.ff.phi_p(t)

    # -- leading orders ----------------------------------------------------
    def oW(self, end):
        return self.Wc.order(end)

    def oV(self, end):
        return asy.cumulative(asy.weight_order(self.v, end), end)

    def ou(self, end):
        return asy.weight_order(self.u, end)

    def ov(self, end):
        return asy.weight_order(self.v, end)

    def oPhi(self, end):
        return asy.phi_p_order(self.u, self.v, self.P, end)

    def odPhi(self, end):
        o = self.oPhi(end)
        if o is None or asy.limit(o, end) == "const":
            return None
        return asy.derivative(o, end)

    def phi_bounded_at_inf(self):
        o = self.oPhi(asy.INF_END)
        return o is not None and asy.limit(o, asy.INF_END) != "inf"

    def w_bounded_at_inf(self):
        o = self.oW(asy.INF_END)
        return o is not None and asy.limit(o, asy.INF_END) != "inf"


# ---------------------------------------------------------------------------
# numerical building blocks


def _tail(h_end, h_in, dx):
    """Geometric estimate of the log-variable integral beyond a window edge."""
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = (np.log(h_in) - np.log(h_end)) / dx
        out = np.where((h_end > 0) & np.isfinite(h_end) & (kappa > 0.05), h_end / kappa, 0.0)
    return np.where(np.isfinite(out), out, 0.0)


def _clean(x):
    return np.where(np.isfinite(x), x, 0.0)


def line_integral(prims: Primitives, f):
    """``int_0^inf f(t) dt`` from grid values of ``f``."""
    g = _clean(f * prims.t)
    k = prims.grid.per_octave
    core = prims.h * (g.sum() - 0.5 * (g[0] + g[-1]))
    lo = _tail(g[0], g[min(k, g.size - 1)], k * prims.h)
    hi = _tail(g[-1], g[max(-k - 1, -g.size)], k * prims.h)
    return float(core + lo + hi)


def tail_integrals(prims: Primitives, G):
    """``I_i = int_{t_i}^inf G(y) dy`` for every grid point (one backward sweep)."""
    g = _clean(G * prims.t)
    k = prims.grid.per_octave
    seg = 0.5 * prims.h * (g[1:] + g[:-1])
    out = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    return out + _tail(g[-1], g[max(-k - 1, -g.size)], k * prims.h)


def kernel_integrals(prims: Primitives, G, gamma):
    """``I_i = int_{t_i}^inf U(t_i, y)^gamma G(y) dy`` on the grid."""
    g = _clean(G * prims.t) * prims.h
    g[-1] *= 0.5
    K = pw(prims.U, gamma)
    K[~np.isfinite(K)] = 0.0
    core = K @ g
    k = prims.grid.per_octave
    last = K[:, -1] * g[-1] * 2.0 / prims.h
    prev = K[:, -k - 1] * _clean(G * prims.t)[-k - 1]
    return core + _tail(last, prev, k * prims.h)


def kernel_sups(prims: Primitives, R, gamma):
    """``S_i = sup_{y > t_i} U(t_i, y)^gamma R(y)`` over grid points ``y``."""
    K = mul(pw(prims.U, gamma), np.broadcast_to(R, prims.U.shape))
    K = np.where(np.isnan(K), 0.0, K)
    return K.max(axis=1)


def grid_sup(prims: Primitives, vals, scalar=None):
    """Grid maximum of ``vals``; refined with ``scalar(t)`` around the argmax if given."""
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(vals))
    best, t_best = float(vals[i]), float(prims.t[i])
    if scalar is None or not math.isfinite(best) or best <= 0:
        return best, t_best
    if i in (0, prims.n - 1):
        prims.notes.append(f"supremum attained at the window edge t={t_best:.3g}")
    lo = math.log(prims.t[max(i - 1, 0)])
    hi = math.log(prims.t[min(i + 1, prims.n - 1)])

    def neg(x):
        val = scalar(math.exp(x))
        return -val if math.isfinite(val) else math.inf

    res = optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10})
    if res.success and -res.fun > best:
        best, t_best = float(-res.fun), float(math.exp(res.x))
    return best, t_best


# ---------------------------------------------------------------------------
# endpoint verdicts


def _borderline_sup(o, end):
    if end == asy.INF_END:
        return o.lam == 0 and o.alpha == 0
    return o.alpha == 0


def _borderline_int(o, end):
    if end == asy.INF_END:
        return o.lam == 0 and o.alpha == -1
    return o.alpha == -1


def sup_verdict(o, end):
    """Is a function of order ``o`` bounded near ``end``?"""
    if o is None:
        return "inf"
    if o.is_zero(end):
        return "finite"
    if _borderline_sup(o, end) and not o.exact:
        return "unknown"
    return "inf" if asy.limit(o, end) == "inf" else "finite"


def int_verdict(o, end):
    """Is a function of order ``o`` integrable near ``end``?"""
    if o is None:
        return "inf"
    if o.is_zero(end):
        return "finite"
    if _borderline_int(o, end) and not o.exact:
        return "unknown"
    return "finite" if asy.integrable(o, end) else "inf"


def combine(*verdicts):
    if "inf" in verdicts:
        return "inf"
    if "unknown" in verdicts:
        return "unknown"
    return "finite"


def _opt(*orders):
    return any(o is None for o in orders)


def ratio_verdict(prims: Primitives, kw, kphi):
    """``sup_t W^kw phi_p^kphi`` (kw > 0 > kphi)."""
    out = []
    for end in ENDS:
        oW, oP = prims.oW(end), prims.oPhi(end)
        if oW is None:
            out.append("inf")
            continue
        if oP is None:
            out.append("finite")
            continue
        out.append(sup_verdict(oW ** kw * oP ** kphi, end))
    return dict(zip(ENDS, out))


def _G(prims, end, a, b):
    """Order of ``W^a phi_p^{-b} (phi_p)'``; None if unknown."""
    oW, oP, od = prims.oW(end), prims.oPhi(end), prims.odPhi(end)
    if _opt(oW, oP, od):
        return None
    return oW ** a * oP ** (-b) * od


def tail_sup_verdict(prims: Primitives, a, b, P=None):
    """``sup_t F(t) int_t^inf W^a [U(t,y)^P] (phi_p)' phi_p^{-b} dy``.

    ``F = phi_p`` when ``P`` is None, otherwise ``F = V`` and the kernel
    ``U(t,y)^P`` is present.
    """
    res = {}
    I, Z = asy.INF_END, asy.ZERO_END
    if prims.phi_bounded_at_inf():
        res[I] = "finite" if prims.w_bounded_at_inf() else "unknown"
    else:
        G = _G(prims, I, a, b)
        if G is None:
            res[I] = "unknown"
        elif P is None:
            res[I] = combine(int_verdict(G, I), sup_verdict(
                prims.oPhi(I) * asy.tail(G, I) if asy.tail(G, I) else None, I))
        else:
            ou = prims.ou(I)
            if asy.integrable(ou, I):
                T = asy.tail(G, I)
                res[I] = combine(int_verdict(G, I), sup_verdict(
                    prims.oV(I) * asy.tail(ou, I) ** P * T if T else None, I))
            else:
                H = G * asy.cumulative(ou, I) ** P
                T = asy.tail(H, I)
                res[I] = combine(int_verdict(H, I),
                                 sup_verdict(prims.oV(I) * T if T else None, I))
    G0 = _G(prims, Z, a, b)
    if G0 is None:
        res[Z] = "unknown"
    elif P is None:
        res[Z] = sup_verdict(prims.oPhi(Z) * asy.tail(G0, Z), Z)
    else:
        ou = prims.ou(Z)
        cu = asy.cumulative(ou, Z)
        if cu is not None:
            o = prims.oV(Z) * asy.tail(G0 * cu ** P, Z)
        else:
            o = prims.oV(Z) * asy.tail(ou, Z) ** P * asy.tail(G0, Z)
        res[Z] = sup_verdict(o, Z)
    return res


def kernel_outer_verdict(prims: Primitives, a, b, gamma, kappa):
    """``int_0^inf v(t) (int_t^inf W^a U(t,y)^gamma (phi_p)' phi_p^{-b} dy)^kappa dt``."""
    res = {}
    I, Z = asy.INF_END, asy.ZERO_END
    if prims.phi_bounded_at_inf():
        res[I] = "unknown"
    else:
        G = _G(prims, I, a, b)
        ou = prims.ou(I)
        if G is None:
            res[I] = "unknown"
        elif asy.integrable(ou, I):
            T = asy.tail(G, I)
            res[I] = combine(int_verdict(G, I), int_verdict(
                prims.ov(I) * (asy.tail(ou, I) ** gamma * T) ** kappa if T else None, I))
        else:
            H = G * asy.cumulative(ou, I) ** gamma
            T = asy.tail(H, I)
            res[I] = combine(int_verdict(H, I),
                             int_verdict(prims.ov(I) * T ** kappa if T else None, I))
    G0 = _G(prims, Z, a, b)
    if G0 is None:
        res[Z] = "unknown"
    else:
        ou = prims.ou(Z)
        cu = asy.cumulative(ou, Z)
        if cu is not None:
            Io = asy.tail(G0 * cu ** gamma, Z)
        else:
            Io = asy.tail(ou, Z) ** gamma * asy.tail(G0, Z)
        res[Z] = int_verdict(prims.ov(Z) * Io ** kappa, Z)
    return res


def sup_kernel_outer_verdict(prims: Primitives, r1):
    """``int_0^inf v(t) sup_{y>t} U(t,y)^P (W/phi_p)^{r1}(y) dt``."""
    res = {}
    P = prims.P
    for end in ENDS:
        oW, oP = prims.oW(end), prims.oPhi(end)
        if oW is None:
            res[end] = "inf"
            continue
        if oP is None:
            res[end] = "finite"
            continue
        R = (oW * oP ** -1) ** r1
        ou = prims.ou(end)
        if end == asy.INF_END:
            if asy.integrable(ou, end):
                if sup_verdict(R, end) != "finite":
                    res[end] = sup_verdict(R, end)
                    continue
                S = asy.tail(ou, end) ** P * (R if asy.limit(R, end) == "0" else asy.CONST)
            else:
                H = asy.cumulative(ou, end) ** P * R
                if sup_verdict(H, end) != "finite":
                    res[end] = sup_verdict(H, end)
                    continue
                S = H if asy.limit(H, end) == "0" else asy.CONST
        else:
            cu = asy.cumulative(ou, end)
            if cu is not None:
                H = cu ** P * R
                S = H if asy.limit(H, end) == "inf" else asy.CONST
            else:
                S = asy.tail(ou, end) ** P * (R if asy.limit(R, end) == "inf" else asy.CONST)
            S = asy.Order(S.lam, S.alpha, S.beta, S.exact and R.exact)
        res[end] = int_verdict(prims.ov(end) * S, end)
    return res


def overall(verdicts: dict) -> str:
    return combine(*verdicts.values())


__all__ = [
    "Primitives", "WeightCumulative", "StepCumulative", "as_cumulative",
    "pw", "mul", "spow", "smul", "line_integral", "tail_integrals", "kernel_integrals",
    "kernel_sups", "grid_sup", "ratio_verdict", "tail_sup_verdict", "kernel_outer_verdict",
    "sup_kernel_outer_verdict", "overall", "NonIntegrableNearZero",
]

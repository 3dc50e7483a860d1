"""Discretizing sequences of CL^{m,p}(u,v) and the discretized functionals.

With ``D = 2^{p/m+1}`` a discretizing sequence satisfies, for every stored ``k``::

    V(t_k)   >= D V(t_{k-1})
    Phi(t_k) >= D Phi(t_{k-1})

with equality in the first (label ``InK1``) or the second (label ``InK2``).
Only a window ``k = -depth .. depth`` (or ``-depth .. 0`` when ``K = 0``) is
stored.  The label of ``k`` refers to the pair ``(t_{k-1}, t_k)``; the lowest
stored index has no label.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import weights as W
from .config import DEFAULT_DEPTH
from .errors import IndexOutOfWindow, LevelSolveFailed, NotAdmissible, SupportNotCovered
from .fundamental import FundamentalFunction
from .norms import _zero_exponent
from .quadrature import batch_quad
from .stepfunction import StepFunction

IN_K1 = "InK1"
IN_K2 = "InK2"
TIE_RTOL = 1e-9


@dataclass
class DiscretizingSequence:
    K: str                      # "zero" or "infinite"
    k: tuple                    # stored indices, increasing
    t: tuple                    # t_k (inf for t_0 when K = "zero")
    labels: dict = field(default_factory=dict)
    m: float = 1.0
    p: float = 1.0

    @property
    def t0_is_infinity(self) -> bool:
        return self.K == "zero"

    @property
    def D(self) -> float:
        return 2.0 ** (self.p / self.m + 1.0)

    @property
    def kmin(self):
        return self.k[0]

    @property
    def kmax(self):
        return self.k[-1]

    def __getitem__(self, k) -> float:
        if not self.kmin <= k <= self.kmax:
            raise IndexOutOfWindow(f"index {k} outside the stored window {self.kmin}..{self.kmax}")
        return self.t[k - self.kmin]

    def labels_list(self):
        return [self.labels.get(k) for k in self.k]

    def to_dict(self):
        return {
            "K": self.K,
            "t0": "inf" if self.t0_is_infinity else self[0],
            "m": self.m,
            "p": self.p,
            "sequence": [
                {"k": k, "t_k": "inf" if math.isinf(t) else t, "label": self.labels.get(k)}
                for k, t in zip(self.k, self.t)
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d) -> "DiscretizingSequence":
        rows = d["sequence"]
        t = tuple(math.inf if r["t_k"] == "inf" else float(r["t_k"]) for r in rows)
        labels = {r["k"]: r["label"] for r in rows if r["label"] is not None}
        return cls(d["K"], tuple(r["k"] for r in rows), t, labels, d["m"], d["p"])


# ---------------------------------------------------------------------------
# construction


def _solve(ff: FundamentalFunction, kind, target, near):
    """Solve ``value(t) = target`` starting the bracket search at ``near``."""
    lo = hi = near
    for _ in range(2000):
        if ff.level_value(kind, lo) <= target:
            break
        lo *= 0.5
    for _ in range(2000):
        if ff.level_value(kind, hi) >= target:
            break
        hi *= 2.0
    try:
        return ff.solve_level(kind, target, bracket=(lo, hi))
    except Exception as exc:
        raise LevelSolveFailed(f"{kind} = {target:g}: {exc}") from exc


def _infinite_K(ff: FundamentalFunction) -> tuple[bool, float, float]:
    V_inf = W.integrate(ff.v, 0.0, math.inf, tol=ff.tol)
    phi_inf = ff.phi_p_infinity()
    return not (math.isfinite(V_inf) or math.isfinite(phi_inf)), V_inf, phi_inf


def build_sequence(u, v, m, p, depth: int = DEFAULT_DEPTH, ff=None) -> DiscretizingSequence:
    """Build ``t_k`` by the downward (Step 2) and upward (Step 3) recursions."""
    ff = ff or FundamentalFunction(u, v, m, p)
    adm = ff.is_admissible()
    if not adm.ok:
        raise NotAdmissible(adm.status, adm.witness)
    D = 2.0 ** (ff.P + 1.0)
    infinite, V_inf, phi_inf = _infinite_K(ff)
    ts = {0: 1.0 if infinite else math.inf}
    labels = {}
    # Step 2: k = 0, -1, ..., produce t_{k-1}
    for k in range(0, -depth, -1):
        tk = ts[k]
        if math.isinf(tk):
            x = _solve(ff, "V", V_inf / D, 1.0) if math.isfinite(V_inf) else math.inf
            y = _solve(ff, "phi_p", phi_inf / D, 1.0) if math.isfinite(phi_inf) else math.inf
        else:
            x = _solve(ff, "V", float(ff.V(tk)) / D, tk)
            y = _solve(ff, "phi_p", float(ff.phi_p(tk)) / D, tk)
        ts[k - 1] = min(x, y)
        labels[k] = IN_K1 if x <= y * (1 + TIE_RTOL) else IN_K2
    # Step 3: k = 1, 2, ... (only when K is infinite)
    if infinite:
        for k in range(1, depth + 1):
            prev = ts[k - 1]
            z = _solve(ff, "V", D * float(ff.V(prev)), prev)
            s = _solve(ff, "phi_p", D * float(ff.phi_p(prev)), prev)
            ts[k] = max(z, s)
            labels[k] = IN_K1 if z >= s * (1 - TIE_RTOL) else IN_K2
    ks = tuple(sorted(ts))
    return DiscretizingSequence("infinite" if infinite else "zero", ks,
                                tuple(ts[k] for k in ks), labels, float(m), float(p))


# ---------------------------------------------------------------------------
# verification


def _V(ff, t):
    return W.integrate(ff.v, 0.0, t, tol=ff.tol) if math.isfinite(t) else \
        W.integrate(ff.v, 0.0, math.inf, tol=ff.tol)


def _Phi(ff, t):
    return ff.phi_p(t) if math.isfinite(t) else ff.phi_p_infinity()


def _rel(a, b):
    """Relative shortfall of ``a`` below ``b``, 0 when ``a >= b``."""
    if math.isinf(a) and math.isinf(b):
        return 0.0
    if a >= b:
        return 0.0
    return (b - a) / b


def _rel_eq(a, b):
    if math.isinf(a) and math.isinf(b):
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return math.inf
    return abs(a - b) / abs(b) if b else abs(a)


def verify_sequence(seq: DiscretizingSequence, u, v, m, p, ff=None) -> dict:
    """Largest relative violation of the growth and equality relations over the stored window."""
    ff = ff or FundamentalFunction(u, v, m, p)
    D = 2.0 ** (p / m + 1.0)
    res = {"V_growth": 0.0, "Phi_growth": 0.0, "V_equality": 0.0, "Phi_equality": 0.0}
    per_k = []
    for k in seq.k[1:]:
        a, b = seq[k - 1], seq[k]
        Va, Vb = _V(ff, a), _V(ff, b)
        Pa, Pb = _Phi(ff, a), _Phi(ff, b)
        row = {"k": k, "V_growth": _rel(Vb, D * Va), "Phi_growth": _rel(Pb, D * Pa)}
        if seq.labels.get(k) == IN_K1:
            row["V_equality"] = _rel_eq(Vb, D * Va)
        elif seq.labels.get(k) == IN_K2:
            row["Phi_equality"] = _rel_eq(Pb, D * Pa)
        for key in res:
            if key in row:
                res[key] = max(res[key], row[key])
        per_k.append(row)
    res["order"] = 0.0 if all(x <= y for x, y in zip(seq.t, seq.t[1:])) else 1.0
    res["per_k"] = per_k
    return res


# ---------------------------------------------------------------------------
# covering estimates


def _v_U_integral(ff, a, b, c, P):
    """``int_a^b v(s) U(s, c)^P ds`` with ``b <= c`` finite."""
    if b <= a:
        return 0.0

    def f(x, i):
        s = np.minimum(x, c)
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            out = W.evaluate(ff.v, s) * W.integrate_many(ff.u, s, c) ** P
        return np.where(np.isnan(out), 0.0, out)

    val, _ = batch_quad(f, [a], [b], rtol=ff.tol)
    return float(val[0])


def covering_estimates(seq: DiscretizingSequence, u, v, m, p, k: int, t: float, ff=None) -> dict:
    """Both sides of the two covering estimates at index ``k`` and a point ``t`` of ``Delta_{k-1}``."""
    ff = ff or FundamentalFunction(u, v, m, p)
    if k > seq.kmax or k - 3 < seq.kmin:
        raise IndexOutOfWindow(f"k={k} needs indices {k - 3}..{k} in {seq.kmin}..{seq.kmax}")
    P = p / m
    D = 2.0 ** (P + 1.0)
    t3, t2, t1, t0 = seq[k - 3], seq[k - 2], seq[k - 1], seq[k]
    if not (t1 <= t <= t0):
        raise ValueError(f"t={t:g} is not in [t_(k-1), t_k] = [{t1:g}, {t0:g}]")
    V_lhs = _V(ff, t0)
    V_rhs = D / (D - 1.0) * (V_lhs - _V(ff, t1)) if math.isfinite(V_lhs) else math.inf
    Phi_lhs = _Phi(ff, t)
    v3 = _V(ff, t2) - _V(ff, t3)
    v2 = _V(ff, t1) - _V(ff, t2)
    U2 = W.integrate(ff.u, t2, t1, tol=ff.tol)
    U1t = W.integrate(ff.u, t1, t, tol=ff.tol) if math.isfinite(t) else \
        W.integrate(ff.u, t1, math.inf, tol=ff.tol)
    term1 = 2.0 ** (3 * P + 3) / (D - 1.0) * v3 * U2 ** P
    term2 = 2.0 ** (P + 2) * _v_U_integral(ff, t2, t1, t1, P)
    term3 = 3.0 * 2.0 ** (2 * P + 1) / (D - 1.0) * v2 * U1t ** P if U1t else 0.0
    return {"V_lhs": V_lhs, "V_rhs": V_rhs, "Phi_lhs": Phi_lhs,
            "Phi_rhs": term1 + term2 + term3}


# ---------------------------------------------------------------------------
# functionals


def _tail_of_h(h: StepFunction):
    """Knots, values and ``H(b_j) = int_{b_j}^inf h`` of a nonnegative step ``h``."""
    b = np.asarray(h.knots)
    a = np.concatenate([[0.0], b[:-1]])
    c = np.asarray(h.values)
    mass = c * (b - a)
    H_right = np.concatenate([np.cumsum(mass[::-1])[::-1][1:], [0.0]])
    return a, b, c, H_right


def _check_h(h: StepFunction):
    if any(x < 0 for x in h.values):
        raise ValueError("h must be nonnegative")


def continuous_functional(u, v, m, p, h: StepFunction, tol=1e-10) -> float:
    """``int_0^inf v(t) (int_t^inf u(s) (int_s^inf h)^m ds)^{p/m} dt``."""
    _check_h(h)
    if h.is_zero():
        return 0.0
    P = p / m
    a, b, c, Hb = _tail_of_h(h)
    # I(b_j) = int_{b_j}^inf u H^m, accumulated from the right
    seg = _u_H_integrals(u, m, a[1:], b[1:], c[1:], Hb[1:], tol)
    Ib = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])

    g0 = _zero_exponent(u, v, P)
    if g0 <= 0:
        return math.inf
    kind = np.where(a == 0, 0, np.where(b > 2 * a, 1, 2))
    lo = np.where(kind == 0, 0.0, np.where(kind == 1, np.log(np.maximum(a, 1e-300)), a))
    hi = np.where(kind == 0, 1.0, np.where(kind == 1, np.log(b), b))

    def f(x, i):
        k = kind[i]
        with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
            t = np.where(k == 0, b[i] * x ** (1.0 / g0), np.where(k == 1, np.exp(x), x))
            jac = np.where(k == 0, np.where(x > 0, t / (g0 * x), 0.0), np.where(k == 1, t, 1.0))
            t = np.minimum(t, b[i])
            inner = _u_H_integrals(u, m, t, b[i], c[i], Hb[i], tol * 0.1) + Ib[i]
            val = W.evaluate(v, t) * inner ** P * jac
        return np.where(np.isnan(val), 0.0, val)

    vals, _ = batch_quad(f, lo, hi, rtol=tol, groups=np.zeros(a.size, dtype=np.intp))
    return float(vals[0])


def _u_H_integrals(u, m, a, b, c, Hb, tol):
    """``int_{a_i}^{b_i} u(s) (c_i (b_i - s) + Hb_i)^m ds`` for arrays (log variable)."""
    a, b, c, Hb = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, c, Hb)))
    out = np.zeros(a.shape)
    ok = (b > a) & ((c > 0) | (Hb > 0))
    if not ok.any():
        return out
    ai, bi, ci, Hi = a[ok], b[ok], c[ok], Hb[ok]

    def f(x, i):
        s = np.minimum(np.exp(x), bi[i])
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            val = W.evaluate(u, s) * (ci[i] * (bi[i] - s) + Hi[i]) ** m * s
        return np.where(np.isnan(val), 0.0, val)

    vals, _ = batch_quad(f, np.log(ai), np.log(bi), rtol=tol)
    out[ok] = vals
    return out


def _covering_check(seq: DiscretizingSequence, h: StepFunction):
    end = h.support_end
    if seq.K == "infinite" and end > seq[seq.kmax]:
        raise SupportNotCovered(
            f"supp h extends to {end:g} beyond t_{seq.kmax} = {seq[seq.kmax]:g}")


def _pieces_in(h: StepFunction, lo, hi):
    """Sub-pieces ``(a, b, c)`` of ``h`` restricted to ``[lo, hi]``."""
    b = np.asarray(h.knots)
    a = np.concatenate([[0.0], b[:-1]])
    c = np.asarray(h.values)
    aa, bb = np.maximum(a, lo), np.minimum(b, hi)
    keep = (bb > aa) & (c != 0)
    return aa[keep], bb[keep], c[keep]


def _h_mass(h, lo, hi):
    a, b, c = _pieces_in(h, lo, hi)
    return math.fsum(c * (b - a))


def discretized_functional(seq: DiscretizingSequence, ff: FundamentalFunction, h: StepFunction,
                           form: str = "direct", tol=1e-10) -> float:
    """Discrete sum over the stored window (``form`` is ``"direct"`` or ``"split"``)."""
    _check_h(h)
    if form not in ("direct", "split"):
        raise ValueError("form must be 'direct' or 'split'")
    if h.is_zero():
        return 0.0
    _covering_check(seq, h)
    m, p = ff.m, ff.p
    P = p / m
    total = []
    for k in seq.k[1:]:
        lo, hi = seq[k - 1], seq[k]
        a, b, c = _pieces_in(h, lo, hi)
        # int_y^{t_k} h on each sub-piece is c (b - y) + R, R the mass right of b
        R = np.array([_h_mass(h, bj, hi) for bj in b])
        if form == "direct":
            inner = _direct_inner(ff, a, b, c, R, m, tol)
            total.append(inner ** P)
        else:
            first = float(_Phi(ff, lo)) * _h_mass(h, lo, hi) ** p
            second = _split_inner(ff, a, b, c, R, m, tol) ** P
            total.append(first + second)
    return math.fsum(total)


def _direct_inner(ff, a, b, c, R, m, tol):
    """``int phi^m(y) (int_y^{t_k} h)^{m-1} h(y) dy`` over the given sub-pieces."""
    if a.size == 0:
        return 0.0
    # singular at y = b when R = 0 and m < 1: y = b - (b-a) x^{1/m}
    sub = (R == 0) & (m < 1)
    fin = np.isfinite(b)
    if not np.all(fin):
        raise SupportNotCovered("h has mass in an unbounded interval")
    L = b - a

    def f(x, i):
        s = sub[i]
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            y = np.where(s, b[i] - L[i] * x ** (1.0 / m), a[i] + L[i] * x)
            jac = np.where(s, np.where(x > 0, L[i] * x ** (1.0 / m - 1.0) / m, 0.0), L[i])
            y = np.clip(y, a[i], b[i])
            Hy = c[i] * (b[i] - y) + R[i]
            val = ff.phi_p(y) ** (m / ff.p) * Hy ** (m - 1.0) * c[i] * jac
        return np.where(np.isnan(val), 0.0, val)

    vals, _ = batch_quad(f, np.zeros(a.size), np.ones(a.size), rtol=tol,
                         groups=np.zeros(a.size, dtype=np.intp))
    return float(vals[0])


def _split_inner(ff, a, b, c, R, m, tol):
    """``int phi^{m-1} phi' (int_y^{t_k} h)^m dy``, with
    ``phi^{m-1} phi' = (1/p) Phi^{m/p-1} Phi'`` where ``Phi = phi^p``."""
    if a.size == 0:
        return 0.0
    p = ff.p

    def f(x, i):
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            y = np.clip(x, a[i], b[i])
            Hy = c[i] * (b[i] - y) + R[i]
            val = ff.phi_p(y) ** (m / p - 1.0) * ff.dphi_p(y) / p * Hy ** m
        return np.where(np.isnan(val), 0.0, val)

    vals, _ = batch_quad(f, a, b, rtol=tol, groups=np.zeros(a.size, dtype=np.intp))
    return float(vals[0])


__all__ = [
    "DiscretizingSequence", "build_sequence", "verify_sequence", "covering_estimates",
    "continuous_functional", "discretized_functional", "IN_K1", "IN_K2",
]

"""The fundamental function of CL^{m,p}(u,v).

    phi(t)^p = int_0^t v(s) U(s,t)^{p/m} ds,     U(s,t) = int_s^t u.

Values of ``phi^p`` are what gets computed and cached; ``phi`` is its p-th root.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import asymptotics as asy
from . import weights as W
from .errors import (DegenerateAtPoint, LevelSolveFailed, NonIntegrableNearZero,
                     TargetNotBracketed)
from .quadrature import batch_quad, batch_quad_inf

# below this relative distance U(s,t) is taken from the midpoint rule
_SHORT = 1e-6


@dataclass(frozen=True)
class Admissibility:
    """Outcome of :meth:`FundamentalFunction.is_admissible`."""

    status: str  # "admissible", "degenerate_zero" or "degenerate_infinite"
    witness: float | None = None

    @property
    def ok(self) -> bool:
        return self.status == "admissible"

    def to_dict(self):
        return {"admissible": self.ok, "status": self.status, "witness": self.witness}


ADMISSIBLE = Admissibility("admissible")


class FundamentalFunction:
    """Evaluator for ``phi``, ``phi'`` and the level equations of a pair ``(u, v)``.

    Parameters
    ----------
    u, v : WeightExpr
    m, p : float
        Positive exponents.
    tol : float
        Relative tolerance of the quadratures.
    """

    def __init__(self, u, v, m, p, tol=1e-10):
        if not (m > 0 and p > 0):
            raise ValueError("m and p must be positive")
        self.u, self.v = u, v
        self.m, self.p = float(m), float(p)
        self.P = self.p / self.m
        self.tol = tol
        self._memo: dict[float, float] = {}
        self._lock = threading.Lock()
        self._inf = None

    def __repr__(self):
        return (f"FundamentalFunction(u={W.to_text(self.u)}, v={W.to_text(self.v)}, "
                f"m={self.m:g}, p={self.p:g})")

    # -- primitives ---------------------------------------------------------

    def V(self, t):
        """``int_0^t v``."""
        return W.integrate_many(self.v, 0.0, t, tol=self.tol) if np.ndim(t) else \
            W.integrate(self.v, 0.0, t, tol=self.tol)

    def U(self, s, t):
        return W.integrate_many(self.u, s, t, tol=self.tol)

    def _exponent_at_zero(self, power):
        """Exponent of ``v(s) U(s,t)^power`` as ``s -> 0``, plus one."""
        ov = asy.weight_order(self.v, asy.ZERO_END)
        ou = asy.weight_order(self.u, asy.ZERO_END)
        if ov.is_zero(asy.ZERO_END):
            return 1.0
        g = ov.alpha + 1.0
        if not ou.is_zero(asy.ZERO_END) and ou.alpha < -1:
            g += power * (ou.alpha + 1.0)
        return g

    def _U0(self, t):
        try:
            return W.integrate_many(self.u, 0.0, t, tol=self.tol)
        except NonIntegrableNearZero:
            return np.zeros(np.shape(t))

    def _check_v(self):
        ov = asy.weight_order(self.v, asy.ZERO_END)
        if not ov.is_zero(asy.ZERO_END) and ov.alpha <= -1:
            raise NonIntegrableNearZero(f"v behaves like t^{ov.alpha:g} near 0")

    def _nested(self, t, power):
        """``int_0^t v(s) U(s,t)^power ds`` for an array of finite ``t > 0``.

        The range is cut at ``s0 = min(t/2, 1)`` and ``t/2``: a power substitution
        absorbs the singularity at 0, a log variable covers ``(s0, t/2)`` and
        ``t - s = (t/2) x^{1/(power+1)}`` absorbs the one at ``s = t``.
        """
        t = np.asarray(t, dtype=float)
        n = t.size
        g0 = self._exponent_at_zero(power)
        if g0 <= 0:
            return np.full(n, np.inf)
        a1 = power + 1.0
        u, v = self.u, self.v
        s0 = np.minimum(0.5 * t, 1.0)

        def f(x, i):
            kind, j = np.divmod(i, n)
            tt = t[j]
            with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
                s = np.empty_like(x)
                jac = np.empty_like(x)
                Us = np.empty_like(x)
                A, B, C = kind == 0, kind == 1, kind == 2
                xa = x[A]
                s[A] = s0[j[A]] * xa ** (1.0 / g0)
                jac[A] = np.where(xa > 0, s[A] / (g0 * xa), 0.0)
                s[B] = np.exp(x[B])
                jac[B] = s[B]
                d = 0.5 * x[C] ** (1.0 / a1)
                s[C] = tt[C] * (1.0 - d)
                jac[C] = np.where(x[C] > 0, tt[C] * d / (a1 * x[C]), 0.0)
                short = np.zeros(x.shape, dtype=bool)
                short[C] = d < _SHORT
                if short.any():
                    dd = d[d < _SHORT]
                    ts = tt[short]
                    Us[short] = W.evaluate(u, ts * (1.0 - 0.5 * dd)) * ts * dd
                rest = ~short
                if rest.any():
                    Us[rest] = W.integrate_many(u, s[rest], tt[rest], tol=self.tol * 0.1)
                vs = W.evaluate(v, s)
                val = vs * Us ** power * jac
                # 0 * inf := 0
                val = np.where((vs == 0) | (jac == 0) | (s <= 0), 0.0, val)
            return val

        lo = np.concatenate([np.zeros(n), np.log(s0), np.zeros(n)])
        hi = np.concatenate([np.ones(n), np.log(np.maximum(0.5 * t, s0)), np.ones(n)])
        groups = np.tile(np.arange(n), 3)
        res, _ = batch_quad(f, lo, hi, rtol=self.tol, groups=groups)
        return res

    # -- phi ----------------------------------------------------------------

    def phi_p(self, t):
        """``phi(t)^p``; ``t`` may be a scalar, an array, or ``inf``."""
        self._check_v()
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t <= 0):
            raise ValueError("t must be positive")
        out = np.empty(t.shape)
        fin = np.isfinite(t)
        if (~fin).any():
            out[~fin] = self.phi_p_infinity()
        tf = t[fin]
        memo = self._memo
        vals = np.array([memo.get(x, np.nan) for x in tf.tolist()])
        miss = np.isnan(vals)
        if miss.any():
            keys = np.unique(tf[miss])
            new = self._nested(keys, self.P)
            with self._lock:
                for k, val in zip(keys.tolist(), new.tolist()):
                    memo.setdefault(k, val)
            vals = np.array([memo[x] for x in tf.tolist()])
        out[fin] = vals
        return float(out[0]) if scalar else out

    def phi(self, t):
        return self.phi_p(t) ** (1.0 / self.p)

    def phi_p_infinity(self) -> float:
        """``phi(inf)^p = int_0^inf v(s) U(s,inf)^{p/m} ds`` (possibly ``inf``)."""
        if self._inf is not None:
            return self._inf
        self._check_v()
        order = asy.phi_p_order(self.u, self.v, self.P, asy.INF_END)
        if order is None or asy.limit(order, asy.INF_END) == "inf":
            val = math.inf
        else:
            val = self._phi_p_inf_numeric()
        self._inf = val
        return val

    def _phi_p_inf_numeric(self):
        P, u, v = self.P, self.u, self.v
        g0 = self._exponent_at_zero(P)
        if g0 <= 0:
            return math.inf

        def f0(x, i):
            with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
                s = x ** (1.0 / g0)
                jac = np.where(x > 0, s / (g0 * x), 0.0)
                vs = W.evaluate(v, s)
                Us = W.integrate_many(u, s, np.inf, tol=self.tol * 0.1)
                val = vs * Us ** P * jac
                return np.where((vs == 0) | (jac == 0), 0.0, val)

        def f1(x, i):
            with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
                s = np.exp(x)
                vs = W.evaluate(v, s)
                Us = W.integrate_many(u, s, np.inf, tol=self.tol * 0.1)
                val = s * vs * Us ** P
                return np.where((vs == 0) | ~np.isfinite(s), 0.0, val)

        a, _ = batch_quad(f0, [0.0], [1.0], rtol=self.tol)
        b, _ = batch_quad_inf(f1, [0.0], rtol=self.tol)
        return float(a[0] + b[0])

    # -- derivative ---------------------------------------------------------

    def J(self, t):
        """``int_0^t v(s) U(s,t)^{p/m-1} ds``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self._nested(t, self.P - 1.0)

    def dphi_p(self, t):
        """Derivative of ``phi^p``: ``(p/m) u(t) J(t)`` (zero where ``u(t) = 0``)."""
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ut = W.evaluate(self.u, t)
        out = np.zeros(t.shape)
        nz = ut > 0
        if nz.any():
            out[nz] = self.P * ut[nz] * self.J(t[nz])
        return float(out[0]) if scalar else out

    def phi_prime(self, t):
        """``phi'(t) = (1/m) phi^{1-p}(t) u(t) J(t)``.

        Raises DegenerateAtPoint when ``phi(t) = 0`` and ``p > 1``.
        """
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        fp = np.atleast_1d(self.phi_p(t))
        if self.p > 1 and np.any(fp == 0):
            raise DegenerateAtPoint(f"phi vanishes at t={t[fp == 0][0]:g} and p > 1")
        d = self.dphi_p(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            # (phi^p)^{1/p - 1} / p, with 0^0 := 1
            pw = 1.0 / self.p - 1.0
            fac = np.where(fp > 0, fp ** pw, 1.0 if pw == 0 else 0.0) / self.p
        out = np.where(d == 0, 0.0, fac * d)
        return float(out[0]) if scalar else out

    # -- admissibility and level sets ---------------------------------------

    def _first_positive(self):
        """Infimum of ``{t : phi(t) > 0}`` from the supports of the terms."""
        tv = W.terms(self.v)
        tu = W.terms(self.u)
        if not tv or not tu:
            return math.inf
        sv = min(t.lo for t in tv)
        cand = [max(t.lo, sv) for t in tu if t.hi > sv]
        return min(cand) if cand else math.inf

    def is_admissible(self, probe_depth: int = 40) -> Admissibility:
        """Check ``0 < phi(t) < inf`` symbolically and on ``2^-d, ..., 2^d``."""
        t0 = self._first_positive()
        if t0 > 0:
            return Admissibility("degenerate_zero", 1.0 if math.isinf(t0) else t0)
        probe = 2.0 ** np.arange(-probe_depth, probe_depth + 1, dtype=float)
        try:
            self._check_v()
        except NonIntegrableNearZero:
            return Admissibility("degenerate_infinite", float(probe[0]))
        if asy.phi_p_order(self.u, self.v, self.P, asy.ZERO_END) is None:
            return Admissibility("degenerate_infinite", float(probe[0]))
        vals = self.phi_p(probe)
        bad0 = np.flatnonzero(~(vals > 0))
        # an infinite value where V or U(0,t) overflows is a float overflow, not divergence
        with np.errstate(over="ignore"):
            sizes = self.V(probe) + self._U0(probe)
        badi = np.flatnonzero(~np.isfinite(vals) & np.isfinite(sizes))
        if badi.size and (not bad0.size or badi[0] <= bad0[0]):
            return Admissibility("degenerate_infinite", float(probe[badi[0]]))
        if bad0.size:
            return Admissibility("degenerate_zero", float(probe[bad0[0]]))
        return ADMISSIBLE

    def level_value(self, kind, t):
        if kind in ("phi_p", "PhiP"):
            return self.phi_p(t)
        if kind == "V":
            return W.integrate(self.v, 0.0, t, tol=self.tol * 0.01)
        raise ValueError(f"unknown level kind {kind!r}")

    def solve_level(self, kind, target, bracket=(2.0 ** -60, 2.0 ** 60), rtol=1e-9):
        """Find ``t`` in ``bracket`` with ``value(t) = target`` for the nondecreasing
        ``value`` = ``phi^p`` (kind ``"phi_p"``) or ``V`` (kind ``"V"``)."""
        if not target > 0:
            raise ValueError("target must be positive")
        lo, hi = bracket
        flo, fhi = self.level_value(kind, lo), self.level_value(kind, hi)
        if not (flo <= target <= fhi):
            raise TargetNotBracketed(
                f"{kind}({lo:g})={flo:g}, {kind}({hi:g})={fhi:g}, target {target:g}")
        if flo == target:
            return float(lo)
        if fhi == target:
            return float(hi)

        def g(x):
            return self.level_value(kind, math.exp(x)) / target - 1.0

        # exp(log(t)) need not round back to t; an endpoint within rtol is the answer
        for end in (lo, hi):
            if abs(g(math.log(end))) <= rtol:
                return float(end)
        try:
            x = optimize.brentq(g, math.log(lo), math.log(hi), xtol=1e-15, rtol=1e-15,
                                maxiter=400)
        except (RuntimeError, ValueError) as exc:
            raise LevelSolveFailed(str(exc)) from exc
        t = math.exp(x)
        # brentq stops on the bracket width; step to the better neighbour if needed
        if abs(g(x)) > rtol:
            for cand in (np.nextafter(t, 0), np.nextafter(t, np.inf)):
                if abs(g(math.log(cand))) <= rtol:
                    return float(cand)
            raise LevelSolveFailed(f"residual {g(x):.3g} at t={t:g}")
        return t

"""Norms of nonincreasing step functions in Lambda^q(w) and CL^{m,p}(u,v).

For a step ``f* = c_j`` on ``[b_{j-1}, b_j)`` the inner Copson integral is exact::

    int_t^inf u (f*)^m = c_j^m U(t, b_j) + I_j,   I_j = sum_{i>j} c_i^m U(b_{i-1}, b_i)

so only the outer integral in ``t`` needs quadrature (one batched call).
"""
from __future__ import annotations

import math

import numpy as np

from . import asymptotics as asy
from . import weights as W
from .quadrature import batch_quad
from .stepfunction import StepFunction


def lorentz_functional(w, f: StepFunction, q) -> float:
    """``int_0^inf w (f*)^q`` (exact apart from the weight integrals)."""
    g = f if f.is_canonical() else f.rearrange()
    if g.is_zero():
        return 0.0
    k = np.asarray(g.knots)
    a = np.concatenate([[0.0], k[:-1]])
    c = np.asarray(g.values)
    nz = c > 0
    try:
        Wp = W.integrate_many(w, a[nz], k[nz])
    except Exception:
        return math.inf
    terms = c[nz] ** q * Wp
    return math.inf if not np.all(np.isfinite(terms)) else math.fsum(terms)


def lorentz_norm(w, f: StepFunction, q) -> float:
    return lorentz_functional(w, f, q) ** (1.0 / q)


def _zero_exponent(u, v, P):
    """Exponent ``g`` with ``v(t) (int_t u)^P ~ t^{g-1}`` as ``t -> 0``."""
    ov = asy.weight_order(v, asy.ZERO_END)
    ou = asy.weight_order(u, asy.ZERO_END)
    if ov.is_zero(asy.ZERO_END):
        return 1.0
    g = ov.alpha + 1.0
    if not ou.is_zero(asy.ZERO_END) and ou.alpha < -1:
        g += P * (ou.alpha + 1.0)
    return g


def piece_integrals(u, v, P, a, b, c, I, rtol=1e-10):
    """``sum_j int_{a_j}^{b_j} v(t) (c_j U(t, b_j) + I_j)^P dt`` (``a_0`` may be 0).

    The first piece starting at 0 uses ``t = b x^{1/g}``; long pieces use a log
    variable.
    """
    a, b, c, I = (np.asarray(x, dtype=float) for x in (a, b, c, I))
    if a.size == 0:
        return 0.0
    g0 = _zero_exponent(u, v, P)
    if np.any(a == 0) and g0 <= 0:
        return math.inf
    kind = np.where(a == 0, 0, np.where(b > 2 * a, 1, 2))
    lo = np.where(kind == 0, 0.0, np.where(kind == 1, np.log(np.maximum(a, 1e-300)), a))
    hi = np.where(kind == 0, 1.0, np.where(kind == 1, np.log(b), b))

    def f(x, i):
        k = kind[i]
        with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
            t = np.where(k == 0, b[i] * x ** (1.0 / g0), np.where(k == 1, np.exp(x), x))
            jac = np.where(k == 0, np.where(x > 0, t / (g0 * x), 0.0),
                           np.where(k == 1, t, 1.0))
            t = np.minimum(t, b[i])
            inner = c[i] * W.integrate_many(u, t, b[i]) + I[i]
            val = W.evaluate(v, t) * inner ** P * jac
        return np.where(np.isnan(val), 0.0, val)

    vals, _ = batch_quad(f, lo, hi, rtol=rtol, groups=np.zeros(a.size, dtype=np.intp))
    return float(vals[0])


def cl_functional(u, v, m, p, f: StepFunction, rtol=1e-10) -> float:
    """``int_0^inf v(t) (int_t^inf u (f*)^m)^{p/m} dt``."""
    g = f if f.is_canonical() else f.rearrange()
    if g.is_zero():
        return 0.0
    P = p / m
    b = np.asarray(g.knots)
    a = np.concatenate([[0.0], b[:-1]])
    cm = np.asarray(g.values) ** m
    # I_j only involves pieces j+1, ..., all away from 0
    seg = cm[1:] * W.integrate_many(u, a[1:], b[1:])
    I = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    return piece_integrals(u, v, P, a, b, cm, I, rtol)


def cl_norm(u, v, m, p, f: StepFunction, rtol=1e-10) -> float:
    return cl_functional(u, v, m, p, f, rtol) ** (1.0 / p)


def ratio(u, v, w, m, p, q, f: StepFunction, rtol=1e-10) -> float:
    """``||f||_{Lambda^q(w)} / ||f||_{CL^{m,p}(u,v)}`` (nan if the denominator is 0)."""
    den = cl_norm(u, v, m, p, f, rtol)
    num = lorentz_norm(w, f, q)
    if den == 0:
        return math.nan
    return num / den

"""Symbolic weights on (0, inf).

A weight is a small expression tree.  Every tree expands into a finite list of
terms ``c * t**alpha * exp(lam * t)`` restricted to ``[lo, hi)``, which is what
evaluation, integration and the endpoint analysis work with.

The text grammar is::

    pow(c, alpha)                  c * t**alpha
    exp(c, lam)                    c * exp(lam * t)
    piecewise([k1, ...], [v0, ...]) v0 on (0,k1), v1 on [k1,k2), ..., last to inf
    sum(w1, w2, ...)
    prod(w1, w2)
    restrict(w, a, b)              w on [a, b), zero elsewhere

Numbers may be written as ``inf`` or as fractions such as ``-3/4``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy import special

from .errors import NonIntegrableNearZero, WeightParseError
from .quadrature import batch_quad

__all__ = [
    "PowerLaw", "Exponential", "PiecewiseConstant", "Sum", "Product", "Restrict",
    "WeightExpr", "Term", "terms", "evaluate", "integrate", "integrate_many",
    "parse_weight", "to_text", "leading_at_zero", "leading_at_infinity",
    "constant", "zero",
]


# ---------------------------------------------------------------------------
# tree


@dataclass(frozen=True)
class PowerLaw:
    coef: float
    alpha: float

    def __post_init__(self):
        _check_coef(self.coef)
        if not math.isfinite(self.alpha):
            raise ValueError("power exponent must be finite")


@dataclass(frozen=True)
class Exponential:
    """``coef * exp(rate * t)``."""

    coef: float
    rate: float

    def __post_init__(self):
        _check_coef(self.coef)
        if not math.isfinite(self.rate):
            raise ValueError("rate must be finite")


@dataclass(frozen=True)
class PiecewiseConstant:
    """``values[0]`` on ``(0, knots[0])``, ..., ``values[-1]`` on ``[knots[-1], inf)``."""

    knots: tuple
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "knots", tuple(float(k) for k in self.knots))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != len(self.knots) + 1:
            raise ValueError("piecewise needs exactly one more value than knots")
        k = np.asarray(self.knots)
        if k.size and (k[0] <= 0 or np.any(np.diff(k) <= 0) or not np.all(np.isfinite(k))):
            raise ValueError("knots must be positive, finite and strictly increasing")
        for v in self.values:
            _check_coef(v)


@dataclass(frozen=True)
class Sum:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("sum needs at least one child")


@dataclass(frozen=True)
class Product:
    left: "WeightExpr"
    right: "WeightExpr"


@dataclass(frozen=True)
class Restrict:
    """``child`` on ``[lo, hi)`` and zero elsewhere."""

    child: "WeightExpr"
    lo: float
    hi: float

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise ValueError("restrict needs 0 <= lo < hi")


WeightExpr = Union[PowerLaw, Exponential, PiecewiseConstant, Sum, Product, Restrict]


def _check_coef(c):
    if not (math.isfinite(c) and c >= 0):
        raise ValueError(f"coefficients must be finite and nonnegative, got {c}")


def constant(c=1.0) -> PowerLaw:
    return PowerLaw(float(c), 0.0)


def zero() -> PowerLaw:
    return PowerLaw(0.0, 0.0)


# ---------------------------------------------------------------------------
# normal form


class Term(NamedTuple):
    c: float
    alpha: float
    lam: float
    lo: float
    hi: float


def terms(w: WeightExpr) -> list[Term]:
    """Expand ``w`` into nonzero terms ``c t^alpha e^{lam t}`` on ``[lo, hi)``."""
    if isinstance(w, PowerLaw):
        out = [Term(w.coef, w.alpha, 0.0, 0.0, math.inf)]
    elif isinstance(w, Exponential):
        out = [Term(w.coef, 0.0, w.rate, 0.0, math.inf)]
    elif isinstance(w, PiecewiseConstant):
        edges = (0.0,) + w.knots + (math.inf,)
        out = [Term(v, 0.0, 0.0, edges[i], edges[i + 1]) for i, v in enumerate(w.values)]
    elif isinstance(w, Sum):
        out = [t for ch in w.children for t in terms(ch)]
    elif isinstance(w, Product):
        out = []
        for a in terms(w.left):
            for b in terms(w.right):
                lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
                if hi > lo:
                    out.append(Term(a.c * b.c, a.alpha + b.alpha, a.lam + b.lam, lo, hi))
    elif isinstance(w, Restrict):
        out = []
        for a in terms(w.child):
            lo, hi = max(a.lo, w.lo), min(a.hi, w.hi)
            if hi > lo:
                out.append(Term(a.c, a.alpha, a.lam, lo, hi))
    else:
        raise TypeError(f"not a weight expression: {w!r}")
    return [t for t in out if t.c > 0]


def evaluate(w: WeightExpr, t):
    """Pointwise value of ``w``; ``t`` may be a scalar or an array of positive reals."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        lt = np.log(t)
        for c, al, lam, lo, hi in terms(w):
            inside = (t >= lo) & (t < hi)
            out += np.where(inside, c * np.exp(al * lt + lam * t), 0.0)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# integration


def integrate(w: WeightExpr, a, b, tol=1e-10, method="auto") -> float:
    """``int_a^b w`` with ``0 <= a <= b <= inf``; ``inf`` when it diverges.

    ``method="quadrature"`` bypasses the closed forms (test hook).
    Raises NonIntegrableNearZero when ``a = 0`` and a term behaves like
    ``t^alpha`` with ``alpha <= -1`` near 0.
    """
    if not (0 <= a <= b):
        raise ValueError("need 0 <= a <= b")
    return float(integrate_many(w, [a], [b], tol=tol, method=method)[0])


def integrate_many(w: WeightExpr, a, b, tol=1e-10, method="auto"):
    """Vectorised :func:`integrate` over arrays of limits (broadcast together)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    shape = a.shape
    a, b = a.ravel(), b.ravel()
    out = np.zeros(a.shape)
    for term in terms(w):
        out += _term_integral(term, a, b, tol, method)
    return out.reshape(shape)


def _term_integral(term: Term, a, b, tol, method):
    c, al, lam, lo, hi = term
    A = np.maximum(a, lo)
    B = np.minimum(b, hi)
    live = B > A
    out = np.zeros(a.shape)
    if not live.any():
        return out
    if al <= -1 and np.any(live & (A == 0)):
        raise NonIntegrableNearZero(f"t^{al:g} is not integrable near 0")
    diverge = live & np.isinf(B) & ((lam > 0) | ((lam == 0) & (al >= -1)))
    out[diverge] = np.inf
    live &= ~diverge
    if not live.any():
        return out
    idx = np.flatnonzero(live)
    A, B = A[idx], B[idx]
    if method == "quadrature":
        vals = _term_quad(c, al, lam, A, B, tol)
    elif method == "auto":
        vals = _term_closed(c, al, lam, A, B, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    out[idx] = vals
    return out


def _term_closed(c, al, lam, A, B, tol):
    g = al + 1.0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if lam == 0.0:
            if g == 0.0:
                return c * np.log(B / A)
            pos = A > 0
            ratio = np.where(pos, B / np.where(pos, A, 1.0), 1.0)
            fin = c * np.where(pos, A ** g * np.expm1(g * np.log(ratio)), B ** g) / g
            return np.where(np.isinf(B), -c * A ** g / g, fin)
        if al == 0.0:
            return np.where(np.isinf(B), -c * np.exp(lam * A) / lam,
                            c * np.exp(lam * A) * np.expm1(lam * (B - A)) / lam)
        if lam < 0 and g > 0:
            return _gamma_piece(c, g, -lam, A, B, tol)
        if lam > 0 and al == int(al) and al > 0:
            n = int(al)
            ok = lam * A >= 2 * n
            out = np.empty(A.shape)
            if ok.any():
                out[ok] = c * _int_power_exp(n, lam, A[ok], B[ok])
            if (~ok).any():
                out[~ok] = _term_quad(c, al, lam, A[~ok], B[~ok], tol)
            return out
    return _term_quad(c, al, lam, A, B, tol)


def _gamma_piece(c, g, mu, A, B, tol):
    """``c int_A^B t^(g-1) e^{-mu t}`` through regularised incomplete gammas."""
    xa, xb = mu * A, mu * B
    upper = xa > g
    with np.errstate(over="ignore", invalid="ignore"):
        pa, pb = special.gammainc(g, xa), special.gammainc(g, xb)
        qa, qb = special.gammaincc(g, xa), special.gammaincc(g, xb)
        diff = np.where(upper, qa - qb, pb - pa)
        big = np.where(upper, qa, pb)
        pref = math.exp(special.gammaln(g) - g * math.log(mu))
    out = c * pref * diff
    # cancellation for short intervals: fall back to quadrature
    bad = ~(diff > 1e-3 * big) | ~np.isfinite(out)
    bad &= np.isfinite(B) | (xa < 600)
    if bad.any():
        out[bad] = _term_quad(c, g - 1.0, -mu, A[bad], B[bad], tol)
    return out


def _int_power_exp(n, lam, A, B):
    # I_k = [t^k e^{lam t}/lam]_A^B - (k/lam) I_{k-1}
    I = np.exp(lam * A) * np.expm1(lam * (B - A)) / lam
    for k in range(1, n + 1):
        I = (B ** k * np.exp(lam * B) - A ** k * np.exp(lam * A)) / lam - k / lam * I
    return I


def _term_quad(c, al, lam, A, B, tol):
    """Adaptive quadrature of one term, in variables that tame both endpoints."""
    g = al + 1.0
    out = np.zeros(A.shape)
    A = A.copy()
    B = B.copy()
    # near 0: t = S * s^(1/g) turns t^al dt into a constant times ds
    zero = A == 0
    if zero.any():
        S = B[zero]
        if lam != 0:
            S = np.minimum(S, 1.0 / abs(lam))
        sz = S.copy()

        def f0(s, i):
            t = sz[i] * s ** (1.0 / g)
            return np.exp(lam * t)

        v, _ = batch_quad(f0, np.zeros_like(S), np.ones_like(S), rtol=tol)
        out[zero] += c * S ** g / g * v
        A[zero] = S
    rest = B > A
    if rest.any():
        Ar, Br = A[rest], B[rest]
        inf = np.isinf(Br)
        if inf.any():
            # lam < 0 here; cut where the tail is below double precision
            mu = -lam
            Br = Br.copy()
            Br[inf] = np.maximum(Ar[inf], 1.0 / mu) * (800.0 + 10.0 * abs(g))
        la, lb = np.log(Ar), np.log(Br)

        def f1(x, i):
            with np.errstate(over="ignore"):
                return np.exp(g * x + lam * np.exp(x))

        v, _ = batch_quad(f1, la, lb, rtol=tol)
        out[rest] += c * v
    return out


# ---------------------------------------------------------------------------
# endpoint behaviour


def leading_at_zero(w: WeightExpr):
    """``(coef, alpha)`` with ``w(t) ~ coef * t^alpha`` as ``t -> 0+``; None if w = 0 near 0."""
    ts = [t for t in terms(w) if t.lo == 0]
    if not ts:
        return None
    al = min(t.alpha for t in ts)
    return sum(t.c for t in ts if t.alpha == al), al


def leading_at_infinity(w: WeightExpr):
    """``(coef, lam, alpha)`` with ``w(t) ~ coef t^alpha e^{lam t}`` at infinity; None if w = 0 there."""
    ts = [t for t in terms(w) if math.isinf(t.hi)]
    if not ts:
        return None
    lam, al = max((t.lam, t.alpha) for t in ts)
    return sum(t.c for t in ts if (t.lam, t.alpha) == (lam, al)), lam, al


# ---------------------------------------------------------------------------
# text form

_TOKEN = re.compile(r"""\s*(?:
    (?P<num>[+-]?(?:inf|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
        (?:/(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)
  | (?P<name>[A-Za-z_]+)
  | (?P<punct>[()\[\],])
)""", re.VERBOSE)


class _Tokens:
    def __init__(self, text):
        self.text = text
        self.items = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise WeightParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
            kind = m.lastgroup
            self.items.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.items[self.i] if self.i < len(self.items) else (None, None, len(self.text))

    def take(self, kind=None, value=None):
        k, v, pos = self.peek()
        if k is None or (kind and k != kind) or (value and v != value):
            want = value or kind or "token"
            raise WeightParseError(f"expected {want} at {pos} in {self.text!r}")
        self.i += 1
        return v

    def number(self):
        tok = self.take("num")
        try:
            if "/" in tok:
                num, den = tok.split("/")
                return float(num) / float(den)
            return float(tok)
        except (ValueError, ZeroDivisionError) as exc:
            raise WeightParseError(f"bad number {tok!r}") from exc

    def numbers(self):
        self.take("punct", "[")
        out = []
        if self.peek()[1] != "]":
            out.append(self.number())
            while self.peek()[1] == ",":
                self.take()
                out.append(self.number())
        self.take("punct", "]")
        return out

    def done(self):
        if self.i != len(self.items):
            raise WeightParseError(f"trailing input at {self.peek()[2]} in {self.text!r}")


def _parse(tk: _Tokens) -> WeightExpr:
    name = tk.take("name").lower()
    tk.take("punct", "(")
    try:
        if name == "pow":
            c = tk.number(); tk.take("punct", ","); a = tk.number()
            w = PowerLaw(c, a)
        elif name == "exp":
            c = tk.number(); tk.take("punct", ","); lam = tk.number()
            w = Exponential(c, lam)
        elif name == "piecewise":
            k = tk.numbers(); tk.take("punct", ","); v = tk.numbers()
            w = PiecewiseConstant(tuple(k), tuple(v))
        elif name == "sum":
            ch = [_parse(tk)]
            while tk.peek()[1] == ",":
                tk.take()
                ch.append(_parse(tk))
            w = Sum(tuple(ch))
        elif name == "prod":
            left = _parse(tk); tk.take("punct", ","); right = _parse(tk)
            w = Product(left, right)
        elif name == "restrict":
            ch = _parse(tk); tk.take("punct", ",")
            lo = tk.number(); tk.take("punct", ","); hi = tk.number()
            w = Restrict(ch, lo, hi)
        else:
            raise WeightParseError(f"unknown weight constructor {name!r}")
    except WeightParseError:
        raise
    except ValueError as exc:
        raise WeightParseError(str(exc)) from exc
    tk.take("punct", ")")
    return w


def parse_weight(text: str) -> WeightExpr:
    """Parse the text grammar described in the module docstring."""
    if not isinstance(text, str):
        raise WeightParseError("weight must be given as a string")
    tk = _Tokens(text)
    w = _parse(tk)
    tk.done()
    return w


def _num(x: float) -> str:
    return "inf" if math.isinf(x) else repr(float(x))


def to_text(w: WeightExpr) -> str:
    """Inverse of :func:`parse_weight`; floats are written with full precision."""
    if isinstance(w, PowerLaw):
        return f"pow({_num(w.coef)},{_num(w.alpha)})"
    if isinstance(w, Exponential):
        return f"exp({_num(w.coef)},{_num(w.rate)})"
    if isinstance(w, PiecewiseConstant):
        k = ",".join(_num(x) for x in w.knots)
        v = ",".join(_num(x) for x in w.values)
        return f"piecewise([{k}],[{v}])"
    if isinstance(w, Sum):
        return "sum(" + ",".join(to_text(c) for c in w.children) + ")"
    if isinstance(w, Product):
        return f"prod({to_text(w.left)},{to_text(w.right)})"
    if isinstance(w, Restrict):
        return f"restrict({to_text(w.child)},{_num(w.lo)},{_num(w.hi)})"
    raise TypeError(f"not a weight expression: {w!r}")

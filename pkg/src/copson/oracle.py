"""Brute-force checks that do not rely on the condition formulas.

* :func:`empirical_embedding_constant` maximises ``||f||_{Lambda^q(w)} / ||f||_CL``
  over nonincreasing step functions (a lower bound for the optimal constant).
* :func:`hardy_condition` and :func:`hardy_saturator` for the Hardy inequality
  ``(int_a^b (int_t^b h)^q rho)^{1/q} <~ int_a^b h eta * B``.
* :func:`discrete_lemma_constant` and :func:`holder_saturator` for the sequence lemmas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as sint

from . import norms
from . import weights as W
from .config import DEFAULT_BUDGET, DEFAULT_GRID, GridConfig, OptimizerBudget
from .errors import ConditionInfinite, DegenerateB, NotAdmissible, NotGeometric
from .fundamental import FundamentalFunction
from .quadrature import batch_quad
from .stepfunction import StepFunction

DELTA_START, DELTA_END, ANNEAL_STEPS = 0.5, 0.01, 64
SWEEP_REFINED = 4


# ---------------------------------------------------------------------------
# empirical embedding constant


@dataclass
class OracleResult:
    C_emp: float
    best_f: StepFunction | None
    evaluations: int = 0
    skipped: int = 0
    per_candidate: list = field(default_factory=list)

    def to_dict(self):
        return {"C_emp": "inf" if math.isinf(self.C_emp) else self.C_emp,
                "best_f": self.best_f.to_text() if self.best_f is not None else None,
                "evaluations": self.evaluations, "skipped": self.skipped}


def _delta(j):
    """Step size of local move ``j``: geometric from 0.5 to 0.01 over 64 moves, then flat.

    The schedule does not depend on the budget, so a longer search extends a
    shorter one and the result is monotone in ``local_steps``.
    """
    s = min(j / (ANNEAL_STEPS - 1), 1.0)
    return DELTA_START * (DELTA_END / DELTA_START) ** s


def _random_candidate(rng, window, knot_count, indicator):
    lo, hi = window
    if indicator:
        x = 2.0 ** rng.uniform(lo, hi)
        return np.array([x]), np.array([1.0])
    exps = np.sort(rng.uniform(lo, hi, size=knot_count))
    knots = np.unique(2.0 ** exps)
    vals = np.cumsum(rng.exponential(size=knots.size))[::-1]
    return knots, vals


class _Objective:
    def __init__(self, u, v, w, m, p, q, rtol):
        self.args = (u, v, w, m, p, q)
        self.rtol = rtol
        self.count = 0
        self.skipped = 0

    def __call__(self, knots, vals):
        u, v, w, m, p, q = self.args
        self.count += 1
        f = StepFunction(tuple(knots), tuple(vals))
        den = norms.cl_norm(u, v, m, p, f, self.rtol)
        if den == 0 or math.isnan(den):
            self.skipped += 1
            return -math.inf
        num = norms.lorentz_norm(w, f, q)
        if math.isinf(den):
            return 0.0
        return num / den


def _search(obj, rng, knots, vals, steps, window):
    best = obj(knots, vals)
    lo, hi = 2.0 ** window[0], 2.0 ** window[1]
    n = knots.size
    for j in range(steps):
        d = _delta(j)
        which = rng.integers(2 * n)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        k2, v2 = knots.copy(), vals.copy()
        if which < n:
            v2[which] *= math.exp(sign * d)
            ok = np.all(np.diff(v2) <= 0)
        else:
            i = which - n
            k2[i] *= math.exp(sign * d)
            ok = np.all(np.diff(k2) > 0) and lo <= k2[i] <= hi
        if not ok:
            continue
        val = obj(k2, v2)
        if val > best:
            best, knots, vals = val, k2, v2
    return best, knots, vals


def empirical_embedding_constant(u, v, w, m, p, q, budget: OptimizerBudget = DEFAULT_BUDGET,
                                 grid: GridConfig = DEFAULT_GRID, rtol=1e-9,
                                 check=True) -> OracleResult:
    """Largest ``||f||_{Lambda^q(w)} / ||f||_{CL^{m,p}(u,v)}`` found by random search.

    A sweep over indicators ``chi_[0, 2^j)`` comes first and its best entries
    are refined.  Candidate ``i`` uses its own generator seeded with ``(seed, i)``; every fourth
    candidate starts as an indicator ``chi_[0,x)``, the rest as random steps with
    ``knot_count`` knots log-uniform in the grid window.  Each is refined by
    ``local_steps`` greedy multiplicative moves.
    """
    if check:
        adm = FundamentalFunction(u, v, m, p).is_admissible()
        if not adm.ok:
            raise NotAdmissible(adm.status, adm.witness)
    obj = _Objective(u, v, w, m, p, q, rtol)
    window = (grid.lo, grid.hi)
    best, best_f, per = -math.inf, None, []
    # sweep of indicators chi_[0, 2^j), one per octave; the best few are refined
    sweep = [(obj(np.array([2.0 ** j]), np.array([1.0])), j)
             for j in range(grid.lo, grid.hi + 1)]
    for _, j in sorted(sweep, reverse=True)[:SWEEP_REFINED]:
        rng = np.random.default_rng([budget.seed, 2 ** 31 + j - grid.lo])
        val, knots, vals = _search(obj, rng, np.array([2.0 ** j]), np.array([1.0]),
                                   budget.local_steps, window)
        if val > best:
            best, best_f = val, StepFunction(tuple(knots), tuple(vals))
    for i in range(budget.candidates):
        rng = np.random.default_rng([budget.seed, i])
        knots, vals = _random_candidate(rng, window, budget.knot_count, i % 4 == 0)
        val, knots, vals = _search(obj, rng, knots, vals, budget.local_steps, window)
        per.append(val)
        if val > best:
            best, best_f = val, StepFunction(tuple(knots), tuple(vals))
    best = max(best, 0.0)
    return OracleResult(best, best_f, obj.count, obj.skipped, per)


def rescale_equivalence_check(u, v, w, m, p, q, budget: OptimizerBudget = DEFAULT_BUDGET,
                              grid: GridConfig = DEFAULT_GRID, rtol=1e-9) -> dict:
    """Compare ``C`` at ``(m, p, q)`` with ``C'^{1/m}`` at ``(1, p/m, q/m)``."""
    a = empirical_embedding_constant(u, v, w, m, p, q, budget, grid, rtol)
    b = empirical_embedding_constant(u, v, w, 1.0, p / m, q / m, budget, grid, rtol, check=False)
    back = b.C_emp ** (1.0 / m)
    rel = abs(a.C_emp - back) / max(a.C_emp, back) if max(a.C_emp, back) > 0 else 0.0
    return {"C_emp": a.C_emp, "C_rescaled": b.C_emp, "C_rescaled_root": back,
            "relative_difference": rel, "within_5_percent": rel <= 0.05}


def divergence_check(u, v, w, m, p, q, budget: OptimizerBudget = DEFAULT_BUDGET,
                     windows=(10, 20, 40), factor=10.0, rtol=1e-9) -> dict:
    """Empirical constants on growing windows ``2^{-L}..2^{L}``; flags growth by ``factor``."""
    vals = []
    for L in windows:
        g = GridConfig(-L, L)
        vals.append(empirical_embedding_constant(u, v, w, m, p, q, budget, g, rtol).C_emp)
    growth = vals[-1] / vals[0] if vals[0] > 0 else math.inf
    return {"windows": list(windows), "C_emp": vals, "growth": growth,
            "diverges": bool(growth > factor or math.isinf(vals[-1]))}


# ---------------------------------------------------------------------------
# Hardy inequality


@dataclass(frozen=True)
class HardyProblem:
    a: float
    b: float
    rho: object
    eta: object
    q: float

    def __post_init__(self):
        if not (0 <= self.a < self.b):
            raise ValueError("need 0 <= a < b")
        if not self.q > 0:
            raise ValueError("q must be positive")


def _hardy_grid(hp: HardyProblem, per_octave=32, octaves=40):
    """Points of ``(a, b)`` dense near ``a`` (and near ``b`` when finite)."""
    s = 2.0 ** (-np.arange(octaves * per_octave, -1, -1) / per_octave)
    if math.isinf(hp.b):
        t = hp.a + 2.0 ** np.linspace(-octaves, octaves, 2 * octaves * per_octave + 1)
        return t
    L = hp.b - hp.a
    left = hp.a + 0.5 * L * s
    right = hp.b - 0.5 * L * s[::-1]
    return np.unique(np.concatenate([left, right[1:-1]]))


def hardy_condition(hp: HardyProblem) -> float:
    """``B`` of the Hardy inequality: a supremum for ``q >= 1``, an integral for ``q < 1``."""
    t = _hardy_grid(hp)
    R = W.integrate_many(hp.rho, hp.a, t)
    eta = W.evaluate(hp.eta, t)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if hp.q >= 1:
            vals = R ** (1.0 / hp.q) / eta
            vals = np.where(np.isnan(vals), 0.0, vals)
            return float(np.max(vals))
        qc = hp.q / (hp.q - 1.0)
        psi = np.maximum.accumulate((eta ** qc)[::-1])[::-1]
        f = R ** (-qc) * W.evaluate(hp.rho, t) * psi
        f = np.where(np.isnan(f), 0.0, f)
        total = sint.simpson(f, x=t)
    return float(total ** (-1.0 / qc))


def hardy_lhs(hp: HardyProblem, h: StepFunction, rtol=1e-10) -> float:
    """``(int_a^b (int_t^b h)^q rho(t) dt)^{1/q}`` for a nonnegative step ``h`` on ``(a, b)``."""
    if h.is_zero():
        return 0.0
    k = np.asarray(h.knots)
    edges = np.concatenate([[hp.a], k[k > hp.a]])
    edges = edges[edges <= hp.b]
    c = np.asarray([h(x) for x in edges[:-1]])
    mass = c * np.diff(edges)
    Hr = np.concatenate([np.cumsum(mass[::-1])[::-1][1:], [0.0]])
    a, b = edges[:-1], edges[1:]
    g0 = 1.0
    if hp.a == 0:
        lead = W.leading_at_zero(hp.rho)
        if lead is not None and lead[1] < 0:
            g0 = lead[1] + 1.0

    def f(x, i):
        first = a[i] == 0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            t = np.where(first, b[i] * x ** (1.0 / g0), a[i] + (b[i] - a[i]) * x)
            jac = np.where(first, np.where(x > 0, t / (g0 * x), 0.0), b[i] - a[i])
            H = c[i] * (b[i] - t) + Hr[i]
            val = H ** hp.q * W.evaluate(hp.rho, t) * jac
        return np.where(np.isnan(val), 0.0, val)

    vals, _ = batch_quad(f, np.zeros(a.size), np.ones(a.size), rtol=rtol,
                         groups=np.zeros(a.size, dtype=np.intp))
    return float(vals[0]) ** (1.0 / hp.q)


def h_eta(hp: HardyProblem, h: StepFunction) -> float:
    """``int_a^b h eta``."""
    k = np.asarray(h.knots)
    edges = np.concatenate([[hp.a], k[(k > hp.a) & (k < hp.b)], [min(hp.b, k[-1])]])
    edges = np.unique(edges)
    c = np.asarray([h(x) for x in edges[:-1]])
    return math.fsum(c * W.integrate_many(hp.eta, edges[:-1], edges[1:]))


def _normalise(hp, knots, values):
    g = StepFunction(tuple(knots), tuple(values))
    return g.scale(1.0 / h_eta(hp, g))


def _saturators_q1(hp, knot_count):
    t = _hardy_grid(hp)
    R = W.integrate_many(hp.rho, hp.a, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = R ** (1.0 / hp.q) / W.evaluate(hp.eta, t)
    vals = np.where(np.isnan(vals), 0.0, vals)
    i = int(np.argmax(vals))
    ts = t[i]
    eps = 1.0 / knot_count
    out = []
    # a thin block just left and just right of the argmax
    lo = hp.a + (ts - hp.a) * (1 - eps)
    if lo > hp.a and ts > lo:
        out.append(_normalise(hp, (lo, ts), (0.0, 1.0)))
    hi = ts * (1 + eps) if math.isinf(hp.b) else ts + (hp.b - ts) * eps
    if hi > ts:
        out.append(_normalise(hp, (ts, hi), (0.0, 1.0)))
    return out


def _saturators_qsmall(hp, knot_count):
    # G(t) = int_t^b g follows a power of the tail of the condition density
    t = _hardy_grid(hp)
    R = W.integrate_many(hp.rho, hp.a, t)
    eta = W.evaluate(hp.eta, t)
    qc = hp.q / (hp.q - 1.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        psi = np.maximum.accumulate((eta ** qc)[::-1])[::-1]
        dens = np.where(np.isnan(R ** (-qc) * W.evaluate(hp.rho, t) * psi), 0.0,
                        R ** (-qc) * W.evaluate(hp.rho, t) * psi)
    seg = 0.5 * (dens[1:] + dens[:-1]) * np.diff(t)
    tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    out = []
    idx = np.unique(np.linspace(0, t.size - 1, knot_count + 1).round().astype(int))
    for beta in (0.25, 0.5, 1.0, 2.0, 4.0):
        G = tail[idx] ** beta
        if not np.all(np.isfinite(G)) or G[0] <= 0:
            continue
        mass = G[:-1] - G[1:]
        widths = np.diff(t[idx])
        vals = np.where(widths > 0, mass / widths, 0.0)
        if np.all(vals == 0):
            continue
        out.append(_normalise(hp, t[idx][1:], vals))
    out.extend(_saturators_q1(hp, knot_count))
    return out


@dataclass
class Saturation:
    g: StepFunction
    lhs: float
    condition: float

    @property
    def ratio(self):
        return self.lhs / self.condition


def hardy_saturator(hp: HardyProblem, knot_count: int = 64) -> Saturation:
    """A step ``g`` with ``int g eta = 1`` and a large Hardy left-hand side."""
    B = hardy_condition(hp)
    if not math.isfinite(B):
        raise ConditionInfinite("the Hardy condition is infinite")
    cands = _saturators_q1(hp, knot_count) if hp.q >= 1 else _saturators_qsmall(hp, knot_count)
    if not cands:
        raise ConditionInfinite("no admissible saturating candidate")
    best = max(cands, key=lambda g: hardy_lhs(hp, g))
    return Saturation(best, hardy_lhs(hp, best), B)


# ---------------------------------------------------------------------------
# sequence lemmas


VARIANTS = ("P20sum", "P20sup-inner", "P20supsup", "P21sum", "P21sup-inner", "P21supsup")


def growth_factor(b_seq, variant: str) -> float:
    """``D`` of the lemma: min ratio ``b_{k+1}/b_k`` (P20) or ``b_k/b_{k+1}`` (P21)."""
    b = np.asarray(b_seq, dtype=float)
    if b.size < 2:
        raise NotGeometric("need at least two terms")
    with np.errstate(divide="ignore", invalid="ignore"):
        r = b[1:] / b[:-1] if variant.startswith("P20") else b[:-1] / b[1:]
    D = float(np.nanmin(r)) if np.any(np.isfinite(r)) else math.nan
    if not D > 1:
        raise NotGeometric(f"growth factor {D} is not > 1")
    return D


def discrete_lemma_constant(b_seq, c_seq, alpha, variant: str) -> float:
    """LHS/RHS of the chosen inequality for the given sequences."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    growth_factor(b_seq, variant)
    b = np.asarray(b_seq, dtype=float)
    c = np.asarray(c_seq, dtype=float)
    if variant.startswith("P20"):
        acc_sum = np.cumsum(c[::-1])[::-1]
        acc_sup = np.maximum.accumulate(c[::-1])[::-1]
    else:
        acc_sum = np.cumsum(c)
        acc_sup = np.maximum.accumulate(c)
    base = c ** alpha * b
    if variant.endswith("supsup"):
        num, den = np.max(acc_sum ** alpha * b), np.max(base)
    elif variant.endswith("sup-inner"):
        num, den = math.fsum(acc_sup ** alpha * b), math.fsum(base)
    else:
        num, den = math.fsum(acc_sum ** alpha * b), math.fsum(base)
    if den == 0:
        return 1.0 if num == 0 else math.inf
    return float(num / den)


def holder_saturator(b_seq, p, q) -> np.ndarray:
    """``c`` with ``sum c^p = 1`` attaining ``(sum c^q b)^{1/q} = (sum b^{p/(p-q)})^{(p-q)/(pq)}``."""
    if not 0 < q < p:
        raise ValueError("need 0 < q < p")
    b = np.asarray(b_seq, dtype=float)
    if np.any(b < 0):
        raise ValueError("b must be nonnegative")
    if not np.any(b > 0):
        raise DegenerateB("all b_k vanish")
    s = math.fsum(b ** (p / (p - q)))
    return b ** (1.0 / (p - q)) / s ** (1.0 / p)


def holder_sides(a_seq, b_seq, p, q) -> tuple[float, float]:
    """Both sides of the Hoelder inequality ``(sum a^q b)^{1/q} <= ||a||_p ||b||_{p/(p-q)}``."""
    a = np.asarray(a_seq, dtype=float)
    b = np.asarray(b_seq, dtype=float)
    lhs = math.fsum(a ** q * b) ** (1.0 / q)
    rhs = math.fsum(a ** p) ** (1.0 / p) * math.fsum(b ** (p / (p - q))) ** ((p - q) / (p * q))
    return lhs, rhs

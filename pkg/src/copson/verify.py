"""Invariant checks for a single problem, used by ``copson verify``.

Each check returns ``{"name", "passed", "detail"}``.  Checks that need data
the problem does not provide (``w`` and ``q``, or ``g``) are skipped.
"""
from __future__ import annotations

import math

import numpy as np

from . import associated, conditions, discretization, oracle
from . import weights as W
from .errors import CopsonError, IndexOutOfWindow
from .fundamental import FundamentalFunction
from .stepfunction import StepFunction

RESIDUAL_TOL = 1e-6
SCALING_TOL = 1e-5
HOMOGENEITY_TOL = 1e-9
KAPPA = 50.0


def _check(name, passed, **detail):
    return {"name": name, "passed": bool(passed), "detail": detail}


def check_sequence(u, v, m, p, depth, ff):
    seq = discretization.build_sequence(u, v, m, p, depth, ff=ff)
    res = discretization.verify_sequence(seq, u, v, m, p, ff=ff)
    res.pop("per_k")
    worst = max(res.values())
    out = [_check("sequence_residuals", worst <= RESIDUAL_TOL, worst=worst, **res)]
    viol, n = 0, 0
    rng = np.random.default_rng(0)
    for k in range(seq.kmin + 3, seq.kmax + 1):
        a, b = seq[k - 1], seq[k]
        if not (math.isfinite(a) and math.isfinite(b)):
            continue
        t = a * (b / a) ** rng.random()
        try:
            est = discretization.covering_estimates(seq, u, v, m, p, k, t, ff=ff)
        except IndexOutOfWindow:
            continue
        n += 1
        viol += est["V_lhs"] > est["V_rhs"] * (1 + 1e-9)
        viol += est["Phi_lhs"] > est["Phi_rhs"] * (1 + 1e-9)
    out.append(_check("covering_estimates", viol == 0, samples=n, violations=int(viol)))
    return seq, out


def _log_slope(f, lam=(0.125, 0.5, 2.0, 8.0)):
    base = f(1.0)
    return [math.log(f(x) / base) / math.log(x) for x in lam]


def check_scaling(spec):
    """Condition values scale like ``u^{-1/m}``, ``v^{-1/p}`` and ``w^{1/q}``."""
    u, v, w = spec.weights()
    m, p, q = spec.m, spec.p, spec.q
    base = conditions.embedding_constant(u, v, w, m, p, q, spec.grid)
    if not base.embedding_holds:
        return [_check("scaling", True, skipped="conditions infinite")]
    out = []
    for label, expo, build in (
        ("u", -1 / m, lambda x: (W.Product(W.constant(x), u), v, w)),
        ("v", -1 / p, lambda x: (u, W.Product(W.constant(x), v), w)),
        ("w", 1 / q, lambda x: (u, v, W.Product(W.constant(x), w))),
    ):
        def total(x, build=build):
            return conditions.embedding_constant(*build(x), m, p, q, spec.grid).C_estimate
        slopes = _log_slope(total)
        err = max(abs(s - expo) for s in slopes)
        out.append(_check(f"scaling_{label}", err <= SCALING_TOL, expected=expo,
                          slopes=slopes, error=err))
    return out


def check_associated(spec, prims=None):
    u, v, _ = spec.weights()
    g = spec.step()
    m, p = spec.m, spec.p
    base = associated.associated_norm(u, v, m, p, g, spec.grid)
    out = []
    lam = 3.0
    scaled = associated.associated_norm(u, v, m, p, g.scale(lam), spec.grid)
    if math.isfinite(base):
        err = abs(scaled - lam * base) / max(lam * base, 1e-300)
        out.append(_check("assoc_homogeneity", err <= HOMOGENEITY_TOL, error=err))
        lengths = g.lengths[::-1].copy()
        perm = StepFunction.from_lengths(lengths, list(g.values)[::-1])
        other = associated.associated_norm(u, v, m, p, perm, spec.grid)
        out.append(_check("assoc_rearrangement", other == base, norm=base, permuted=other))
        dual = conditions.embedding_constant(u, v, g.rearrange(), m, p, 1.0, spec.grid).C_estimate
        ratio = dual / base if base > 0 else (1.0 if dual == 0 else math.inf)
        out.append(_check("assoc_duality", 1 / KAPPA <= ratio <= KAPPA, norm=base,
                          embedding=dual, ratio=ratio))
    else:
        out.append(_check("assoc_homogeneity", math.isinf(scaled), norm=base))
    return out


def check_oracle(spec):
    u, v, w = spec.weights()
    m, p, q = spec.m, spec.p, spec.q
    rep = conditions.embedding_constant(u, v, w, m, p, q, spec.grid)
    C = rep.C_estimate
    if math.isfinite(C):
        res = oracle.empirical_embedding_constant(u, v, w, m, p, q, spec.budget, spec.grid)
        ok = res.C_emp <= C * KAPPA and C <= res.C_emp * KAPPA
        if C == 0:
            ok = res.C_emp == 0
        return [_check("oracle_sandwich", ok, C_estimate=C, C_emp=res.C_emp, kappa=KAPPA)]
    div = oracle.divergence_check(u, v, w, m, p, q, spec.budget)
    return [_check("oracle_divergence", div["diverges"], **div)]


def run_checks(spec, oracle_checks=False) -> list:
    """All checks that apply to ``spec`` (a :class:`copson.cli.ProblemSpec`)."""
    u, v, w = spec.weights()
    ff = FundamentalFunction(u, v, spec.m, spec.p, tol=spec.grid.tol)
    adm = ff.is_admissible()
    out = [_check("admissible", adm.ok, status=adm.status, witness=adm.witness)]
    if not adm.ok:
        return out
    groups = [lambda: check_sequence(u, v, spec.m, spec.p, spec.depth, ff)[1]]
    if w is not None and spec.q is not None:
        groups.append(lambda: check_scaling(spec))
        if oracle_checks:
            groups.append(lambda: check_oracle(spec))
    if spec.g is not None:
        groups.append(lambda: check_associated(spec))
    for run in groups:
        try:
            out.extend(run())
        except CopsonError as exc:
            out.append(_check(type(exc).__name__, False, error=str(exc)))
    return out

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from copson import weights as W
from copson.errors import TargetNotBracketed
from copson.fundamental import FundamentalFunction
from copson.quadrature import quad


def ff(u, v, m=1.0, p=1.0):
    return FundamentalFunction(W.parse_weight(u), W.parse_weight(v), m, p)


@pytest.mark.parametrize("u, v, t, expected", [
    ("pow(1,0)", "pow(1,0)", 2.0, 2.0),
    ("pow(1,0)", "exp(1,1)", 1.0, math.e - 2),
    ("pow(1,-1/2)", "pow(1,-3/4)", 1.0, 16 / 3),
])
def test_phi_examples(u, v, t, expected):
    assert ff(u, v).phi(t) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("u, v, t, expected", [
    ("pow(1,0)", "pow(1,0)", 3.0, 3.0),
    ("pow(1,0)", "exp(1,1)", 1.0, math.e - 1),
])
def test_phi_prime_examples(u, v, t, expected):
    assert ff(u, v).phi_prime(t) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("u, v, m, p", [
    ("pow(1,0)", "pow(1,0)", 1, 1),
    ("pow(1,0.3)", "exp(1,-0.5)", 2, 1),
    ("pow(1,-0.5)", "pow(1,0.2)", 0.5, 2),
    ("exp(1,-1)", "pow(1,0)", 1, 3),
])
def test_phi_prime_matches_finite_difference(u, v, m, p):
    F = ff(u, v, m, p)
    t, h = 1.7, 1e-5
    fd = (F.phi(t + h) - F.phi(t - h)) / (2 * h)
    assert F.phi_prime(t) == pytest.approx(fd, rel=1e-6)


def test_admissibility_variants():
    assert ff("pow(1,0)", "pow(1,0)").is_admissible().ok
    bad = ff("pow(0,0)", "pow(1,0)").is_admissible()
    assert bad.status == "degenerate_zero" and bad.witness is not None
    inf = ff("pow(1,0)", "pow(1,-2)").is_admissible()
    assert inf.status == "degenerate_infinite"


def test_solve_level_examples():
    F = ff("pow(1,0)", "pow(1,0)")
    assert F.solve_level("PhiP", F.phi_p(4.0) / 4) == pytest.approx(2.0, rel=1e-9)
    assert F.solve_level("V", 1.0) == pytest.approx(1.0, rel=1e-9)
    G = ff("pow(1,0)", "exp(1,1)")
    assert G.solve_level("V", math.e - 1) == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(TargetNotBracketed):
        F.solve_level("V", 10.0, bracket=(1.0, 2.0))


def test_fubini_identity_for_p_equal_m():
    # int_0^t v U(s,t) ds = int_0^t u(x) V(x) dx
    u, v = W.parse_weight("pow(1,0.4)"), W.parse_weight("exp(2,-0.3)")
    F = FundamentalFunction(u, v, 1.0, 1.0)
    for t in (0.3, 1.0, 7.0):
        # V(x) for v = 2 e^{-0.3 x} is (2/0.3)(1 - e^{-0.3x})
        rhs, _ = quad(lambda x: x ** 0.4 * (2 / 0.3) * (1 - np.exp(-0.3 * x)), 0.0, t)
        assert F.phi_p(t) == pytest.approx(rhs, rel=1e-9)


@given(st.floats(-0.8, 1.0), st.floats(-0.8, 1.0), st.sampled_from([0.5, 1.0, 2.0]),
       st.sampled_from([0.5, 1.0, 3.0]), st.floats(0.1, 10.0))
def test_homogeneity(a, b, m, p, lam):
    u, v = W.PowerLaw(1, a), W.PowerLaw(1, b)
    base = FundamentalFunction(u, v, m, p).phi(1.3)
    su = FundamentalFunction(W.PowerLaw(lam, a), v, m, p).phi(1.3)
    sv = FundamentalFunction(u, W.PowerLaw(lam, b), m, p).phi(1.3)
    assert su == pytest.approx(lam ** (1 / m) * base, rel=1e-8)
    assert sv == pytest.approx(lam ** (1 / p) * base, rel=1e-8)


@given(st.floats(-6, 6), st.floats(-6, 6))
def test_monotone(x, y):
    F = ff("sum(pow(1,-0.5),piecewise([1,3],[0,2,0.5]))", "exp(1,-0.2)", 2.0, 1.5)
    t1, t2 = sorted((2.0 ** x, 2.0 ** y))
    assert F.phi(t1) <= F.phi(t2) * (1 + 1e-9)


@given(st.floats(-20, 20))
def test_solve_level_right_inverse(x):
    F = ff("pow(1,0.5)", "pow(1,-0.25)", 1.0, 2.0)
    target = 2.0 ** x
    for kind in ("PhiP", "V"):
        t = F.solve_level(kind, target)
        assert F.level_value(kind, t) == pytest.approx(target, rel=1e-8)


def test_memo_is_thread_safe():
    F = ff("pow(1,0.2)", "exp(1,-0.1)", 2.0, 1.0)
    ts = 2.0 ** np.linspace(-5, 5, 64)
    serial = FundamentalFunction(F.u, F.v, 2.0, 1.0).phi_p(ts)
    with ThreadPoolExecutor(8) as ex:
        parts = list(ex.map(lambda i: F.phi_p(ts[i::8]), range(8)))
    got = np.empty_like(ts)
    for i, part in enumerate(parts):
        got[i::8] = part
    # batching changes the summation order only: agreement to rounding
    np.testing.assert_allclose(got, serial, rtol=1e-13)

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from copson import fixtures, norms
from copson import weights as W
from copson.stepfunction import StepFunction


def test_lorentz_indicator():
    w = W.parse_weight("pow(1,1)")
    assert norms.lorentz_functional(w, StepFunction.indicator(2.0), 1.0) == pytest.approx(2.0)


def test_cl_fubini_identity():
    # u = v = 1, m = p = 1: ||f||_CL = int t f*(t) dt
    u = v = W.parse_weight("pow(1,0)")
    f = StepFunction((1.0, 3.0), (2.0, 0.5))
    expected = 2.0 * 0.5 + 0.5 * (9 - 1) / 2
    assert norms.cl_functional(u, v, 1, 1, f) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("m, p", [(1, 1), (2, 1), (0.5, 2), (3, 1.5)])
def test_cl_matches_scipy(m, p):
    u, v = W.parse_weight("pow(1,-0.3)"), W.parse_weight("exp(1,-0.5)")
    f = StepFunction((0.5, 2.0, 5.0), (3.0, 1.0, 0.25))

    def inner(t):
        return integrate.quad(lambda s: W.evaluate(u, s) * f(s) ** m, t, 5.0,
                              points=[0.5, 2.0], limit=200, epsabs=0, epsrel=1e-12)[0]

    ref = integrate.quad(lambda t: W.evaluate(v, t) * inner(t) ** (p / m), 0, 5.0,
                         points=[0.5, 2.0], limit=200, epsabs=0, epsrel=1e-11)[0]
    assert norms.cl_functional(u, v, m, p, f) == pytest.approx(ref, rel=1e-9)


@given(st.integers(0, 10 ** 6), st.floats(0.1, 10))
def test_ratio_scale_invariant(seed, lam):
    rng = np.random.default_rng(seed)
    f = fixtures.random_step(rng, monotone=True)
    u, v, w = (W.parse_weight(s) for s in ("pow(1,0)", "pow(1,-0.2)", "pow(1,0.5)"))
    r1 = norms.ratio(u, v, w, 2.0, 1.5, 1.0, f)
    r2 = norms.ratio(u, v, w, 2.0, 1.5, 1.0, f.scale(lam))
    assert r2 == pytest.approx(r1, rel=1e-9)

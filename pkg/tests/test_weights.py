from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from copson import weights as W
from copson.errors import NonIntegrableNearZero, WeightParseError


def test_evaluate_leaves():
    assert W.evaluate(W.PowerLaw(1, 2), 3.0) == pytest.approx(9.0)
    assert W.evaluate(W.Exponential(1, 1), 0.5) == pytest.approx(math.exp(0.5), rel=1e-14)
    assert W.evaluate(W.Sum((W.PowerLaw(1, 0), W.PowerLaw(2, 1))), 2.0) == pytest.approx(5.0)


def test_piecewise_and_restrict():
    w = W.parse_weight("piecewise([1,2],[3,1,0.5])")
    assert W.evaluate(w, np.array([0.5, 1.0, 1.5, 2.0, 9.0])).tolist() == [3, 1, 1, 0.5, 0.5]
    r = W.parse_weight("restrict(pow(1,0),1,2)")
    assert W.evaluate(r, np.array([0.5, 1.0, 1.999, 2.0])).tolist() == [0, 1, 1, 0]


@pytest.mark.parametrize("w, a, b, expected", [
    ("pow(1,0)", 0, 2, 2.0),
    ("exp(1,1)", 0, 1.5, math.exp(1.5) - 1),
    ("pow(1,1)", 1, 3, 4.0),
    ("exp(1,-1)", 0, math.inf, 1.0),
    ("pow(1,-0.5)", 0, 4, 4.0),
    ("prod(pow(1,1),exp(1,-1))", 0, math.inf, 1.0),
    ("piecewise([1,2],[3,1,0.5])", 0, 3, 4.5),
])
def test_integrate_examples(w, a, b, expected):
    assert W.integrate(W.parse_weight(w), a, b) == pytest.approx(expected, rel=1e-10)


def test_divergence_is_symbolic():
    assert W.integrate(W.parse_weight("pow(1,0)"), 1, math.inf) == math.inf
    assert W.integrate(W.parse_weight("exp(1,0.1)"), 0, math.inf) == math.inf
    with pytest.raises(NonIntegrableNearZero):
        W.integrate(W.parse_weight("pow(1,-1)"), 0, 1)
    # zero coefficient leaves do not diverge
    assert W.integrate(W.parse_weight("restrict(pow(1,-2),1,2)"), 0, 5) == pytest.approx(0.5)


@pytest.mark.parametrize("text", ["pow(1,", "pow(1,0) x", "foo(1,2)", "pow(-1,0)",
                                  "restrict(pow(1,0),2,1)", "piecewise([2,1],[1,1,1])"])
def test_parse_errors(text):
    with pytest.raises(WeightParseError):
        W.parse_weight(text)


def test_fraction_and_inf_literals():
    w = W.parse_weight("restrict(pow(1,-3/4),1,inf)")
    assert w.child.alpha == -0.75 and math.isinf(w.hi)


alphas = st.floats(-0.9, 3.0)
rates = st.floats(-2.0, 0.5)
coefs = st.floats(0.1, 5.0)


@st.composite
def weights(draw, depth=2):
    kind = draw(st.sampled_from(["pow", "exp", "sum", "prod", "restrict"] if depth else ["pow", "exp"]))
    if kind == "pow":
        return W.PowerLaw(draw(coefs), draw(alphas))
    if kind == "exp":
        return W.Exponential(draw(coefs), draw(rates))
    if kind == "sum":
        return W.Sum((draw(weights(depth - 1)), draw(weights(depth - 1))))
    if kind == "prod":
        return W.Product(W.PowerLaw(draw(coefs), draw(st.floats(0, 2))), W.Exponential(1, draw(rates)))
    lo = draw(st.floats(0, 2))
    return W.Restrict(draw(weights(depth - 1)), lo, lo + draw(st.floats(0.1, 5)))


@given(weights())
def test_text_round_trip(w):
    assert W.parse_weight(W.to_text(w)) == w


@given(weights(), st.floats(0.01, 3), st.floats(0.01, 3), st.floats(0.01, 3))
def test_additivity(w, x, y, z):
    a, b, c = sorted((x, y, z))
    whole = W.integrate(w, a, c)
    parts = W.integrate(w, a, b) + W.integrate(w, b, c)
    assert parts == pytest.approx(whole, rel=2e-10, abs=1e-300)


@given(weights(), weights(), st.floats(0.01, 3), st.floats(0.01, 3))
def test_linearity(w1, w2, x, y):
    a, b = sorted((x, y))
    s = W.integrate(W.Sum((w1, w2)), a, b)
    assert s == pytest.approx(W.integrate(w1, a, b) + W.integrate(w2, a, b), rel=1e-10, abs=1e-300)


@given(weights(), st.floats(0.1, 10), st.floats(0.01, 3), st.floats(0.01, 3))
def test_scaling(w, lam, x, y):
    a, b = sorted((x, y))
    scaled = W.integrate(W.Product(W.PowerLaw(lam, 0), w), a, b)
    assert scaled == pytest.approx(lam * W.integrate(w, a, b), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("w", ["pow(2,-0.7)", "pow(1,1.5)", "exp(1,-1)", "exp(0.5,0.3)",
                               "prod(pow(1,2),exp(1,-1))", "prod(pow(1,0.4),exp(1,-2))"])
def test_closed_form_matches_quadrature(w):
    w = W.parse_weight(w)
    rng = np.random.default_rng(5)
    a = 2.0 ** rng.uniform(-6, 3, 100)
    b = a * 2.0 ** rng.uniform(0, 4, 100)
    closed = W.integrate_many(w, a, b)
    quad = W.integrate_many(w, a, b, method="quadrature")
    np.testing.assert_allclose(quad, closed, rtol=1e-10)

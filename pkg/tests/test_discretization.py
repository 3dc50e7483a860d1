from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from copson import discretization as D
from copson import fixtures
from copson import weights as W
from copson.errors import IndexOutOfWindow, SupportNotCovered
from copson.fundamental import FundamentalFunction
from copson.stepfunction import StepFunction

ONE = W.parse_weight("pow(1,0)")


def test_geometric_sequence():
    seq = D.build_sequence(ONE, ONE, 1, 1, depth=3)
    assert seq.K == "infinite" and seq.k == tuple(range(-3, 4))
    np.testing.assert_allclose(seq.t, [4.0 ** k for k in range(-3, 4)], rtol=1e-12)
    assert all(lab == D.IN_K1 for lab in seq.labels_list()[1:])
    res = D.verify_sequence(seq, ONE, ONE, 1, 1)
    assert max(v for k, v in res.items() if k != "per_k") <= 1e-9


def test_zero_K_sequence():
    e = W.parse_weight("exp(1,-1)")
    seq = D.build_sequence(e, e, 1, 1, depth=4)
    assert seq.K == "zero" and seq.t0_is_infinity and math.isinf(seq[0])
    assert seq.to_dict()["t0"] == "inf"
    res = D.verify_sequence(seq, e, e, 1, 1)
    assert max(v for k, v in res.items() if k != "per_k") <= 1e-6


def test_growth_for_p2():
    seq = D.build_sequence(ONE, ONE, 1, 2, depth=1)
    V = [W.integrate(ONE, 0, t) for t in seq.t]
    assert all(b / a >= 8 * (1 - 1e-9) for a, b in zip(V, V[1:]))


def test_exponential_v_sequence():
    v = W.parse_weight("exp(1,1)")
    seq = D.build_sequence(ONE, v, 1, 1, depth=4)
    assert D.verify_sequence(seq, ONE, v, 1, 1)["Phi_growth"] <= 1e-6


def test_corruption_detected():
    seq = D.build_sequence(ONE, ONE, 1, 1, depth=3)
    t = list(seq.t)
    t[seq.k.index(1)] *= 1.01
    bad = D.DiscretizingSequence(seq.K, seq.k, tuple(t), seq.labels, 1, 1)
    res = D.verify_sequence(bad, ONE, ONE, 1, 1)
    assert res["V_equality"] == pytest.approx(0.01, rel=1e-3)


def test_json_round_trip():
    seq = D.build_sequence(W.parse_weight("exp(1,-1)"), ONE, 1, 1, depth=3)
    back = D.DiscretizingSequence.from_dict(json.loads(seq.to_json()))
    assert back == seq


def test_deterministic():
    u, v = W.parse_weight("pow(1,-0.5)"), W.parse_weight("pow(1,-0.75)")
    assert D.build_sequence(u, v, 2, 1, 5) == D.build_sequence(u, v, 2, 1, 5)


def test_covering_equality_case():
    seq = D.build_sequence(ONE, ONE, 1, 1, depth=4)
    est = D.covering_estimates(seq, ONE, ONE, 1, 1, 0, 1.0)
    assert est["V_lhs"] == pytest.approx(1.0) and est["V_rhs"] == pytest.approx(1.0)
    with pytest.raises(IndexOutOfWindow):
        D.covering_estimates(seq, ONE, ONE, 1, 1, -3, 4.0 ** -4)


def test_functional_examples():
    F = FundamentalFunction(ONE, ONE, 1, 1)
    seq = D.build_sequence(ONE, ONE, 1, 1, depth=8, ff=F)
    chi = StepFunction.indicator(1.0)
    assert D.continuous_functional(ONE, ONE, 1, 1, chi) == pytest.approx(1 / 6, rel=1e-9)
    assert D.discretized_functional(seq, F, chi) == pytest.approx(1 / 6, rel=1e-6)
    assert D.continuous_functional(ONE, ONE, 1, 1, chi.scale(2)) == pytest.approx(1 / 3, rel=1e-9)
    zero = StepFunction((1.0,), (0.0,))
    assert D.continuous_functional(ONE, ONE, 1, 1, zero) == 0
    assert D.discretized_functional(seq, F, zero, "split") == 0
    with pytest.raises(SupportNotCovered):
        D.discretized_functional(seq, F, StepFunction.indicator(4.0 ** 9))


def test_split_form_band():
    # the split form is equivalent to the direct one: ratio stable across h
    F = FundamentalFunction(ONE, ONE, 1, 1)
    seq = D.build_sequence(ONE, ONE, 1, 1, depth=8, ff=F)
    rng = np.random.default_rng(3)
    r = []
    for _ in range(10):
        h = fixtures.random_h(rng)
        r.append(D.discretized_functional(seq, F, h, "split") / D.discretized_functional(seq, F, h))
    assert 0.5 <= min(r) and max(r) <= 2.0


@given(st.integers(0, 10 ** 6), st.floats(0.1, 10))
def test_homogeneity_m1(seed, lam):
    u, v = W.parse_weight("pow(1,-0.5)"), W.parse_weight("pow(1,0.3)")
    p = 2.0
    F = FundamentalFunction(u, v, 1, p)
    seq = D.build_sequence(u, v, 1, p, depth=8, ff=F)
    h = fixtures.random_h(np.random.default_rng(seed))
    for fn in (lambda g: D.continuous_functional(u, v, 1, p, g),
               lambda g: D.discretized_functional(seq, F, g)):
        assert fn(h.scale(lam)) == pytest.approx(lam ** p * fn(h), rel=1e-8)

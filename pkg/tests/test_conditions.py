from __future__ import annotations

import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from copson import conditions as C
from copson import conditions_m1 as C1
from copson import fixtures
from copson import weights as W
from copson.errors import NotAdmissible

ONE = W.parse_weight("pow(1,0)")


@pytest.mark.parametrize("mpq, case", [((1, 1, 2), "I"), ((1, 3, 2), "II"),
                                       ((2, 0.5, 0.8), "III"), ((2, 3, 0.5), "IV")])
def test_classify_examples(mpq, case):
    assert C.classify(*mpq).case == case


def test_classify_partition():
    grid = [0.25, 0.5, 0.9, 1.0, 1.5, 2.0, 3.0, 4.0, 7.0, 10.0]
    for m, p, q in itertools.product(grid, repeat=3):
        e = C.classify(m, p, q)
        hits = [m <= q and p <= q, m <= q < p, p <= q < m, q < m and q < p]
        assert sum(hits) == 1 and "I II III IV".split()[hits.index(True)] == e.case
        if q < 1:
            assert e.q_conj < 0


def test_A7_examples():
    t = W.parse_weight("pow(1,1)")
    r = C.embedding_constant(ONE, ONE, t, 1, 1, 1)
    assert r.case == "I" and r.C_estimate == pytest.approx(1.0, abs=1e-6) and r.embedding_holds
    r = C.embedding_constant(ONE, ONE, ONE, 1, 1, 1)
    assert r.conditions["A7"] == math.inf and not r.embedding_holds


def test_zero_w():
    zero = W.zero()
    assert C.condition_A8(ONE, ONE, zero, C.classify(1, 2, 1)) == 0
    assert C.condition_A12(ONE, ONE, zero, C.classify(2, 2, 1)) == 0


def test_A11_divergent():
    # int w = inf while phi(inf) < inf
    u = W.parse_weight("exp(1,-1)")
    A9, A10, A11 = C.condition_A9_A10_A11(u, ONE, ONE, C.classify(2, 1, 1))
    assert A11 == math.inf


def test_not_admissible():
    with pytest.raises(NotAdmissible):
        C.embedding_constant(W.zero(), ONE, ONE, 1, 1, 1)


def test_report_json_round_trip():
    prob = fixtures.case_fixtures("III", 1)[0]
    r = C.embedding_constant(*prob.args)
    d = json.loads(r.to_json())
    assert d["case"] == "III" and set(d["conditions"]) == {"A9", "A10", "A11"}
    assert d["C_estimate"] == pytest.approx(sum(d["conditions"].values()))


@pytest.mark.parametrize("case", C.CASES)
def test_C_estimate_is_case_sum(case):
    prob = fixtures.case_fixtures(case, 2)[1]
    r = C.embedding_constant(*prob.args)
    assert tuple(r.conditions) == C.REQUIRED[case]
    assert r.C_estimate == pytest.approx(math.fsum(r.conditions.values()))


@pytest.mark.parametrize("case", C.CASES)
def test_monotone_in_w(case):
    prob = fixtures.case_fixtures(case, 1)[0]
    u, v, w, m, p, q = prob.args
    bigger = W.Sum((w, W.parse_weight("restrict(pow(0.5,0),0.5,2)")))
    small = C.embedding_constant(u, v, w, m, p, q).conditions
    big = C.embedding_constant(u, v, bigger, m, p, q).conditions
    for k in small:
        assert small[k] <= big[k] * (1 + 1e-8)


@given(st.integers(0, 10 ** 6))
def test_m1_formulas_agree(seed):
    rng = np.random.default_rng(seed)
    case = C.CASES[seed % 4]
    p, q = fixtures.m1_exponents(case, rng)
    prob = fixtures.balanced_problem(1.0, p, q, rng, "power" if seed % 3 else "decay")
    u, v, w, *_ = prob.args
    prims = C.primitives(u, v, w, 1.0, p)
    general = C.embedding_constant(u, v, w, 1.0, p, q, prims=prims)
    special = C1.embedding_constant_m1(u, v, w, p, q, prims=prims)
    assert general.case == special.case == case
    for a, b in zip(special.conditions.values(), general.conditions.values()):
        assert a == b or a == pytest.approx(b, rel=1e-9)

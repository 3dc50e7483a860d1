from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from copson.errors import WeightParseError
from copson.stepfunction import StepFunction, parse_step, rearrange, running_average


def test_rearrange_examples():
    g = StepFunction.from_lengths([1, 1, 1], [1, 3, 2])
    r = rearrange(g)
    assert r.values == (3, 2, 1) and np.allclose(r.lengths, [1, 1, 1])
    h = StepFunction.from_lengths([0.5, 1], [-2, 1])
    r = rearrange(h)
    assert r.values == (2, 1) and np.allclose(r.lengths, [0.5, 1])
    c = StepFunction((1.0, 3.0), (2.0, 1.0))
    assert rearrange(c) == c


def test_running_average_examples():
    chi = StepFunction.indicator(1.0)
    assert running_average(chi, 2.0) == 0.5
    assert running_average(chi, 0.5) == 1.0
    assert running_average(StepFunction((4.0,), (3.0,)), np.array([1.0, 4.0])).tolist() == [3.0, 3.0]


def test_parse_step():
    g = parse_step("step([1,2.5],[3,1])")
    assert g.knots == (1.0, 2.5) and g.values == (3.0, 1.0)
    assert parse_step(g.to_text()) == g
    for bad in ("step([2,1],[1,1])", "pow(1,0)", "step([1],[1,2])"):
        with pytest.raises(WeightParseError):
            parse_step(bad)


steps = st.lists(st.tuples(st.floats(0.01, 4), st.floats(-5, 5)), min_size=1, max_size=8).map(
    lambda rows: StepFunction.from_lengths([r[0] for r in rows], [r[1] for r in rows]))


@given(steps)
def test_rearrangement_is_equimeasurable(g):
    r = g.rearrange()
    assert r.is_canonical()
    assert r.l1() == pytest.approx(g.l1(), rel=1e-12, abs=1e-12)
    for s in (0.0, 0.5, 1.0, 2.5):
        lhs = sum(ln for v, ln in zip(g.values, g.lengths) if abs(v) > s)
        rhs = sum(ln for v, ln in zip(r.values, r.lengths) if v > s)
        assert rhs == pytest.approx(lhs, rel=1e-12, abs=1e-12)


@given(steps)
def test_rearrangement_idempotent(g):
    r = g.rearrange()
    assert r.rearrange() == r


@given(steps, st.floats(0.01, 20))
def test_running_average_bounds(g, t):
    r = g.rearrange()
    if r.is_zero():
        return
    avg = running_average(r, t)
    assert r(t) - 1e-12 <= avg <= r.values[0] + 1e-12

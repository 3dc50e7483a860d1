from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from copson.quadrature import batch_quad, batch_quad_inf, quad


def test_polynomial_exact():
    val, _ = batch_quad(lambda x, i: x ** 5, np.array([0.0]), np.array([2.0]))
    assert val[0] == pytest.approx(64 / 6, rel=1e-14)


def test_endpoint_singularity():
    val, err = quad(lambda x: x ** -0.5, 0.0, 1.0)
    assert val == pytest.approx(2.0, rel=1e-8) and err < 1e-8


def test_semi_infinite():
    val, _ = batch_quad_inf(lambda x, i: np.exp(-x), np.array([0.0, 1.0]))
    np.testing.assert_allclose(val, [1.0, math.exp(-1)], rtol=1e-10)


def test_groups_sum_pieces():
    a, b = np.array([0.0, 1.0, 2.0]), np.array([1.0, 2.0, 3.0])
    val, _ = batch_quad(lambda x, i: x ** 2, a, b, groups=np.zeros(3, dtype=np.intp))
    assert val[0] == pytest.approx(9.0, rel=1e-13)


@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(0.1, 4)), min_size=1, max_size=6))
def test_batch_matches_independent(rows):
    c = np.array([r[0] for r in rows])
    L = np.array([r[1] for r in rows])
    val, _ = batch_quad(lambda x, i: np.cos(c[i] * x), np.zeros(len(rows)), L)
    expected = np.where(c == 0, L, np.sin(c * L) / np.where(c == 0, 1, c))
    np.testing.assert_allclose(val, expected, rtol=1e-9, atol=1e-12)

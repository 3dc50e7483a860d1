from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copson import associated as A
from copson import conditions as C
from copson import fixtures, norms
from copson import weights as W
from copson.errors import NotAdmissible
from copson.stepfunction import StepFunction

U = W.parse_weight("pow(1,-1/2)")
V = W.parse_weight("pow(1,-3/4)")
ONE = W.parse_weight("pow(1,0)")
CHI = StepFunction.indicator(1.0)

PAIRS = {  # one admissible pair with finite associated norms per quadrant
    "i": (0.5, 0.5), "ii": (1.0, 2.0), "iii": (2.0, 1.0), "iv": (2.0, 3.0),
}
DECAY_U = W.parse_weight("prod(pow(1,-0.75),exp(1,-1))")
V2 = W.parse_weight("pow(1,-0.9)")


def test_fixture_value():
    assert A.associated_norm(U, V, 1, 1, CHI) == pytest.approx(0.1875, abs=1e-4)


def test_infinite_and_zero():
    assert A.associated_norm(ONE, ONE, 1, 1, CHI) == math.inf
    assert A.associated_norm(U, V, 2, 3, StepFunction((1.0,), (0.0,))) == 0.0


def test_not_admissible():
    with pytest.raises(NotAdmissible):
        A.associated_norm(W.zero(), ONE, 1, 1, CHI)


@pytest.mark.parametrize("mp, quad", [((1, 1), "i"), ((1, 2), "ii"), ((2, 1), "iii"),
                                      ((2, 2), "iv"), ((0.5, 0.5), "i")])
def test_quadrant(mp, quad):
    assert A.quadrant(*mp) == quad


@pytest.mark.parametrize("quad", sorted(PAIRS))
def test_duality_with_embedding(quad):
    m, p = PAIRS[quad]
    g = StepFunction((0.5, 2.0), (3.0, 1.0))
    rep = A.associated_report(DECAY_U, V2, m, p, g)
    assert rep.quadrant == quad and math.isfinite(rep.norm)
    emb = C.embedding_constant(DECAY_U, V2, g, m, p, 1.0).C_estimate
    assert emb == pytest.approx(rep.norm, rel=1e-9)


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.sampled_from(sorted(PAIRS)))
def test_rearrangement_invariance(seed, quad):
    m, p = PAIRS[quad]
    rng = np.random.default_rng(seed)
    # dyadic lengths keep the knot sums exact, so both orders give the same g*
    n = int(rng.integers(1, 5))
    lengths = 2.0 ** rng.integers(-3, 3, n)
    vals = rng.exponential(size=n)
    g = StepFunction.from_lengths(lengths, vals)
    perm = rng.permutation(n)
    h = StepFunction.from_lengths(lengths[perm], vals[perm])
    assert A.associated_norm(DECAY_U, V2, m, p, g) == A.associated_norm(DECAY_U, V2, m, p, h)


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.floats(0.01, 100), st.sampled_from(sorted(PAIRS)))
def test_homogeneity(seed, lam, quad):
    m, p = PAIRS[quad]
    g = fixtures.random_step(np.random.default_rng(seed), lo=-3, hi=3)
    a = A.associated_norm(DECAY_U, V2, m, p, g)
    assert math.isfinite(a)
    assert A.associated_norm(DECAY_U, V2, m, p, g.scale(lam)) == pytest.approx(lam * a, rel=1e-9)


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.sampled_from(sorted(PAIRS)))
def test_monotonicity(seed, quad):
    m, p = PAIRS[quad]
    rng = np.random.default_rng(seed)
    g1 = fixtures.random_step(rng, lo=-3, hi=3, monotone=True)
    extra = StepFunction(g1.knots, tuple(x * rng.uniform(1, 2) for x in g1.values))
    assert A.associated_norm(DECAY_U, V2, m, p, g1) <= A.associated_norm(DECAY_U, V2, m, p, extra) + 1e-8


HOLDER_KAPPA = 3.0


@pytest.mark.parametrize("quad", sorted(PAIRS))
def test_holder_lower_bound(quad):
    # int f* g* <= kappa ||f||_CL ||g||'
    m, p = PAIRS[quad]
    rng = np.random.default_rng(11)
    for _ in range(10):
        f = fixtures.random_step(rng, lo=-3, hi=3, monotone=True)
        g = fixtures.random_step(rng, lo=-3, hi=3, monotone=True)
        lhs = norms.lorentz_functional(g.as_weight(), f, 1.0)
        rhs = norms.cl_norm(DECAY_U, V2, m, p, f) * A.associated_norm(DECAY_U, V2, m, p, g)
        assert math.isfinite(rhs)
        assert lhs <= HOLDER_KAPPA * rhs

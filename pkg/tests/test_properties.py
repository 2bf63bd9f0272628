"""
Property-based tests: group-action laws, duality, polynomial identities and
canonical forms of subspaces.
"""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from app.counting import IntPolynomial
from app.diagrams import compatible, divisors, dual_divisor, s4_act_divisor
from app.gf2 import binary_rank
from app.hypersimplex import ALL_EDGES, S4, act_edge, compose, dual_edge
from app.projgeom import PrimeField, Subspace, cross_ratio

perms = st.sampled_from(S4)
edges = st.sampled_from(ALL_EDGES)
divs = st.sampled_from(divisors())
small_primes = st.sampled_from([2, 3, 5, 7, 11])
coefficients = st.lists(st.integers(min_value=-20, max_value=20), max_size=6)


@given(perms, perms, edges)
def test_action_is_compatible_with_composition(p, r, e):
    assert act_edge(compose(p, r), e) == act_edge(p, act_edge(r, e))


@given(perms, edges)
def test_duality_is_an_equivariant_involution(p, e):
    assert dual_edge(dual_edge(e)) == e
    assert dual_edge(act_edge(p, e)) == act_edge(p, dual_edge(e))


@given(perms, divs, divs)
def test_compatibility_is_s4_invariant(p, a, b):
    assert compatible(a, b) == compatible(s4_act_divisor(p, a), s4_act_divisor(p, b))


@given(divs, divs)
def test_compatibility_is_self_dual(a, b):
    assert compatible(a, b) == compatible(dual_divisor(a), dual_divisor(b))


@given(coefficients, coefficients, st.integers(min_value=-5, max_value=5))
def test_polynomial_product_evaluates_pointwise(a, b, x):
    p, q = IntPolynomial(a), IntPolynomial(b)
    assert (p * q).evaluate(x) == p.evaluate(x) * q.evaluate(x)
    assert (p - q).evaluate(x) == p.evaluate(x) - q.evaluate(x)


@given(coefficients, st.integers(min_value=1, max_value=3), st.integers(min_value=-3, max_value=3))
def test_power_substitution(a, r, x):
    p = IntPolynomial(a)
    assert p.substitute_power(r).evaluate(x) == p.evaluate(x ** r)


@settings(max_examples=50)
@given(small_primes, st.data())
def test_span_is_canonical(p, data):
    rows = data.draw(
        st.lists(st.lists(st.integers(0, p - 1), min_size=4, max_size=4), min_size=1, max_size=3)
    )
    base = Subspace.span(p, rows, 4)
    combined = [(a + b) % p for a, b in zip(rows[0], rows[-1])]
    assert Subspace.span(p, list(reversed(rows)) + [combined], 4) == base
    for v in base.basis:
        assert base.contains_vector(v)


@settings(max_examples=50)
@given(st.sampled_from([5, 7, 11]), st.data())
def test_cross_ratio_is_projectively_invariant(p, data):
    fld = PrimeField(p)
    values = data.draw(st.lists(st.integers(0, p), min_size=4, max_size=4, unique=True))
    params = [(1, 0) if v == p else (v, 1) for v in values]
    a, b, c, d = data.draw(st.lists(st.integers(0, p - 1), min_size=4, max_size=4))
    assume((a * d - b * c) % p)
    moved = [((a * x + b * y) % p, (c * x + d * y) % p) for x, y in params]
    assert cross_ratio(fld, *moved) == cross_ratio(fld, *params)


@given(st.integers(1, 6), st.integers(1, 9), st.integers(0, 2**16))
def test_binary_rank_of_transpose(m, n, seed):
    M = np.random.default_rng(seed).integers(0, 2, size=(m, n))
    assert binary_rank(M) == binary_rank(M.T)
    assert binary_rank(M) <= min(m, n)


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])

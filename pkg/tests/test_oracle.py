from __future__ import annotations

from fractions import Fraction as F
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scdforge.catalog import get
from scdforge.discrete_poset import ChainDecomposition, DiscreteChain, rank_profile, verify_scd
from scdforge.discretizer import cover, decompose
from scdforge.errors import BudgetExceeded, PreconditionError
from scdforge.oracle import brute_points, brute_rank_profile, independent_verify, q_binomial, search_scd
from scdforge.polytope import cuboid, lattice_points, order_simplex, simplex_polytope


def test_q_binomial_examples():
    assert q_binomial(2, 2) == (1, 1, 2, 1, 1)
    assert q_binomial(0, 5) == (1,)
    assert q_binomial(3, 2) == (1, 1, 2, 2, 2, 1, 1)
    with pytest.raises(ValueError):
        q_binomial(-1, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 8), st.integers(0, 8))
def test_q_binomial_symmetric_and_sums_to_binomial(m, n):
    c = q_binomial(m, n)
    assert c == c[::-1]
    assert sum(c) == comb(m + n, m)
    assert c == q_binomial(n, m)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_brute_points_match_enumeration(m, n):
    P = order_simplex(m)
    assert brute_points(P, n) == set(lattice_points(P, n))
    assert brute_rank_profile(P, n) == rank_profile(P, n).as_tuple() == q_binomial(m, n)


def test_search_l2():
    d = search_scd(order_simplex(2), 2)
    assert d is not None and len(d.chains) == 2
    assert verify_scd(d).ok and independent_verify(d)


def test_search_singleton():
    P = simplex_polytope([(F(1, 2), F(1, 2))])
    d = search_scd(P, 2)
    assert d is not None and [c.points for c in d.chains] == [((1, 1),)]


def test_search_cube_vertices():
    d = search_scd(cuboid([(0, 1)] * 3), 1)
    assert d is not None
    assert sum(len(c) for c in d.chains) == 8
    assert independent_verify(d)


def test_search_cap_and_budget():
    with pytest.raises(PreconditionError):
        search_scd(order_simplex(3), 6, cap=10)
    with pytest.raises(BudgetExceeded):
        search_scd(order_simplex(3), 4, budget=1)


def test_search_reports_none_when_impossible():
    # a V shape: two maximal points over one minimum cannot be split symmetrically
    from scdforge.polytope import union

    P = union([simplex_polytope([(F(0), F(0)), (F(1), F(0))]), simplex_polytope([(F(0), F(0)), (F(0), F(1))])])
    assert search_scd(P, 1) is None


def test_independent_verify_examples():
    assert independent_verify(decompose(get("L3").decomposition, 2))
    assert independent_verify(cover(get("L5").decomposition, 1), check_cover=False)


def test_independent_verify_rejects_reordered_chain():
    d = decompose(get("L3").decomposition, 2)
    long = max(d.chains, key=len)
    pts = list(long.points)
    pts[0], pts[1] = pts[1], pts[0]
    bad = ChainDecomposition(d.n, tuple(DiscreteChain(tuple(pts)) if c is long else c for c in d.chains), d.polytope)
    assert not independent_verify(bad)
    assert not verify_scd(bad).ok


def test_independent_verify_needs_polytope():
    with pytest.raises(PreconditionError):
        independent_verify(ChainDecomposition(1, ()))

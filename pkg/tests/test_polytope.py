from fractions import Fraction as F
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from scdforge.catalog import pt_points, pt_polytope
from scdforge.oracle import brute_points
from scdforge.polytope import (
    contains,
    cuboid,
    lattice_points,
    order_simplex,
    polytope_rank,
    volume,
    weighted_order_simplex,
)
from scdforge.exact_core import point
from scdforge.errors import DimensionMismatch


def test_contains_examples():
    L3 = order_simplex(3)
    assert contains(L3, point([0, "1/2", 1]))
    assert not contains(L3, point(["1/2", 0, 1]))
    assert contains(pt_polytope(2), point(["1/2", "1/4", 1, "1/2"]))
    assert pt_points(2)["B"] == point(["1/2", "1/4", 1, "1/2"])
    with pytest.raises(DimensionMismatch):
        contains(L3, point([0, 0]))


def test_lattice_point_examples():
    assert sorted(lattice_points(order_simplex(2), 2)) == [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
    assert sorted(lattice_points(order_simplex(3), 1)) == [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)]
    assert len(lattice_points(order_simplex(4), 6)) == 210


def test_polytope_rank_examples():
    assert polytope_rank(order_simplex(4)) == 4
    assert polytope_rank(cuboid([(0, 1)])) == 1
    assert polytope_rank(pt_polytope(2)) == F(9, 2)


@pytest.mark.parametrize("m", range(1, 6))
@pytest.mark.parametrize("n", range(1, 11))
def test_order_simplex_counts(m, n):
    if comb(m + n, m) > 3003:
        pytest.skip("beyond the brute-force budget")
    pts = lattice_points(order_simplex(m), n)
    assert len(pts) == comb(m + n, m)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fast_and_generic_enumeration_agree(n):
    for P in (order_simplex(3), weighted_order_simplex([1, F(1, 2), 2, 1]), pt_polytope(2),
              cuboid([(0, 2), (0, 1), (F(1, 2), 1)])):
        assert set(lattice_points(P, n)) == brute_points(P, n)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(2, 3))
def test_enumeration_embeds_under_refinement(m, n, k):
    P = order_simplex(m)
    fine = set(lattice_points(P, n * k))
    assert {tuple(k * a for a in p) for p in lattice_points(P, n)} <= fine
    for p in fine:
        assert contains(P, tuple(F(a, n * k) for a in p))


def test_volumes():
    assert volume(order_simplex(4)) == F(1, 24)
    assert volume(cuboid([(0, 2), (0, 3)])) == 6
    assert volume(pt_polytope(1)) == F(1, 24)

from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scdforge.catalog import get, segment_decomposition, square_boundary_decomposition
from scdforge.constructions import ConeSpec, cone_off, product_discrete, product_geometric
from scdforge.discrete_poset import ChainDecomposition, DiscreteChain, rank_profile, verify_scd
from scdforge.discretizer import decompose
from scdforge.errors import MixedKindsError, PreconditionError
from scdforge.exact_core import Hyperplane, PartialSimplex
from scdforge.hyperplane_conditions import check_strong, decomposition_n, turning_contexts
from scdforge.oracle import independent_verify
from scdforge.polytope import cuboid, simplex_polytope
from scdforge.snake_model import EXACT, REAL, GeoDecomposition, Snake, Swipe, validate_geo

h = F(1, 2)


def test_cone_l2_matches_catalog():
    g = cone_off(ConeSpec((h, h), get("projL2").decomposition))
    assert g.snakes == get("L2").decomposition.snakes
    for n in (1, 2, 3, 4):
        assert decompose(g, n).partition() == decompose(get("L2").decomposition, n).partition()


def test_cone_l3_matches_catalog():
    target = get("L3")
    g = cone_off(ConeSpec((F(1, 4), h, F(3, 4)), get("projL3").decomposition, target=target.polytope))
    assert validate_geo(g, sample_denoms=(2,)).ok
    for n in (1, 2, 3, 4):
        assert decompose(g, n).partition() == decompose(target.decomposition, n).partition()


def test_cone_apex_owner_keeps_apex_support():
    base = get("projL3").decomposition
    g = cone_off(ConeSpec((F(1, 4), h, F(3, 4)), base, target=get("L3").polytope))
    for idx, snake in enumerate(g.snakes):
        ts = snake.swipes[0].start
        apex = frozenset({len(ts.vertices) - 1})
        assert (apex in ts.removed) == (idx != 0)


def test_cone_singleton():
    q = (F(0), F(0))
    v = (F(1), F(-1))
    sw = Swipe(0, PartialSimplex.closed([q]), PartialSimplex.closed([q]), Hyperplane((1, 1), 0), Hyperplane((1, 1), 0))
    base = GeoDecomposition(simplex_polytope([q]), (Snake(REAL, (sw,)),), EXACT)
    g = cone_off(ConeSpec(v, base))
    assert len(g.snakes) == 1 and g.snakes[0].kind == REAL
    assert g.snakes[0].swipes[0].start.vertices == (q, v)


def test_cone_rejects_off_middle_apex():
    with pytest.raises(PreconditionError):
        cone_off(ConeSpec((F(1, 4), F(1, 4)), get("projL2").decomposition))


def test_cone_rejects_apex_on_base():
    base = get("projL2").decomposition
    with pytest.raises(PreconditionError):
        cone_off(ConeSpec(base.snakes[0].swipes[0].start.vertices[0], base))


def chain_of(points):
    return DiscreteChain(tuple((p,) for p in points))


def test_product_discrete_3x3():
    a = ChainDecomposition(1, (chain_of([0, 1, 2]),))
    d = product_discrete(a, a)
    assert sorted(len(c) for c in d.chains) == [1, 3, 5]


def test_product_discrete_with_middle_singleton():
    a = ChainDecomposition(2, (chain_of([0, 1, 2]),))
    b = ChainDecomposition(2, (chain_of([1]),))
    d = product_discrete(a, b)
    assert [c.points for c in d.chains] == [((0, 1), (1, 1), (2, 1))]


def test_product_discrete_l2_squared():
    g = get("L2").decomposition
    base = decompose(g, 1)
    d = product_discrete(base, base)
    assert sum(len(c) for c in d.chains) == 9
    assert len(d.chains) == 3
    assert rank_profile(d.polytope, 1).as_tuple() == (1, 2, 3, 2, 1)
    assert verify_scd(d).ok


def test_product_discrete_denominator_mismatch():
    with pytest.raises(PreconditionError):
        product_discrete(ChainDecomposition(1, ()), ChainDecomposition(2, ()))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=2, max_size=3))
def test_product_discrete_chain_count_is_profile_width(lengths):
    d = decompose(segment_decomposition(lengths[0]), 1)
    for a in lengths[1:]:
        d = product_discrete(d, decompose(segment_decomposition(a), 1))
    box = cuboid([(0, a) for a in lengths])
    assert verify_scd(d, box).ok
    assert len(d.chains) == rank_profile(box, 1).width()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_product_geometric_unit_square(n):
    seg = segment_decomposition()
    sq = product_geometric(seg, seg)
    d = decompose(sq, n)
    assert verify_scd(d).ok
    assert independent_verify(d)
    base = decompose(seg, n)
    assert d.partition() == product_discrete(base, base).partition()


def test_product_geometric_strong_condition():
    g = product_geometric(segment_decomposition(2), segment_decomposition(3))
    for ctx in turning_contexts(g):
        assert check_strong(ctx).satisfied, ctx.label
    assert decomposition_n(g) == 1


def test_product_geometric_rectangle_counts():
    g = product_geometric(segment_decomposition(2), segment_decomposition(3))
    d1 = decompose(g, 1)
    assert verify_scd(d1).ok and len(d1.chains) == 3
    d2 = decompose(g, 2)
    assert verify_scd(d2).ok and len(d2.chains) == 5


def test_product_geometric_three_factors():
    g = product_geometric(product_geometric(segment_decomposition(2), segment_decomposition(3)),
                          segment_decomposition(5))
    d = decompose(g, 1)
    assert verify_scd(d).ok
    assert len(d.chains) == rank_profile(g.polytope, 1).width()


def test_product_geometric_l2_square():
    g = product_geometric(get("L2").decomposition, segment_decomposition())
    assert validate_geo(g, sample_denoms=(1, 2)).ok
    for n in (1, 2):
        assert verify_scd(decompose(g, n)).ok


def test_product_geometric_mixed_kinds():
    with pytest.raises(MixedKindsError):
        product_geometric(square_boundary_decomposition(), segment_decomposition())

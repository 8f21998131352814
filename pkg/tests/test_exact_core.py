from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from scdforge.errors import DegenerateSimplex, DimensionMismatch
from scdforge.exact_core import (
    Hyperplane,
    PartialSimplex,
    Simplex,
    barycentric,
    eval_hyperplane,
    in_partial_simplex,
    point,
    rank,
    rat,
    rat_str,
    support,
)

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=12)


def test_rank_examples():
    assert rank(point([0, 0, 0])) == 0
    assert rank(point(["1/2", "1/2"])) == 1
    assert rank(point([0, "1/3", "2/3", 1])) == 2


def test_rat_lowest_terms_and_strings():
    q = rat("6/8")
    assert (q.numerator, q.denominator) == (3, 4)
    assert rat_str(F(3, 4)) == "3/4"
    assert rat_str(F(2)) == "2"
    assert rat(rat_str(F(-7, 3))) == F(-7, 3)


def test_eval_hyperplane_examples():
    h = Hyperplane(point([1, 1]), F(1))
    assert eval_hyperplane(h, point(["1/2", "1/2"])) == 0
    assert eval_hyperplane(h, point([0, 0])) == -1
    assert eval_hyperplane(Hyperplane(point([1, -2, 1]), F(0)), point([0, 0, 0])) == 0
    with pytest.raises(DimensionMismatch):
        eval_hyperplane(h, point([0, 0, 0]))


def test_zero_hyperplane_rejected():
    with pytest.raises(ValueError):
        Hyperplane(point([0, 0]), F(1))


TRI = Simplex((point([0, 0]), point([1, 0]), point([0, 1])))


def test_barycentric_examples():
    assert barycentric(TRI, point(["1/3", "1/3"])) == (F(1, 3),) * 3
    lam = barycentric(TRI, point([0, 0]))
    assert lam == (1, 0, 0) and support(lam) == {0}
    assert barycentric(TRI, point([1, 1])) is None


def test_affinely_dependent_simplex_rejected():
    with pytest.raises(DegenerateSimplex):
        Simplex((point([0, 0]), point([1, 1]), point([2, 2])))


SEG = Simplex((point([0, 0]), point([1, 1])))


def test_partial_simplex_examples():
    assert in_partial_simplex(PartialSimplex(SEG), point(["1/2", "1/2"]))
    cut = PartialSimplex(SEG, frozenset({frozenset({0})}))
    assert not in_partial_simplex(cut, point([0, 0]))
    assert in_partial_simplex(cut, point(["1/4", "1/4"]))
    assert in_partial_simplex(cut, point([1, 1]))


def test_partial_simplex_keeps_interior():
    with pytest.raises(ValueError):
        PartialSimplex(SEG, frozenset({frozenset({0, 1})}))
    with pytest.raises(ValueError):
        PartialSimplex(SEG, frozenset({frozenset()}))


@given(st.lists(st.integers(0, 20), min_size=3, max_size=3).filter(lambda w: sum(w) > 0))
def test_barycentric_round_trip(w):
    lam = [F(x, sum(w)) for x in w]
    p = tuple(sum(l * v[j] for l, v in zip(lam, TRI.vertices)) for j in range(2))
    assert barycentric(TRI, p) == tuple(lam)


@given(st.lists(fracs, min_size=3, max_size=3), fracs, st.lists(fracs, min_size=3, max_size=3),
       st.integers(0, 2), fracs)
def test_eval_hyperplane_is_affine(coeffs, b, p, i, c):
    if not any(coeffs):
        coeffs[0] = F(1)
    h = Hyperplane(tuple(coeffs), b)
    q = list(p)
    q[i] += c
    assert eval_hyperplane(h, tuple(q)) - eval_hyperplane(h, tuple(p)) == c * coeffs[i]


@given(st.lists(fracs, min_size=2, max_size=2), st.sets(st.sampled_from([frozenset({0}), frozenset({1}),
                                                                          frozenset({2}), frozenset({0, 1})])))
def test_partial_membership_implies_closed(p, removed):
    ps = PartialSimplex(TRI, frozenset(removed))
    if in_partial_simplex(ps, tuple(p)):
        lam = barycentric(TRI, tuple(p))
        assert lam is not None and min(lam) >= 0


@given(st.lists(fracs, min_size=3, max_size=3), fracs, st.fractions(min_value=F(1, 10), max_value=10))
def test_integer_scaling_is_canonical(coeffs, b, c):
    if not any(coeffs):
        coeffs[1] = F(2)
    h = Hyperplane(tuple(coeffs), b)
    g = Hyperplane(tuple(c * x for x in coeffs), c * b)
    assert h.integer_scaled() == g.integer_scaled()

from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scdforge.catalog import get
from scdforge.errors import ConditionError, PreconditionError
from scdforge.exact_core import Hyperplane, PartialSimplex, Simplex, same_hyperplane
from scdforge.hyperplane_conditions import (
    TurningContext,
    check_strong,
    check_weak,
    cover_m,
    decomposition_n,
    turning_contexts,
)

from tables import L5_FAILING, TABLES, pt_row6_as_printed, pt_rows

h = F(1, 2)


def hp(coeffs, rhs):
    return Hyperplane(tuple(F(c) for c in coeffs), F(rhs))


def context_for(entry, row):
    coeffs, rhs, _, _, label = row
    matches = [c for c in entry.certificates if c.label == label]
    assert len(matches) == 1, label
    ctx = matches[0]
    assert same_hyperplane(ctx.certificate, hp(coeffs, rhs)), (label, ctx.certificate)
    return ctx


def segment_ctx(cert, dirs_in, dirs_out):
    ts = PartialSimplex(Simplex(((F(0), F(0)), (h, h))))
    return TurningContext(ts, frozenset(dirs_in), frozenset(dirs_out), cert)


def test_l2_example_context():
    ts = PartialSimplex(Simplex(((F(0), F(1)), (h, h))))
    res = check_strong(TurningContext(ts, {1}, {0}, hp((1, 1), 1)))
    assert res.satisfied and res.complexity == 1


def test_l5_example_context_fails():
    ctx = context_for(get("L5"), TABLES["L5"][0])
    c = TurningContext(ctx.turning_set, {1, 3}, {2, 4}, hp((0, 1, -1, -3, 3), 0))
    assert not check_strong(c).satisfied
    assert not check_weak(TurningContext(ctx.turning_set, {1}, {2}, c.certificate))


@pytest.mark.parametrize("name", ["L2", "L3", "L4a", "L4b", "L5"])
def test_tables_match_catalog(name):
    entry = get(name)
    table = TABLES[name]
    assert len(table) == len(entry.certificates)
    for row in table:
        ctx = context_for(entry, row)
        if name != "L5":
            assert ctx.dirs_in == frozenset(row[2]) and ctx.dirs_out == frozenset(row[3])


@pytest.mark.parametrize("name", ["L2", "L3", "L4a", "L4b"])
def test_tables_pass_strong_with_complexity_one(name):
    entry = get(name)
    for row in TABLES[name]:
        ctx = context_for(entry, row)
        res = check_strong(TurningContext(ctx.turning_set, row[2], row[3], hp(row[0], row[1])))
        assert res.satisfied and res.complexity == 1, row


def test_l5_table_failing_rows():
    entry = get("L5")
    failing = set()
    for row in TABLES["L5"]:
        ctx = context_for(entry, row)
        if not check_strong(TurningContext(ctx.turning_set, row[2], row[3], hp(row[0], row[1]))).satisfied:
            failing.add(row[4])
    assert failing == L5_FAILING


def test_l5_a_plus_e_directions_follow_swipes():
    ctx = context_for(get("L5"), TABLES["L5"][3])
    assert ctx.dirs_in == {4} and ctx.dirs_out == {0}


@pytest.mark.parametrize("t", [1, F(3, 2), 2, 3])
def test_pt_weak_condition(t):
    entry = get("Pt", t)
    assert entry.certificates
    for ctx in entry.certificates:
        assert check_weak(ctx), (t, ctx.label)


@pytest.mark.parametrize("t", [1, F(3, 2), 2, 3])
def test_pt_table_matches_catalog(t):
    entry = get("Pt", t)
    for row in pt_rows(t):
        ctx = context_for(entry, row)
        assert ctx.dirs_in == frozenset(row[2]) and ctx.dirs_out == frozenset(row[3])


@pytest.mark.parametrize("t", [F(3, 2), 2, 3])
def test_pt_last_row_as_printed_misses_turning_set(t):
    entry = get("Pt", t)
    ctx = context_for(entry, pt_rows(t)[-1])
    coeffs, rhs = pt_row6_as_printed(t)
    printed = hp(coeffs, rhs)
    assert not all(printed.contains(v) for v in ctx.turning_set.vertices)


def test_pt_strong_fails_for_generic_t():
    entry = get("Pt", 2)
    assert any(not check_strong(c).satisfied for c in entry.certificates)


def test_vacuous_context():
    ctx = segment_ctx(hp((3, -3), 0), (), ())
    assert check_weak(ctx)
    res = check_strong(ctx)
    assert res.satisfied and res.complexity == 1


def test_certificate_must_contain_turning_set():
    with pytest.raises(PreconditionError):
        check_strong(segment_ctx(hp((1, 1), 0), (0,), ()))


def test_search_finds_better_certificate():
    ts = PartialSimplex(Simplex(((F(0), F(0), F(0)), (F(0), h, h))))
    ctx = TurningContext(ts, {0}, set(), hp((3, 1, -1), 0))
    assert not check_strong(ctx).satisfied
    res = check_strong(ctx, search_height=2)
    assert res.satisfied and res.complexity == 1
    assert all(res.witness.contains(v) for v in ts.vertices)
    assert abs(res.witness.coeffs[0]) == 1


def test_complexity_is_rhs_denominator():
    ts = PartialSimplex(Simplex(((F(1, 3), F(0)),)))
    res = check_strong(TurningContext(ts, {0}, set(), hp((1, 0), F(1, 3))))
    assert res.satisfied and res.complexity == 3


@settings(max_examples=80, deadline=None)
@given(st.fractions(min_value=-5, max_value=5).filter(lambda c: c != 0), st.sampled_from(["L2", "L3", "L4a", "L5"]))
def test_scale_invariance(c, name):
    for ctx in get(name).certificates:
        cert = ctx.certificate
        scaled = Hyperplane(tuple(c * a for a in cert.coeffs), c * cert.rhs)
        other = TurningContext(ctx.turning_set, ctx.dirs_in, ctx.dirs_out, scaled, ctx.pairs)
        assert check_strong(other) == check_strong(ctx)
        assert check_weak(other) == check_weak(ctx)


@pytest.mark.parametrize("name", ["L2", "L3", "L4a", "L4b"])
def test_strong_implies_weak_on_realized_pairs(name):
    for ctx in get(name).certificates:
        if check_strong(ctx).satisfied:
            assert check_weak(ctx)


def test_decomposition_n():
    assert decomposition_n(get("L2").decomposition) == 1
    assert decomposition_n(get("L3").decomposition) == 1
    assert decomposition_n(get("L4a").decomposition) == 1
    with pytest.raises(ConditionError):
        decomposition_n(get("L5").decomposition)


def test_cover_m():
    assert cover_m(get("L2").decomposition) == 1
    assert cover_m(get("L3").decomposition) == 1
    assert cover_m(get("L5").decomposition) == 27


def test_turning_contexts_count():
    g = get("L3").decomposition
    assert len(turning_contexts(g)) == sum(len(s.swipes) + 1 for s in g.snakes)

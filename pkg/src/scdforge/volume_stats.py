"""Normalized volumes, rank slices and the volume identities of a decomposition.

Everything is exact: regions are cut by rank half-spaces, triangulated by
pulling and measured with determinants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .errors import DegenerateSimplex, PreconditionError
from .exact_core import (
    Hyperplane,
    PartialSimplex,
    Point,
    Simplex,
    affine_dimension,
    determinant,
    matrix_rank,
    point,
    rank,
    sub,
)
from .polytope import (
    Constraint,
    Polytope,
    is_full_dimensional,
    polytope_rank,
    simplex_volume,
    triangulate,
    vertices_from_constraints,
    volume,
)
from .snake_model import GeoDecomposition


@dataclass(frozen=True)
class NormalizedVolume:
    value: Fraction
    direction: int


def _drop(p: Sequence[Fraction], i: int) -> Point:
    return tuple(p[:i]) + tuple(p[i + 1:])


def _simplex_normalized(verts: Sequence[Point], i: int) -> Fraction:
    m = len(verts[0])
    k = len(verts) - 1
    if k == 0:
        return Fraction(1) if m == 1 else Fraction(0)
    diffs = [sub(v, verts[0]) for v in verts[1:]]
    if matrix_rank(diffs) < k:
        return Fraction(0)
    projected = [_drop(d, i) for d in diffs]
    if matrix_rank(projected) < k:
        raise DegenerateSimplex(f"projection along axis {i} is not injective")
    if k < m - 1:
        return Fraction(0)
    return abs(determinant(projected)) / factorial(k)


def normalized_volume(S, i: int) -> Fraction:
    """Measure of S projected along e_i onto x_i = 0, in dimension m - 1.

    S may be a PartialSimplex (removed faces have measure zero), a Simplex, a
    vertex list of a simplex, or a convex Polytope.
    """
    if isinstance(S, PartialSimplex):
        verts = S.vertices
    elif isinstance(S, Simplex):
        verts = S.vertices
    elif isinstance(S, Polytope):
        total = Fraction(0)
        for piece in S.convex_pieces():
            for s in triangulate(piece.vertices, piece.constraints):
                total += _simplex_normalized(s, i)
        return total
    else:
        verts = tuple(point(v) for v in S)
    if not 0 <= i < len(verts[0]):
        raise ValueError(f"axis {i} out of range")
    return _simplex_normalized(verts, i)


# --- cutting a simplex by a rank half-space ---------------------------------


def _standard_simplex_constraints(k: int) -> list[Constraint]:
    cons = []
    for j in range(k):
        coeffs = [Fraction(0)] * k
        coeffs[j] = Fraction(-1)
        cons.append(Constraint(Hyperplane(tuple(coeffs), Fraction(0))))
    cons.append(Constraint(Hyperplane(tuple([Fraction(1)] * k), Fraction(1))))
    return cons


def rank_cut(verts: Sequence[Point], lam: Fraction) -> tuple[Fraction, Fraction | None]:
    """(fraction of the simplex below rank lam, mean rank of that part).

    Works in barycentric coordinates, where the simplex is the standard one
    and rank is linear, so only the vertex ranks matter.
    """
    r = [rank(v) for v in verts]
    k = len(verts) - 1
    if all(x <= lam for x in r):
        return Fraction(1), sum(r, Fraction(0)) / len(r)
    if all(x > lam for x in r):
        return Fraction(0), None
    if k == 0:
        return (Fraction(1), r[0]) if r[0] <= lam else (Fraction(0), None)
    # beta_0 = 1 - sum(beta_1..beta_k); rank = r0 + sum beta_j (r_j - r0)
    coeffs = tuple(r[j] - r[0] for j in range(1, k + 1))
    cons = _standard_simplex_constraints(k)
    if any(coeffs):
        cons.append(Constraint(Hyperplane(coeffs, lam - r[0])))
    region = vertices_from_constraints(cons, k)
    if affine_dimension(region) < k:
        return Fraction(0), None
    whole = Fraction(1, factorial(k))
    vol = Fraction(0)
    moment = Fraction(0)
    for s in triangulate(region, cons):
        v = simplex_volume(s)
        centroid = [sum(c) / (k + 1) for c in zip(*s)]
        vol += v
        moment += v * (r[0] + sum(b * c for b, c in zip(centroid, coeffs)))
    return vol / whole, moment / vol


# --- slices and sub-level sets of P -----------------------------------------


def _ones(m: int) -> tuple[Fraction, ...]:
    return tuple([Fraction(1)] * m)


def _cut_pieces(P: Polytope, lam: Fraction, rel: str) -> list[tuple[list[Point], list[Constraint]]]:
    out = []
    for piece in P.convex_pieces():
        cons = list(piece.constraints) + [Constraint(Hyperplane(_ones(P.dim), lam), rel)]
        verts = vertices_from_constraints(cons, P.dim)
        if verts:
            out.append((verts, cons))
    return out


def slice_normalized_volume(P: Polytope, lam, i: int = 0) -> Fraction:
    """Normalized volume (direction e_i) of P intersected with rank = lam."""
    lam = Fraction(lam)
    total = Fraction(0)
    for verts, cons in _cut_pieces(P, lam, "="):
        if affine_dimension(verts) < P.dim - 1:
            continue
        for s in triangulate(verts, cons):
            total += _simplex_normalized(s, i)
    return total


def volume_below(P: Polytope, lam) -> Fraction:
    """Volume of P intersected with rank <= lam."""
    lam = Fraction(lam)
    total = Fraction(0)
    for verts, cons in _cut_pieces(P, lam, "<="):
        if affine_dimension(verts) < P.dim:
            continue
        total += sum((simplex_volume(s) for s in triangulate(verts, cons)), Fraction(0))
    return total


# --- identities -------------------------------------------------------------


def _require_full(g: GeoDecomposition):
    if not is_full_dimensional(g.polytope):
        raise PreconditionError("volume identities need a full-dimensional polytope")


def _starts(g: GeoDecomposition):
    for snake in g.snakes:
        first = snake.swipes[0]
        lengths = [sum((s.lengths[j] for s in snake.swipes), Fraction(0)) for j in range(len(first.start.vertices))]
        yield first.start.vertices, first.direction, lengths


def middle_rank(P: Polytope) -> Fraction:
    return polytope_rank(P) / 2


def theorem63_sides(g: GeoDecomposition) -> tuple[Fraction, Fraction]:
    """(sum of N(T) over starting sets, normalized volume of the middle slice)."""
    _require_full(g)
    lhs = sum((normalized_volume(v, d) for v, d, _ in _starts(g)), Fraction(0))
    return lhs, slice_normalized_volume(g.polytope, middle_rank(g.polytope))


def theorem63_check(g: GeoDecomposition) -> bool:
    a, b = theorem63_sides(g)
    return a == b


def theorem64_sides(g: GeoDecomposition) -> tuple[Fraction, Fraction]:
    """(sum of N(T) times the mean vertex chain length, volume of P)."""
    _require_full(g)
    total = Fraction(0)
    for verts, d, lengths in _starts(g):
        total += normalized_volume(verts, d) * sum(lengths, Fraction(0)) / len(lengths)
    return total, volume(g.polytope)


def theorem64_check(g: GeoDecomposition) -> bool:
    a, b = theorem64_sides(g)
    return a == b


def swipe_volume_sides(g: GeoDecomposition) -> tuple[Fraction, Fraction]:
    """(sum of exact swipe volumes, volume of P); no hyperplane condition needed.

    A swipe is a family of segments over its starting set, so its volume is
    the normalized volume of the start in the swipe direction times the mean
    segment length.
    """
    _require_full(g)
    total = Fraction(0)
    for snake in g.snakes:
        for s in snake.swipes:
            if s.degenerate:
                continue
            total += normalized_volume(s.start.vertices, s.direction) * sum(s.lengths, Fraction(0)) / len(s.lengths)
    return total, volume(g.polytope)


@dataclass(frozen=True)
class LambdaSides:
    lam: Fraction
    slice_sum: Fraction
    slice_volume: Fraction
    below_sum: Fraction
    below_volume: Fraction

    @property
    def ok(self) -> bool:
        return self.slice_sum == self.slice_volume and self.below_sum == self.below_volume


def theorem65_66_sides(g: GeoDecomposition, lam) -> LambdaSides:
    _require_full(g)
    lam = Fraction(lam)
    if lam > middle_rank(g.polytope):
        raise PreconditionError(f"lambda {lam} exceeds the middle rank")
    slice_sum = Fraction(0)
    below_sum = Fraction(0)
    for verts, d, _ in _starts(g):
        frac, mean = rank_cut(verts, lam)
        if not frac:
            continue
        n_t = normalized_volume(verts, d) * frac
        slice_sum += n_t
        below_sum += n_t * (lam - mean)
    return LambdaSides(lam, slice_sum, slice_normalized_volume(g.polytope, lam), below_sum,
                       volume_below(g.polytope, lam))


def theorem65_66_check(g: GeoDecomposition, lam) -> bool:
    return theorem65_66_sides(g, lam).ok


def sample_lambdas(P: Polytope) -> list[Fraction]:
    """Vertex ranks up to the middle rank, and midpoints of consecutive ones."""
    top = middle_rank(P)
    ranks = sorted({rank(v) for v in P.vertices} | {top})
    ranks = [r for r in ranks if r <= top]
    mids = [(a + b) / 2 for a, b in zip(ranks, ranks[1:])]
    return sorted(set(ranks) | set(mids))


def volume_rank_symmetry(P: Polytope) -> bool:
    """f(lam) + f(R - lam) = vol(P) at all vertex ranks and their midpoints."""
    if not is_full_dimensional(P):
        raise PreconditionError("volume rank symmetry needs a full-dimensional polytope")
    R = polytope_rank(P)
    total = volume(P)
    ranks = sorted({rank(v) for v in P.vertices})
    lams = set(ranks) | {(a + b) / 2 for a, b in zip(ranks, ranks[1:])}
    return all(volume_below(P, lam) + volume_below(P, R - lam) == total for lam in sorted(lams))

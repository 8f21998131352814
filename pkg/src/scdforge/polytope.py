"""Rational polytopes: membership, rank, lattice points and exact triangulation.

A convex polytope carries both its vertices and its inequalities. A
non-convex polytope (a union of faces, the boundary of a square) is a list of
convex pieces and is a member test away from being usable everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from math import ceil, factorial, floor
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, PreconditionError
from .exact_core import (
    Hyperplane,
    Point,
    Simplex,
    affine_dimension,
    common_denominator,
    determinant,
    matrix_rank,
    point,
    rank,
    solve,
    sub,
)

LatticePoint = tuple[int, ...]


@dataclass(frozen=True)
class Constraint:
    hyperplane: Hyperplane
    rel: str = "<="

    def __post_init__(self):
        if self.rel not in ("<=", "="):
            raise ValueError(f"unknown relation {self.rel!r}")

    def holds(self, p: Sequence[Fraction]) -> bool:
        r = self.hyperplane.residual(p)
        return r == 0 if self.rel == "=" else r <= 0


@dataclass(frozen=True)
class Polytope:
    dim: int
    vertices: tuple[Point, ...]
    constraints: tuple[Constraint, ...] = ()
    pieces: tuple["Polytope", ...] = ()
    fast: str | None = None
    fast_params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(point(v) for v in self.vertices))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if any(len(v) != self.dim for v in self.vertices):
            raise DimensionMismatch("vertex of wrong dimension")
        if not self.pieces:
            for v in self.vertices:
                for c in self.constraints:
                    if not c.holds(v):
                        raise ValueError(f"vertex {v} violates {c}")

    @property
    def is_union(self) -> bool:
        return bool(self.pieces)

    def convex_pieces(self) -> tuple["Polytope", ...]:
        return self.pieces if self.pieces else (self,)

    def contains(self, p: Sequence[Fraction]) -> bool:
        return contains(self, p)


# --- constructors -----------------------------------------------------------


def simplex_polytope(vertices: Sequence[Sequence[Fraction]]) -> Polytope:
    """H- and V-description of a (possibly lower dimensional) simplex."""
    s = Simplex(tuple(point(v) for v in vertices))
    lams, eqs = s.affine_functionals()
    cons = []
    for coeffs, const in lams:
        if any(coeffs):
            cons.append(Constraint(Hyperplane(tuple(-c for c in coeffs), const)))
    for coeffs, const in eqs:
        cons.append(Constraint(Hyperplane(coeffs, -const), "="))
    return Polytope(s.ambient, s.vertices, tuple(cons))


def order_simplex(m: int) -> Polytope:
    """L(m) = {0 <= x1 <= ... <= xm <= 1}."""
    verts = [tuple(Fraction(int(j >= m - i)) for j in range(m)) for i in range(m + 1)]
    return Polytope(m, tuple(verts), _chain_constraints([Fraction(1)] * m), fast="order_simplex")


def weighted_order_simplex(weights: Sequence[Fraction]) -> Polytope:
    """The image of L(m) under the diagonal scaling by `weights`."""
    w = point(weights)
    m = len(w)
    verts = [tuple(w[j] if j >= m - i else Fraction(0) for j in range(m)) for i in range(m + 1)]
    return Polytope(m, tuple(verts), _chain_constraints(w), fast="weighted_order_simplex", fast_params=w)


def _chain_constraints(w: Sequence[Fraction]) -> tuple[Constraint, ...]:
    m = len(w)
    cons = []
    zero = [Fraction(0)] * m
    c = list(zero)
    c[0] = Fraction(-1)
    cons.append(Constraint(Hyperplane(tuple(c), 0)))
    for j in range(m - 1):
        c = list(zero)
        c[j] = 1 / w[j]
        c[j + 1] = -1 / w[j + 1]
        cons.append(Constraint(Hyperplane(tuple(c), 0)))
    c = list(zero)
    c[m - 1] = 1 / w[m - 1]
    cons.append(Constraint(Hyperplane(tuple(c), 1)))
    return tuple(cons)


def cuboid(bounds: Sequence[tuple]) -> Polytope:
    """Axis-parallel box, bounds given as (lo, hi) pairs."""
    b = [(Fraction(lo), Fraction(hi)) for lo, hi in bounds]
    m = len(b)
    verts = [tuple(c) for c in product(*[(lo, hi) for lo, hi in b])]
    verts = sorted(set(verts))
    cons = []
    for j, (lo, hi) in enumerate(b):
        e = [Fraction(0)] * m
        e[j] = Fraction(1)
        cons.append(Constraint(Hyperplane(tuple(e), hi)))
        cons.append(Constraint(Hyperplane(tuple(-x for x in e), -lo)))
    return Polytope(m, tuple(verts), tuple(cons), fast="cuboid", fast_params=tuple(b))


def union(pieces: Sequence[Polytope]) -> Polytope:
    flat = []
    for p in pieces:
        flat.extend(p.convex_pieces())
    dim = flat[0].dim
    verts = sorted({v for p in flat for v in p.vertices})
    return Polytope(dim, tuple(verts), (), tuple(flat))


def product_polytope(p: Polytope, q: Polytope) -> Polytope:
    """Cartesian product P x Q in R^(m1+m2)."""
    if p.is_union or q.is_union:
        return union([product_polytope(a, b) for a in p.convex_pieces() for b in q.convex_pieces()])
    if p.fast == "cuboid" and q.fast == "cuboid":
        return cuboid(list(p.fast_params) + list(q.fast_params))
    m1, m2 = p.dim, q.dim
    verts = [a + b for a in p.vertices for b in q.vertices]
    cons = [Constraint(c.hyperplane.lift(0, m1 + m2), c.rel) for c in p.constraints]
    cons += [Constraint(c.hyperplane.lift(m1, m1 + m2), c.rel) for c in q.constraints]
    return Polytope(m1 + m2, tuple(verts), tuple(cons))


# --- membership and rank ----------------------------------------------------


def contains(P: Polytope, p: Sequence[Fraction]) -> bool:
    if len(p) != P.dim:
        raise DimensionMismatch(f"point of dimension {len(p)} in a polytope of dimension {P.dim}")
    p = point(p)
    if P.pieces:
        return any(contains(piece, p) for piece in P.pieces)
    return all(c.holds(p) for c in P.constraints)


def polytope_rank(P: Polytope) -> Fraction:
    """Maximum plus minimum rank over the polytope."""
    if not P.vertices:
        raise PreconditionError("empty polytope")
    ranks = [rank(v) for v in P.vertices]
    return max(ranks) + min(ranks)


def to_point(numerators: Sequence[int], n: int) -> Point:
    return tuple(Fraction(a, n) for a in numerators)


def to_numerators(p: Sequence[Fraction], n: int) -> LatticePoint | None:
    out = []
    for c in p:
        v = c * n
        if v.denominator != 1:
            return None
        out.append(v.numerator)
    return tuple(out)


# --- integer forms for bulk evaluation ---------------------------------------


class IntForms:
    """A stack of affine forms f(p) = a.p + c evaluated on lattice points.

    For p = X/n the value n*scale*f(p) = A.X + C*n is an exact integer with
    the sign of f(p), which is all membership tests need.
    """

    def __init__(self, forms: Sequence[tuple[Sequence[Fraction], Fraction]]):
        rows, consts, scales = [], [], []
        for coeffs, const in forms:
            d = common_denominator(list(coeffs) + [const])
            rows.append([int(a * d) for a in coeffs])
            consts.append(int(const * d))
            scales.append(d)
        self.A = rows
        self.C = consts
        self.scales = scales

    def __len__(self):
        return len(self.A)

    def evaluate(self, X: np.ndarray, n: int) -> np.ndarray:
        """Integer matrix of shape (len(X), len(self))."""
        if not self.A:
            return np.zeros((len(X), 0), dtype=np.int64)
        amax = max((abs(a) for row in self.A for a in row), default=0)
        cmax = max((abs(c) for c in self.C), default=0)
        xmax = int(np.abs(X).max()) if X.size else 0
        bound = amax * xmax * X.shape[1] + cmax * n
        if bound < 2**62 and X.dtype != object:
            A = np.array(self.A, dtype=np.int64)
            C = np.array(self.C, dtype=np.int64)
            return X.astype(np.int64) @ A.T + C * n
        A = np.array(self.A, dtype=object)
        C = np.array(self.C, dtype=object)
        return X.astype(object) @ A.T + C * n


def _piece_forms(P: Polytope) -> tuple[IntForms, IntForms]:
    ineq = [(c.hyperplane.coeffs, -c.hyperplane.rhs) for c in P.constraints if c.rel == "<="]
    eq = [(c.hyperplane.coeffs, -c.hyperplane.rhs) for c in P.constraints if c.rel == "="]
    return IntForms(ineq), IntForms(eq)


def contains_array(P: Polytope, X: np.ndarray, n: int) -> np.ndarray:
    """Vectorised membership for rows of integer numerators X at denominator n."""
    mask = np.zeros(len(X), dtype=bool)
    for piece in P.convex_pieces():
        ineq, eq = _piece_forms(piece)
        ok = np.ones(len(X), dtype=bool)
        if len(ineq):
            ok &= np.all(ineq.evaluate(X, n) <= 0, axis=1)
        if len(eq):
            ok &= np.all(eq.evaluate(X, n) == 0, axis=1)
        mask |= ok
    return mask


# --- lattice point enumeration ---------------------------------------------


def lattice_array(P: Polytope, n: int) -> np.ndarray:
    """All points of (1/n)Z^m in P as integer numerators, lexicographically sorted."""
    if n < 1:
        raise PreconditionError("denominator must be positive")
    m = P.dim
    if P.fast == "order_simplex":
        pts = list(combinations_with_replacement(range(n + 1), m))
        return np.array(pts, dtype=np.int64).reshape(len(pts), m)
    if P.fast == "cuboid":
        ranges = [range(ceil(lo * n), floor(hi * n) + 1) for lo, hi in P.fast_params]
        pts = list(product(*ranges))
        return np.array(pts, dtype=np.int64).reshape(len(pts), m)
    lo = [min(v[j] for v in P.vertices) for j in range(m)]
    hi = [max(v[j] for v in P.vertices) for j in range(m)]
    ranges = [np.arange(ceil(lo[j] * n), floor(hi[j] * n) + 1, dtype=np.int64) for j in range(m)]
    chunks = []
    for first in ranges[0]:
        grids = np.meshgrid(*([np.array([first])] + ranges[1:]), indexing="ij")
        X = np.stack([g.ravel() for g in grids], axis=1)
        chunks.append(X[contains_array(P, X, n)])
    if not chunks:
        return np.zeros((0, m), dtype=np.int64)
    X = np.concatenate(chunks)
    order = np.lexsort(X.T[::-1])
    return X[order]


def lattice_points(P: Polytope, n: int) -> list[LatticePoint]:
    return [tuple(int(a) for a in row) for row in lattice_array(P, n)]


# --- vertex enumeration and triangulation ------------------------------------


def vertices_from_constraints(constraints: Sequence[Constraint], m: int) -> list[Point]:
    """Vertices of a bounded polyhedron given by constraints, by brute force."""
    eqs = [c.hyperplane for c in constraints if c.rel == "="]
    ineqs = [c.hyperplane for c in constraints if c.rel == "<="]
    eq_rank = matrix_rank([h.coeffs for h in eqs]) if eqs else 0
    need = m - eq_rank
    found: set[Point] = set()
    for subset in combinations(range(len(ineqs)), need):
        rows = [h.coeffs for h in eqs] + [ineqs[i].coeffs for i in subset]
        if matrix_rank(rows) < m:
            continue
        rhs = [h.rhs for h in eqs] + [ineqs[i].rhs for i in subset]
        x = solve(rows, rhs)
        if x is None:
            continue
        if all(h.residual(x) <= 0 for h in ineqs) and all(h.residual(x) == 0 for h in eqs):
            found.add(x)
    return sorted(found)


def triangulate(vertices: Sequence[Point], constraints: Sequence[Constraint]) -> list[tuple[Point, ...]]:
    """Pulling triangulation of a convex polytope.

    The lexicographically least vertex is pulled; every facet avoiding it is
    triangulated recursively. Facets are read off the tight sets of the
    inequalities, so the constraint list must contain every facet.
    """
    verts = sorted(set(point(v) for v in vertices))
    if not verts:
        return []
    ineqs = [c.hyperplane for c in constraints if c.rel == "<="]
    tight = [frozenset(i for i, v in enumerate(verts) if h.residual(v) == 0) for h in ineqs]
    dim = affine_dimension(verts)
    out: list[tuple[int, ...]] = []

    def pull(ids: tuple[int, ...], d: int, prefix: tuple[int, ...]):
        if len(ids) == d + 1:
            out.append(prefix + ids)
            return
        v = ids[0]
        facets = set()
        idset = frozenset(ids)
        for t in tight:
            f = idset & t
            if v in f or len(f) < d:
                continue
            if affine_dimension([verts[i] for i in f]) == d - 1:
                facets.add(tuple(sorted(f)))
        for f in sorted(facets):
            pull(f, d - 1, prefix + (v,))

    pull(tuple(range(len(verts))), dim, ())
    return [tuple(verts[i] for i in s) for s in out]


def simplex_volume(vertices: Sequence[Point]) -> Fraction:
    """Volume of a full-dimensional simplex (zero if flat)."""
    d = len(vertices) - 1
    v0 = vertices[0]
    return abs(determinant([sub(v, v0) for v in vertices[1:]])) / factorial(d)


def polytope_simplices(P: Polytope) -> list[tuple[Point, ...]]:
    """A triangulation of P (pieces triangulated independently)."""
    out = []
    for piece in P.convex_pieces():
        out.extend(triangulate(piece.vertices, piece.constraints))
    return out


def volume(P: Polytope) -> Fraction:
    """Full-dimensional volume. Pieces of a union must have disjoint interiors."""
    return sum((simplex_volume(s) for s in polytope_simplices(P) if len(s) == P.dim + 1), Fraction(0))


def is_full_dimensional(P: Polytope) -> bool:
    return any(affine_dimension(piece.vertices) == P.dim for piece in P.convex_pieces())


def iter_points(P: Polytope, n: int) -> Iterable[Point]:
    for row in lattice_points(P, n):
        yield to_point(row, n)

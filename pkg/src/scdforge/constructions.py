"""Coning off a projected decomposition, and products of decompositions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .discrete_poset import ChainDecomposition, DiscreteChain, scaled_rank
from .errors import DimensionMismatch, MixedKindsError, PreconditionError
from .exact_core import (
    Hyperplane,
    PartialSimplex,
    Point,
    Simplex,
    affine_dimension,
    all_supports,
    hyperplane_through,
    point,
    rank,
    support,
)
from .polytope import (
    Constraint,
    Polytope,
    contains,
    lattice_points,
    product_polytope,
    simplex_polytope,
    triangulate,
    union,
    vertices_from_constraints,
)
from .snake_model import ASYMPTOTIC, EXACT, REAL, GeoDecomposition, Snake, Swipe


@dataclass(frozen=True)
class ConeSpec:
    apex: Point
    base: GeoDecomposition
    apex_owner: int | None = None
    target: Polytope | None = None

    def owner(self) -> int:
        if self.apex_owner is not None:
            return self.apex_owner
        for i, s in enumerate(self.base.snakes):
            if s.kind == REAL:
                return i
        return 0


def _cone_set(t: PartialSimplex, v: Point, keep_apex: bool) -> PartialSimplex:
    k = len(t.vertices)
    removed = set()
    for s in t.removed:
        removed.add(s)
        removed.add(s | {k})
    if not keep_apex:
        removed.add(frozenset({k}))
    return PartialSimplex(Simplex(t.vertices + (v,)), frozenset(removed))


def cone_off(spec: ConeSpec, sample_denoms: Sequence[int] = (1, 2)) -> GeoDecomposition:
    """Lift a decomposition of a projected polytope Q to conv(Q, apex).

    Every turning set T becomes conv(T, apex). Removed faces s of T are removed
    together with s + apex; the bare apex stays only in the owner snake.
    """
    v = point(spec.apex)
    base = spec.base
    Q = base.polytope
    if len(v) != Q.dim:
        raise DimensionMismatch("apex dimension differs from the polytope")
    if contains(Q, v):
        raise PreconditionError("the apex lies on the projected polytope")
    if spec.target is not None:
        target_rank = rank(min(spec.target.vertices, key=rank)) + rank(max(spec.target.vertices, key=rank))
    else:
        target_rank = rank(min(Q.vertices, key=rank)) + rank(max(Q.vertices, key=rank))
    if 2 * rank(v) != target_rank:
        raise PreconditionError(f"apex rank {rank(v)} is not the middle rank {target_rank / 2}")

    cones = union([simplex_polytope(piece.vertices + (v,)) for piece in _simplex_pieces(Q)])
    polytope = spec.target if spec.target is not None else cones
    if spec.target is not None:
        for n in sample_denoms:
            a = set(lattice_points(spec.target, n))
            b = set(lattice_points(cones, n))
            if a != b:
                raise PreconditionError(f"target is not the cone over the base at n={n}")

    owner = spec.owner()
    snakes = []
    for idx, snake in enumerate(base.snakes):
        keep = idx == owner
        swipes = []
        for s in snake.swipes:
            for cert in (s.start_cert, s.end_cert):
                if not cert.contains(v):
                    raise PreconditionError(f"certificate {cert} does not contain the apex")
            swipes.append(Swipe(s.direction, _cone_set(s.start, v, keep), _cone_set(s.end, v, keep),
                                s.start_cert, s.end_cert))
        snakes.append(Snake(snake.kind, tuple(swipes)))
    return GeoDecomposition(polytope, tuple(snakes), base.mode, base.cover_m_override)


def _simplex_pieces(Q: Polytope) -> list[Polytope]:
    out = []
    for piece in Q.convex_pieces():
        for s in triangulate(piece.vertices, piece.constraints):
            out.append(simplex_polytope(s))
    return out


# --- discrete products ------------------------------------------------------


def _grid_chains(a: int, b: int) -> list[list[tuple[int, int]]]:
    """Symmetric chains of the grid [0,a] x [0,b]: right, then up at the anti-diagonal."""
    chains = []
    for j in range(min(a, b) + 1):
        pts = [(i, j) for i in range(a - j + 1)]
        pts += [(a - j, y) for y in range(j + 1, b + 1)]
        chains.append(pts)
    return chains


def product_discrete(a: ChainDecomposition, b: ChainDecomposition) -> ChainDecomposition:
    """Chain decomposition of (P x Q)(n) from decompositions of P(n) and Q(n)."""
    if a.n != b.n:
        raise PreconditionError(f"denominators differ: {a.n} and {b.n}")
    chains = []
    for ca in a.chains:
        for cb in b.chains:
            xs = sorted(ca.points, key=scaled_rank)
            ys = sorted(cb.points, key=scaled_rank)
            kind = ca.kind if ca.kind == cb.kind else "open"
            for grid in _grid_chains(len(xs) - 1, len(ys) - 1):
                chains.append(DiscreteChain(tuple(xs[i] + ys[j] for i, j in grid), kind))
    parent = None
    if a.polytope is not None and b.polytope is not None:
        parent = product_polytope(a.polytope, b.polytope)
    return ChainDecomposition(a.n, tuple(chains), parent)


# --- geometric products -----------------------------------------------------
#
# A product chain starts at (x, y') with x a start point of a chain of the
# first snake and y' on a chain C_y of the second, at rank offset t above y.
# It goes along C_x until its rank sum reaches rk(x_e) + rk(y), then along
# C_y to y_e. Start points are parametrized by z = (free barycentric
# coordinates of x, free barycentric coordinates of y, t); every quantity
# below is affine in z once the crossing pattern (r, s) is fixed.


@dataclass(frozen=True)
class _Flow:
    """A snake seen as a family of chains over its starting set."""

    snake: Snake
    offset: int

    @property
    def turning(self) -> list[tuple[Point, ...]]:
        return [t.vertices for t in self.snake.turning_sets]

    @property
    def size(self) -> int:
        return len(self.snake.swipes[0].start.vertices)

    def rank_forms(self, start: int, total: int) -> list[tuple[list[Fraction], Fraction]]:
        """Rank of each turning point as an affine form in z[start:start + size - 1]."""
        out = []
        for verts in self.turning:
            r = [rank(v) for v in verts]
            coeffs = [Fraction(0)] * total
            for k in range(1, len(r)):
                coeffs[start + k - 1] = r[k] - r[0]
            out.append((coeffs, r[0]))
        return out

    def point_at(self, bary: Sequence[Fraction], level: int, extra: Fraction = Fraction(0)) -> Point:
        """Turning point `level` of the chain through bary, moved `extra` along the next swipe."""
        verts = self.turning[level]
        p = [sum((b * v[j] for b, v in zip(bary, verts)), Fraction(0)) for j in range(len(verts[0]))]
        if extra:
            p[self.snake.swipes[level].direction] += extra
        return tuple(p)


def _bary(z: Sequence[Fraction], start: int, size: int) -> tuple[Fraction, ...]:
    free = tuple(z[start:start + size - 1])
    return (1 - sum(free, Fraction(0)),) + free


def _le(lhs, rhs, total):
    """Constraint lhs <= rhs for affine forms given as (coeffs, const)."""
    coeffs = tuple(a - b for a, b in zip(lhs[0], rhs[0]))
    return Constraint(Hyperplane(coeffs, rhs[1] - lhs[1]))


def _simplex_bound(start: int, size: int, total: int) -> list[Constraint]:
    cons = []
    for k in range(size - 1):
        c = [Fraction(0)] * total
        c[start + k] = Fraction(-1)
        cons.append(Constraint(Hyperplane(tuple(c), Fraction(0))))
    if size > 1:
        c = [Fraction(0)] * total
        for k in range(size - 1):
            c[start + k] = Fraction(1)
        cons.append(Constraint(Hyperplane(tuple(c), Fraction(1))))
    return cons


def _pair_cells(fa: _Flow, fb: _Flow) -> list[tuple[int, int, list[tuple[Point, ...]]]]:
    """Triangulated crossing-pattern cells (r, s) of one snake pair, in z-space."""
    na, nb = fa.size, fb.size
    total = (na - 1) + (nb - 1) + 1
    ti = total - 1
    rho = fa.rank_forms(0, total)
    sigma = fb.rank_forms(na - 1, total)
    t = ([Fraction(0)] * ti + [Fraction(1)], Fraction(0))
    zero = ([Fraction(0)] * total, Fraction(0))

    def diff(f, g):
        return [a - b for a, b in zip(f[0], g[0])], f[1] - g[1]

    len_a = diff(rho[-1], rho[0])
    len_b = diff(sigma[-1], sigma[0])
    base = _simplex_bound(0, na, total) + _simplex_bound(na - 1, nb, total)
    base += [_le(zero, t, total), _le(t, len_a, total), _le(t, len_b, total)]
    turn = diff(rho[-1], t)  # rank of x at the bisector
    cells = []
    for s in range(len(fb.snake.swipes)):
        for r in range(len(fa.snake.swipes)):
            cons = base + [
                _le(diff(sigma[s], sigma[0]), t, total),
                _le(t, diff(sigma[s + 1], sigma[0]), total),
                _le(rho[r], turn, total),
                _le(turn, rho[r + 1], total),
            ]
            verts = vertices_from_constraints(cons, total)
            if verts:
                cells.append((r, s, verts, cons, affine_dimension(verts)))
    if not cells:
        return []
    top = max(c[4] for c in cells)
    return [(r, s, triangulate(v, cons)) for r, s, v, cons, d in cells if d == top]


def _pair_snakes(fa: _Flow, fb: _Flow, m: int, kind: str) -> list[Snake]:
    na, nb = fa.size, fb.size
    ti = (na - 1) + (nb - 1)
    a_sw, b_sw = fa.snake.swipes, fb.snake.swipes
    ta, tb = a_sw[0].start, b_sw[0].start
    owned: set[frozenset] = set()
    snakes = []
    for r, s, simplices in _pair_cells(fa, fb):
        for simplex in simplices:
            removed = set()
            for sup in all_supports(len(simplex)):
                key = frozenset(simplex[k] for k in sup)
                mid = [sum(c, Fraction(0)) / len(sup) for c in zip(*key)]
                if (support(_bary(mid, 0, na)) in ta.removed
                        or support(_bary(mid, na - 1, nb)) in tb.removed
                        or key in owned):
                    removed.add(sup)
                else:
                    owned.add(key)
            if frozenset(range(len(simplex))) not in removed:
                snakes.append(_emit(fa, fb, r, s, simplex, frozenset(removed), m, kind))
    return snakes


def _emit(fa: _Flow, fb: _Flow, r: int, s: int, simplex, removed, m: int, kind: str) -> Snake:
    """The product snake over one start simplex with crossing pattern (r, s)."""
    na, nb = fa.size, fb.size
    p = len(fa.turning[0][0])
    a_sw, b_sw = fa.snake.swipes, fb.snake.swipes
    levels: list[list[Point]] = []  # turning sets, vertex by vertex
    for z in simplex:
        ba, bb = _bary(z, 0, na), _bary(z, na - 1, nb)
        t = z[-1]
        rk_y = rank(fb.point_at(bb, 0))
        sig = [rank(fb.point_at(bb, j)) for j in range(len(b_sw) + 1)]
        y_mid = fb.point_at(bb, s, rk_y + t - sig[s])
        rho = [rank(fa.point_at(ba, j)) for j in range(len(a_sw) + 1)]
        u = rho[-1] - t
        x_turn = fa.point_at(ba, r, u - rho[r])
        row = [fa.point_at(ba, j) + y_mid for j in range(r + 1)]
        row.append(x_turn + y_mid)
        row += [x_turn + fb.point_at(bb, j) for j in range(s + 1, len(b_sw) + 1)]
        levels.append(row)
    sets = list(zip(*levels))
    dirs = [a_sw[j].direction for j in range(r + 1)] + [p + b_sw[j].direction for j in range(s, len(b_sw))]
    certs = [a_sw[j].start_cert.lift(0, m) for j in range(r + 1)]
    certs.append(hyperplane_through(sets[r + 1], prefer=(dirs[r], dirs[r + 1])))
    certs += [b_sw[j].end_cert.lift(p, m) for j in range(s, len(b_sw))]
    swipes = []
    for j, d in enumerate(dirs):
        swipes.append(Swipe(d, PartialSimplex(Simplex(tuple(sets[j])), removed),
                            PartialSimplex(Simplex(tuple(sets[j + 1])), removed), certs[j], certs[j + 1]))
    return Snake(kind, tuple(swipes))


def _kinds(g: GeoDecomposition) -> set[str]:
    return {s.kind for s in g.snakes}


def product_geometric(a: GeoDecomposition, b: GeoDecomposition) -> GeoDecomposition:
    """Decomposition of P x Q from same-kind decompositions of P and Q.

    Each pair of snakes becomes a family of rectangles of chains; every
    rectangle is cut into chains that go right, then up, turning where the
    rank reaches that of the bottom-right corner. Start points with the same
    crossing pattern form a polytope, which is triangulated into the starting
    sets of the product snakes.
    """
    ka, kb = _kinds(a), _kinds(b)
    if len(ka | kb) > 1:
        raise MixedKindsError(f"cannot multiply decompositions with snake kinds {sorted(ka)} and {sorted(kb)}")
    kind = (ka | kb).pop()
    m = a.dim + b.dim
    snakes = []
    for sa in a.snakes:
        for sb in b.snakes:
            snakes.extend(_pair_snakes(_Flow(sa, 0), _Flow(sb, a.dim), m, kind))
    mode = EXACT if a.mode == EXACT and b.mode == EXACT else ASYMPTOTIC
    return GeoDecomposition(product_polytope(a.polytope, b.polytope), tuple(snakes), mode)

"""Exact rational points, hyperplanes, simplices and partial simplices.

Every quantity here is a :class:`fractions.Fraction`; nothing touches floats.
Points are plain tuples of fractions so they hash and compare cheaply.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import DegenerateSimplex, DimensionMismatch

Rat = Fraction
Point = tuple[Fraction, ...]


def rat(value) -> Fraction:
    """Coerce ints, fractions and "p/q" strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational")


def point(coords: Iterable) -> Point:
    return tuple(rat(c) for c in coords)


def rat_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def rank(p: Sequence[Fraction]) -> Fraction:
    """Sum of coordinates."""
    return sum(p, Fraction(0))


def add(p: Sequence[Fraction], q: Sequence[Fraction]) -> Point:
    return tuple(a + b for a, b in zip(p, q))


def sub(p: Sequence[Fraction], q: Sequence[Fraction]) -> Point:
    return tuple(a - b for a, b in zip(p, q))


def scale(c: Fraction, p: Sequence[Fraction]) -> Point:
    return tuple(c * a for a in p)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def unit(m: int, i: int, c: Fraction = Fraction(1)) -> Point:
    return tuple(c if j == i else Fraction(0) for j in range(m))


def barycenter(points: Sequence[Sequence[Fraction]]) -> Point:
    k = len(points)
    return tuple(sum(col, Fraction(0)) / k for col in zip(*points))


def common_denominator(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = lcm(d, v.denominator)
    return d


# --- small dense linear algebra over Q -------------------------------------


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(map(rat, r)) for r in rows]
    if not a:
        return a, []
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a, pivots


def matrix_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Point]:
    """Basis of {x : rows . x = 0}."""
    if not rows:
        return [unit(ncols, j) for j in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][f]
        basis.append(tuple(v))
    return basis


def solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Point | None:
    """A solution of rows . x = rhs (free variables set to 0), or None."""
    ncols = len(rows[0])
    aug = [list(r) + [rat(b)] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = red[i][ncols]
    return tuple(x)


def determinant(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [list(map(rat, r)) for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def affine_dimension(points: Sequence[Sequence[Fraction]]) -> int:
    if not points:
        return -1
    base = points[0]
    return matrix_rank([sub(p, base) for p in points[1:]]) if len(points) > 1 else 0


# --- hyperplanes ----------------------------------------------------------


@dataclass(frozen=True)
class Hyperplane:
    """The affine hyperplane sum(coeffs[j] * x[j]) = rhs."""

    coeffs: Point
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", point(self.coeffs))
        object.__setattr__(self, "rhs", rat(self.rhs))
        if all(a == 0 for a in self.coeffs):
            raise ValueError("hyperplane needs a nonzero coefficient")

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def residual(self, p: Sequence[Fraction]) -> Fraction:
        return eval_hyperplane(self, p)

    def contains(self, p: Sequence[Fraction]) -> bool:
        return eval_hyperplane(self, p) == 0

    def normalized(self) -> Hyperplane:
        """Scale so the first nonzero coefficient is +1."""
        lead = next(a for a in self.coeffs if a != 0)
        return Hyperplane(scale(1 / lead, self.coeffs), self.rhs / lead)

    def integer_scaled(self) -> Hyperplane:
        """Integer coefficients with gcd 1 and a positive leading coefficient.

        The right-hand side stays rational; its denominator is the complexity.
        """
        den = common_denominator(self.coeffs)
        ints = [int(a * den) for a in self.coeffs]
        g = 0
        for a in ints:
            g = gcd(g, a)
        lead = next(a for a in ints if a != 0)
        if lead < 0:
            g = -g
        return Hyperplane(tuple(Fraction(a, g) for a in ints), self.rhs * den / g)

    def lift(self, offset: int, total: int) -> Hyperplane:
        """Embed into a larger coordinate space starting at `offset`."""
        coeffs = [Fraction(0)] * total
        coeffs[offset:offset + self.dim] = self.coeffs
        return Hyperplane(tuple(coeffs), self.rhs)

    def __str__(self) -> str:
        return " + ".join(f"{rat_str(a)}*x{j}" for j, a in enumerate(self.coeffs) if a) + f" = {rat_str(self.rhs)}"


def eval_hyperplane(h: Hyperplane, p: Sequence[Fraction]) -> Fraction:
    """Signed residual sum(a_j p_j) - b."""
    if len(p) != h.dim:
        raise DimensionMismatch(f"point has dimension {len(p)}, hyperplane {h.dim}")
    return dot(h.coeffs, p) - h.rhs


def same_hyperplane(h1: Hyperplane, h2: Hyperplane) -> bool:
    return h1.normalized() == h2.normalized()


def hyperplane_through(points: Sequence[Sequence[Fraction]], prefer: Sequence[int] = ()) -> Hyperplane:
    """Some hyperplane containing all points.

    When the affine span has codimension above one, the first null-space
    direction with a nonzero coefficient on every axis in `prefer` is used.
    """
    m = len(points[0])
    rows = [list(p) + [Fraction(-1)] for p in points]
    basis = nullspace(rows, m + 1)
    candidates = [v for v in basis if any(v[:m])]
    if not candidates:
        raise DegenerateSimplex("points span the whole space")
    for v in candidates:
        if all(v[i] != 0 for i in prefer):
            return Hyperplane(v[:m], v[m]).integer_scaled()
    total = tuple(sum(col, Fraction(0)) for col in zip(*candidates))
    v = total if any(total[:m]) else candidates[0]
    return Hyperplane(v[:m], v[m]).integer_scaled()


# --- simplices --------------------------------------------------------------


@dataclass(frozen=True)
class Simplex:
    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not verts:
            raise DegenerateSimplex("empty vertex list")
        m = len(verts[0])
        if any(len(v) != m for v in verts):
            raise DimensionMismatch("vertices of different dimensions")
        if affine_dimension(verts) != len(verts) - 1:
            raise DegenerateSimplex(f"vertices are affinely dependent: {verts}")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def ambient(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def _solver(self):
        # Columns v_j - v_0; keep a square invertible block of rows.
        v0 = self.vertices[0]
        cols = [sub(v, v0) for v in self.vertices[1:]]
        k = len(cols)
        m = self.ambient
        rows = [[cols[j][r] for j in range(k)] for r in range(m)]
        _, piv_rows = rref([list(col) for col in zip(*rows)]) if k else ([], [])
        block = [rows[r] for r in piv_rows]
        inv = _inverse(block) if k else []
        return piv_rows, inv, rows

    def affine_coordinates(self, p: Sequence[Fraction]) -> Point | None:
        """Affine coordinates summing to 1, or None when p is off the span."""
        if len(p) != self.ambient:
            raise DimensionMismatch("point and simplex dimensions differ")
        piv_rows, inv, rows = self._solver
        v0 = self.vertices[0]
        d = sub(p, v0)
        mu = tuple(dot(inv_row, [d[r] for r in piv_rows]) for inv_row in inv)
        for r, row in enumerate(rows):
            if dot(row, mu) != d[r]:
                return None
        return (1 - sum(mu, Fraction(0)),) + mu

    def affine_functionals(self):
        """(barycentric, equalities) as lists of (coeffs, const) affine maps of p."""
        piv_rows, inv, rows = self._solver
        m = self.ambient
        v0 = self.vertices[0]
        mu = []
        for inv_row in inv:
            c = [Fraction(0)] * m
            for j, r in enumerate(piv_rows):
                c[r] += inv_row[j]
            mu.append((tuple(c), -dot(c, v0)))
        lam0 = (tuple(-sum((f[0][r] for f in mu), Fraction(0)) for r in range(m)),
                1 - sum((f[1] for f in mu), Fraction(0)))
        eqs = []
        for r, row in enumerate(rows):
            if r in piv_rows:
                continue
            c = [Fraction(0)] * m
            const = Fraction(0)
            for j, f in enumerate(mu):
                c = [x + row[j] * y for x, y in zip(c, f[0])]
                const += row[j] * f[1]
            c[r] -= 1
            const += v0[r]
            if any(c) or const:
                eqs.append((tuple(c), const))
        return [lam0] + mu, eqs

    def point_at(self, lam: Sequence[Fraction]) -> Point:
        m = self.ambient
        return tuple(sum((l * v[r] for l, v in zip(lam, self.vertices)), Fraction(0)) for r in range(m))


def _inverse(block: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(block)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(block)]
    red, _ = rref(aug)
    return [r[n:] for r in red]


def barycentric(s: Simplex, p: Sequence[Fraction]) -> Point | None:
    """Barycentric coordinates of p in the closed simplex, else None."""
    lam = s.affine_coordinates(p)
    if lam is None or any(l < 0 for l in lam):
        return None
    return lam


def support(lam: Sequence[Fraction]) -> frozenset[int]:
    return frozenset(j for j, l in enumerate(lam) if l != 0)


@dataclass(frozen=True)
class PartialSimplex:
    """A simplex with the relatively open faces listed in `removed` taken out.

    Each removed face is identified by its support: the set of vertex
    indices carrying positive barycentric weight.
    """

    simplex: Simplex
    removed: frozenset[frozenset[int]] = field(default_factory=frozenset)

    def __post_init__(self):
        removed = frozenset(frozenset(s) for s in self.removed)
        object.__setattr__(self, "removed", removed)
        full = frozenset(range(len(self.simplex.vertices)))
        for s in removed:
            if not s:
                raise ValueError("empty support cannot be removed")
            if not s <= full:
                raise ValueError(f"support {sorted(s)} uses unknown vertex indices")
            if s == full:
                raise ValueError("the relative interior must be kept")

    @classmethod
    def closed(cls, vertices: Sequence[Sequence[Fraction]]) -> PartialSimplex:
        return cls(Simplex(tuple(point(v) for v in vertices)))

    @property
    def vertices(self) -> tuple[Point, ...]:
        return self.simplex.vertices

    def contains(self, p: Sequence[Fraction]) -> bool:
        return in_partial_simplex(self, p)


def in_partial_simplex(t: PartialSimplex, p: Sequence[Fraction]) -> bool:
    lam = barycentric(t.simplex, p)
    return lam is not None and support(lam) not in t.removed


def all_supports(k: int) -> list[frozenset[int]]:
    """Every nonempty subset of range(k), smallest first."""
    out = []
    for size in range(1, k + 1):
        out.extend(frozenset(c) for c in combinations(range(k), size))
    return out

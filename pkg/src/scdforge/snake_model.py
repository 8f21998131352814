"""Swipes, snakes and geometric decompositions, with exact point location."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import AmbiguityError
from .exact_core import (
    Hyperplane,
    PartialSimplex,
    Point,
    barycentric,
    in_partial_simplex,
    point,
    rank,
    same_hyperplane,
    sub,
    support,
)
from .polytope import Polytope, is_full_dimensional, lattice_points, polytope_rank, to_point

REAL = "real"
FAKE = "fake"
EXACT = "exact"
ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class Swipe:
    """Segments in direction e_direction carrying `start` onto `end`."""

    direction: int
    start: PartialSimplex
    end: PartialSimplex
    start_cert: Hyperplane
    end_cert: Hyperplane

    def __post_init__(self):
        s, e, i = self.start.vertices, self.end.vertices, self.direction
        if len(s) != len(e):
            raise ValueError("start and end turning sets have different vertex counts")
        lengths = []
        for a, b in zip(s, e):
            d = sub(b, a)
            if any(d[j] != 0 for j in range(len(d)) if j != i) or d[i] < 0:
                raise ValueError(f"{a} -> {b} is not a nonnegative step along axis {i}")
            lengths.append(d[i])
        object.__setattr__(self, "_lengths", tuple(lengths))
        if self.start.removed != self.end.removed:
            raise ValueError("removed faces of start and end do not correspond")
        for v in s:
            if not self.start_cert.contains(v):
                raise ValueError(f"start certificate {self.start_cert} misses {v}")
        for v in e:
            if not self.end_cert.contains(v):
                raise ValueError(f"end certificate {self.end_cert} misses {v}")
        if not self.degenerate and (self.start_cert.coeffs[i] == 0 or self.end_cert.coeffs[i] == 0):
            raise ValueError("certificate parallel to the swipe direction")

    @property
    def lengths(self) -> tuple[Fraction, ...]:
        """Translation length of each start vertex."""
        return self._lengths

    @property
    def degenerate(self) -> bool:
        return all(c == 0 for c in self._lengths)


@dataclass(frozen=True)
class Snake:
    kind: str
    swipes: tuple[Swipe, ...]

    def __post_init__(self):
        object.__setattr__(self, "swipes", tuple(self.swipes))
        if self.kind not in (REAL, FAKE):
            raise ValueError(f"unknown snake kind {self.kind!r}")
        if not self.swipes:
            raise ValueError("a snake needs at least one swipe")
        for a, b in zip(self.swipes, self.swipes[1:]):
            if a.end != b.start:
                raise ValueError("consecutive swipes do not share their turning set")

    @property
    def turning_sets(self) -> list[PartialSimplex]:
        return [self.swipes[0].start] + [s.end for s in self.swipes]

    @property
    def directions(self) -> list[int]:
        return [s.direction for s in self.swipes]


@dataclass(frozen=True)
class GeoDecomposition:
    polytope: Polytope
    snakes: tuple[Snake, ...]
    mode: str = EXACT
    cover_m_override: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "snakes", tuple(self.snakes))
        if self.mode not in (EXACT, ASYMPTOTIC):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def dim(self) -> int:
        return self.polytope.dim


@dataclass(frozen=True)
class SwipePosition:
    foot: Point
    offset: Fraction
    length: Fraction


def swipe_locate(s: Swipe, p: Sequence[Fraction]) -> SwipePosition | None:
    """Position of p on its segment of the swipe, or None if p is outside."""
    p = point(p)
    i = s.direction
    a = s.start_cert.coeffs[i]
    if a == 0:
        return SwipePosition(p, Fraction(0), Fraction(0)) if in_partial_simplex(s.start, p) else None
    lam = s.start_cert.residual(p) / a
    if lam < 0:
        return None
    foot = p[:i] + (p[i] - lam,) + p[i + 1:]
    beta = barycentric(s.start.simplex, foot)
    if beta is None or support(beta) in s.start.removed:
        return None
    length = sum((b * c for b, c in zip(beta, s.lengths)), Fraction(0))
    if lam > length:
        return None
    return SwipePosition(foot, lam, length)


def in_swipe(s: Swipe, p: Sequence[Fraction]) -> bool:
    return swipe_locate(s, p) is not None


def is_halted(snake: Snake, i: int, p: Sequence[Fraction]) -> bool:
    """Whether p is an i-halted point of the snake."""
    sw = snake.swipes

    def on_both(k):
        return in_partial_simplex(sw[k].start, p) and in_partial_simplex(sw[k].end, p)

    first = all(on_both(k) for k in range(i)) and in_partial_simplex(sw[i].start, p)
    last = all(on_both(k) for k in range(i + 1, len(sw))) and in_partial_simplex(sw[i].end, p)
    return first or last


def snake_swipes(snake: Snake, p: Sequence[Fraction]) -> list[int]:
    """Indices of the swipes (T_i for fake snakes) that contain p."""
    p = point(p)
    out = []
    for i, s in enumerate(snake.swipes):
        if swipe_locate(s, p) is None:
            continue
        if snake.kind == FAKE and is_halted(snake, i, p):
            continue
        out.append(i)
    return out


def snake_locate(g: GeoDecomposition, p: Sequence[Fraction]) -> tuple[int, int] | None:
    """(snake, earliest swipe) owning p; raises AmbiguityError on overlap."""
    hits = []
    for idx, snake in enumerate(g.snakes):
        swipes = snake_swipes(snake, p)
        if swipes:
            hits.append((idx, swipes[0]))
    if len(hits) > 1:
        raise AmbiguityError(f"{tuple(p)} lies in snakes {[h[0] for h in hits]}")
    return hits[0] if hits else None


# --- validation ------------------------------------------------------------


@dataclass
class ValidationReport:
    structural: bool = True
    symmetric: bool = True
    partition: bool = True
    volume: bool | None = None
    missing_fraction: dict[int, Fraction] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.structural and self.symmetric and self.partition and self.volume is not False


def snake_is_symmetric(snake: Snake, target: Fraction) -> bool:
    first = snake.swipes[0].start.vertices
    last = snake.swipes[-1].end.vertices
    return all(rank(a) + rank(b) == target for a, b in zip(first, last))


def validate_geo(g: GeoDecomposition, sample_denoms: Sequence[int] = (1, 2, 3)) -> ValidationReport:
    rep = ValidationReport()
    target = polytope_rank(g.polytope)
    for idx, snake in enumerate(g.snakes):
        for a, b in zip(snake.swipes, snake.swipes[1:]):
            if not same_hyperplane(a.end_cert, b.start_cert) and not all(
                a.end_cert.contains(v) and b.start_cert.contains(v) for v in b.start.vertices
            ):
                rep.structural = False
                rep.messages.append(f"snake {idx}: certificates disagree on a shared turning set")
        for s in snake.swipes:
            for v in s.start.vertices + s.end.vertices:
                if not g.polytope.contains(v):
                    rep.structural = False
                    rep.messages.append(f"snake {idx}: turning-set vertex {v} outside the polytope")
        if not snake_is_symmetric(snake, target):
            rep.symmetric = False
            rep.messages.append(f"snake {idx} is not symmetric")
    for n in sample_denoms:
        pts = lattice_points(g.polytope, n)
        missing = 0
        for num in pts:
            p = to_point(num, n)
            try:
                hit = snake_locate(g, p)
            except AmbiguityError as exc:
                rep.partition = False
                rep.messages.append(f"n={n}: {exc}")
                continue
            if hit is None:
                missing += 1
        rep.missing_fraction[n] = Fraction(missing, len(pts)) if pts else Fraction(0)
        if missing and g.mode == EXACT:
            rep.partition = False
            rep.messages.append(f"n={n}: {missing} lattice points lie in no snake")
    if g.mode == EXACT and is_full_dimensional(g.polytope):
        from .volume_stats import swipe_volume_sides

        total, vol = swipe_volume_sides(g)
        rep.volume = total == vol
        if not rep.volume:
            rep.messages.append(f"snake volumes sum to {total}, polytope volume is {vol}")
    return rep

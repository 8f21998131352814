"""The poset P(n): chains, rank profiles and the chain decomposition verifier.

Lattice points are tuples of integer numerators; the denominator lives on
the enclosing :class:`ChainDecomposition`. Scaled ranks (n * rank) are plain
integers, so nothing in here needs fractions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .polytope import LatticePoint, Polytope, lattice_points, polytope_rank

CLOSED = "closed"
OPEN = "open"


@dataclass(frozen=True)
class DiscreteChain:
    points: tuple[LatticePoint, ...]
    kind: str = CLOSED

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(tuple(int(a) for a in p) for p in self.points))
        if self.kind not in (CLOSED, OPEN):
            raise ValueError(f"unknown chain kind {self.kind!r}")

    def __len__(self):
        return len(self.points)

    def point_set(self) -> frozenset[LatticePoint]:
        return frozenset(self.points)


@dataclass(frozen=True)
class ChainDecomposition:
    n: int
    chains: tuple[DiscreteChain, ...]
    polytope: Polytope | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "chains", tuple(self.chains))

    def partition(self) -> frozenset[frozenset[LatticePoint]]:
        """Chains as an unordered set of point sets (the equality used in tests)."""
        return frozenset(c.point_set() for c in self.chains)

    def restrict(self, d: int) -> ChainDecomposition:
        """Points with denominator dividing d, re-expressed over d."""
        if self.n % d:
            raise ValueError(f"{d} does not divide {self.n}")
        f = self.n // d
        chains = []
        for c in self.chains:
            pts = tuple(tuple(a // f for a in p) for p in c.points if all(a % f == 0 for a in p))
            if pts:
                chains.append(DiscreteChain(pts, c.kind))
        return ChainDecomposition(d, tuple(chains), self.polytope)


@dataclass(frozen=True)
class RankProfile:
    counts: dict[int, int]

    def as_tuple(self) -> tuple[int, ...]:
        if not self.counts:
            return ()
        lo, hi = min(self.counts), max(self.counts)
        return tuple(self.counts.get(r, 0) for r in range(lo, hi + 1))

    def total(self) -> int:
        return sum(self.counts.values())

    def width(self) -> int:
        return max(self.counts.values(), default=0)


@dataclass
class VerificationReport:
    covers: bool = True
    disjoint: bool = True
    all_saturated: bool = True
    all_symmetric: bool = True
    offending_point: LatticePoint | None = None
    offending_chain: int | None = None
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.covers and self.disjoint and self.all_saturated and self.all_symmetric


def scaled_rank(p: Sequence[int]) -> int:
    return sum(p)


def target_scaled_rank(P: Polytope, n: int) -> Fraction:
    return polytope_rank(P) * n


def is_saturated(c: DiscreteChain) -> bool:
    for a, b in zip(c.points, c.points[1:]):
        diff = [y - x for x, y in zip(a, b)]
        if sorted(diff) != [0] * (len(diff) - 1) + [1]:
            return False
    return True


def is_symmetric_chain(c: DiscreteChain, P: Polytope, n: int) -> bool:
    """Saturated, with first and last scaled ranks summing to n * rank(P)."""
    if not c.points:
        raise ValueError("empty chain")
    if not is_saturated(c):
        return False
    return scaled_rank(c.points[0]) + scaled_rank(c.points[-1]) == target_scaled_rank(P, n)


def rank_profile(P: Polytope, n: int) -> RankProfile:
    return RankProfile(dict(sorted(Counter(scaled_rank(p) for p in lattice_points(P, n)).items())))


def verify_scd(d: ChainDecomposition, P: Polytope | None = None, check_cover: bool = True) -> VerificationReport:
    """Check that d is a partition of P(n) into saturated symmetric chains.

    The offender recorded for each failing property is the lexicographically
    least point (or the chain holding it).
    """
    P = P if P is not None else d.polytope
    rep = VerificationReport()
    target = target_scaled_rank(P, d.n)
    seen: dict[LatticePoint, int] = {}
    bad_points: list[tuple[LatticePoint, int, str]] = []
    for idx, c in enumerate(d.chains):
        if not c.points:
            rep.all_saturated = False
            rep.messages.append(f"chain {idx} is empty")
            continue
        if not is_saturated(c):
            rep.all_saturated = False
            bad_points.append((min(c.points), idx, "not saturated"))
        elif scaled_rank(c.points[0]) + scaled_rank(c.points[-1]) != target:
            rep.all_symmetric = False
            bad_points.append((min(c.points), idx, "not symmetric"))
        for p in c.points:
            if p in seen:
                rep.disjoint = False
                bad_points.append((p, idx, f"also in chain {seen[p]}"))
            else:
                seen[p] = idx
    if check_cover:
        expected = set(lattice_points(P, d.n))
        missing = sorted(expected - seen.keys())
        extra = sorted(seen.keys() - expected)
        if missing:
            rep.covers = False
            bad_points.append((missing[0], None, "not covered"))
        if extra:
            rep.covers = False
            bad_points.append((extra[0], seen[extra[0]], "outside the polytope"))
    if bad_points:
        p, idx, why = min(bad_points, key=lambda t: t[0])
        rep.offending_point = p
        rep.offending_chain = idx
        rep.messages.append(f"{p}: {why}")
    return rep

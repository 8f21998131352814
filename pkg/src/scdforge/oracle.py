"""Brute-force cross-checks: Gaussian binomials, tiny SCD search, and a
second verifier that shares no code with the main one."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import ceil, floor

from .discrete_poset import ChainDecomposition, DiscreteChain
from .errors import BudgetExceeded, PreconditionError
from .polytope import Polytope, lattice_points


@lru_cache(maxsize=None)
def _gauss(a: int, b: int) -> tuple[int, ...]:
    if b < 0 or b > a:
        return ()
    if b == 0 or b == a:
        return (1,)
    left = _gauss(a - 1, b - 1)
    right = _gauss(a - 1, b)
    out = [0] * (b * (a - b) + 1)
    for i, c in enumerate(left):
        out[i] += c
    for i, c in enumerate(right):
        out[i + b] += c
    return tuple(out)


def q_binomial(m: int, n: int) -> tuple[int, ...]:
    """Coefficients of the Gaussian binomial [m+n choose m] in q."""
    if m < 0 or n < 0:
        raise ValueError("m and n must be nonnegative")
    return _gauss(m + n, m)


# --- independent enumeration ------------------------------------------------


def _box(P: Polytope) -> list[tuple[Fraction, Fraction]]:
    verts = [v for piece in P.convex_pieces() for v in piece.vertices] or list(P.vertices)
    return [(min(v[j] for v in verts), max(v[j] for v in verts)) for j in range(P.dim)]


def brute_points(P: Polytope, n: int) -> set[tuple[int, ...]]:
    """Numerators of P(n), by scanning the bounding box with exact membership."""
    ranges = []
    for lo, hi in _box(P):
        ranges.append(range(ceil(lo * n), floor(hi * n) + 1))
    out = set()
    for nums in product(*ranges):
        if P.contains(tuple(Fraction(x, n) for x in nums)):
            out.add(nums)
    return out


def brute_rank_profile(P: Polytope, n: int) -> tuple[int, ...]:
    counts = Counter(sum(p) for p in brute_points(P, n))
    lo, hi = min(counts), max(counts)
    return tuple(counts.get(r, 0) for r in range(lo, hi + 1))


def _target(P: Polytope, n: int) -> Fraction:
    verts = [v for piece in P.convex_pieces() for v in piece.vertices] or list(P.vertices)
    ranks = [sum(v, Fraction(0)) for v in verts]
    return (min(ranks) + max(ranks)) * n


# --- search -----------------------------------------------------------------


def search_scd(P: Polytope, n: int, budget: int = 100_000, cap: int = 60) -> ChainDecomposition | None:
    """Find a symmetric chain decomposition of P(n) by backtracking.

    The lowest uncovered point always starts its chain, so chains are grown
    upward from it to the mirrored rank. Returns None when the search space
    is exhausted; raises BudgetExceeded when the node budget runs out first.
    """
    pts = sorted(lattice_points(P, n), key=lambda p: (sum(p), p))
    if len(pts) > cap:
        raise PreconditionError(f"{len(pts)} points exceed the search cap {cap}")
    target = _target(P, n)
    if target.denominator != 1:
        return None
    target = int(target)
    members = set(pts)
    m = P.dim
    up = {p: [q for q in (tuple(x + (j == i) for j, x in enumerate(p)) for i in range(m)) if q in members]
          for p in pts}
    used: set = set()
    chains: list[tuple] = []
    nodes = 0

    def paths(p, length):
        if length == 0:
            yield (p,)
            return
        for q in up[p]:
            if q not in used:
                used.add(q)
                for rest in paths(q, length - 1):
                    yield (p,) + rest
                used.discard(q)

    def solve() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"search exceeded {budget} nodes")
        free = next((p for p in pts if p not in used), None)
        if free is None:
            return True
        length = target - 2 * sum(free)
        if length < 0:
            return False
        used.add(free)
        for chain in paths(free, length):
            used.update(chain)
            chains.append(chain)
            if solve():
                return True
            chains.pop()
            used.difference_update(chain[1:])
        used.discard(free)
        return False

    if not solve():
        return None
    return ChainDecomposition(n, tuple(DiscreteChain(c) for c in chains), P)


# --- independent verification -----------------------------------------------


def independent_verify(d: ChainDecomposition, P: Polytope | None = None, check_cover: bool = True) -> bool:
    """Second opinion on a chain decomposition, written without the main verifier.

    Checks pairwise disjointness by counting, unit steps between neighbours,
    the rank sum of each chain's ends, membership by exact scanning and,
    optionally, that every point of P(n) is used.
    """
    P = P if P is not None else d.polytope
    if P is None:
        raise PreconditionError("a polytope is needed to verify against")
    target = _target(P, d.n)
    flat = [p for c in d.chains for p in c.points]
    if any(len(c.points) == 0 for c in d.chains):
        return False
    if len(flat) != len(set(flat)):
        return False
    for c in d.chains:
        for a, b in zip(c.points, c.points[1:]):
            steps = [y - x for x, y in zip(a, b)]
            if steps.count(1) != 1 or steps.count(0) != len(steps) - 1:
                return False
        if sum(c.points[0]) + sum(c.points[-1]) != target:
            return False
    if check_cover:
        return set(flat) == brute_points(P, d.n)
    return all(P.contains(tuple(Fraction(x, d.n) for x in p)) for p in flat)

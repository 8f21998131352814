"""Strong and weak hyperplane conditions on turning sets, and the constants N and M."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm

from .errors import ConditionError, PreconditionError
from .exact_core import Hyperplane, PartialSimplex, nullspace
from .snake_model import GeoDecomposition


@dataclass(frozen=True)
class TurningContext:
    """A turning set with the swipe directions entering and leaving it.

    `pairs` restricts which (in, out) pairs the weak condition compares; by
    default every pair in dirs_in x dirs_out is compared.
    """

    turning_set: PartialSimplex
    dirs_in: frozenset[int]
    dirs_out: frozenset[int]
    certificate: Hyperplane
    pairs: frozenset[tuple[int, int]] | None = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "dirs_in", frozenset(self.dirs_in))
        object.__setattr__(self, "dirs_out", frozenset(self.dirs_out))
        if self.pairs is not None:
            object.__setattr__(self, "pairs", frozenset(self.pairs))

    def weak_pairs(self) -> frozenset[tuple[int, int]]:
        if self.pairs is not None:
            return self.pairs
        return frozenset(product(self.dirs_in, self.dirs_out))


@dataclass(frozen=True)
class ComplexityResult:
    satisfied: bool
    complexity: int | None
    witness: Hyperplane | None


def _require_contained(ctx: TurningContext):
    for v in ctx.turning_set.vertices:
        if not ctx.certificate.contains(v):
            raise PreconditionError(f"certificate {ctx.certificate} does not contain {v}")


def _strong_verdict(h: Hyperplane, axes) -> ComplexityResult:
    w = h.integer_scaled()
    if all(abs(w.coeffs[i]) == 1 for i in axes):
        return ComplexityResult(True, w.rhs.denominator, w)
    return ComplexityResult(False, None, None)


def check_strong(ctx: TurningContext, search_height: int | None = None) -> ComplexityResult:
    """Strong condition for the context's certificate.

    With `search_height`, a failing certificate triggers a search over integer
    combinations (entries bounded by the height) of a basis of hyperplanes
    through the turning set; the best complexity found is returned.
    """
    _require_contained(ctx)
    axes = ctx.dirs_in | ctx.dirs_out
    res = _strong_verdict(ctx.certificate, axes)
    if res.satisfied or not search_height:
        return res
    m = ctx.certificate.dim
    rows = [list(v) + [Fraction(-1)] for v in ctx.turning_set.vertices]
    basis = nullspace(rows, m + 1)
    best = res
    for combo in product(range(-search_height, search_height + 1), repeat=len(basis)):
        if not any(combo):
            continue
        v = [sum((c * b[j] for c, b in zip(combo, basis)), Fraction(0)) for j in range(m + 1)]
        if not any(v[:m]):
            continue
        cand = _strong_verdict(Hyperplane(tuple(v[:m]), v[m]), axes)
        if cand.satisfied and (not best.satisfied or cand.complexity < best.complexity):
            best = cand
    return best


def check_weak(ctx: TurningContext) -> bool:
    """Equal certificate coefficients on every paired in/out direction."""
    _require_contained(ctx)
    a = ctx.certificate.normalized().coeffs
    return all(a[i] == a[j] for i, j in ctx.weak_pairs())


def turning_contexts(g: GeoDecomposition) -> list[TurningContext]:
    """One context per turning set of every snake, read off the swipe sequence."""
    out = []
    for si, snake in enumerate(g.snakes):
        sw = snake.swipes
        tag = "R" if snake.kind == "real" else "F"
        for k in range(len(sw) + 1):
            dirs_in = {sw[k - 1].direction} if k > 0 else set()
            dirs_out = {sw[k].direction} if k < len(sw) else set()
            cert = sw[k].start_cert if k < len(sw) else sw[k - 1].end_cert
            ts = sw[k].start if k < len(sw) else sw[k - 1].end
            degenerate_in = k > 0 and sw[k - 1].degenerate
            degenerate_out = k < len(sw) and sw[k].degenerate
            if degenerate_in:
                dirs_in = set()
            if degenerate_out:
                dirs_out = set()
            out.append(TurningContext(ts, frozenset(dirs_in), frozenset(dirs_out), cert, label=f"{si}:{tag}{k}"))
    return out


def decomposition_n(g: GeoDecomposition) -> int:
    """Least common multiple of the turning-set complexities."""
    n = 1
    for ctx in turning_contexts(g):
        res = check_strong(ctx)
        if not res.satisfied:
            raise ConditionError(f"strong condition fails at turning set {ctx.label} ({ctx.certificate})")
        n = lcm(n, res.complexity)
    return n


def cover_m(g: GeoDecomposition, use_override: bool = True) -> int:
    """Denominator multiplier for covering chains.

    Each swipe contributes |a * a'|, the swipe-axis coefficients of its
    integer-scaled start and end certificates, times the right-hand side
    denominators (1 for every catalog certificate). A chain only walks one
    snake, so the per-snake products are combined by lcm.
    """
    if use_override and g.cover_m_override is not None:
        return g.cover_m_override
    m = 1
    for snake in g.snakes:
        per_snake = 1
        for s in snake.swipes:
            if s.degenerate:
                continue
            a_start = s.start_cert.integer_scaled()
            a_end = s.end_cert.integer_scaled()
            i = s.direction
            if a_start.coeffs[i] == 0 or a_end.coeffs[i] == 0:
                raise PreconditionError("certificate has zero coefficient on the swipe direction")
            factor = abs(a_start.coeffs[i] * a_end.coeffs[i])
            factor *= lcm(a_start.rhs.denominator, a_end.rhs.denominator)
            per_snake *= int(factor)
        m = lcm(m, per_snake)
    return m

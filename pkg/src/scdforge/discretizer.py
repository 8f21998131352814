"""From a geometric decomposition to chain decompositions of P(n).

Three engines:

* ``decompose``: restrict the continuous chains to P(n). Every lattice point
  is located in its snake and walked back to the start of its chain; points
  with the same start form one chain.
* ``cover``: walk the continuous chain through each point of P(k) at the
  finer denominator kM and keep the lattice points on it.
* ``asymptotic``: the stepping construction for decompositions that only
  satisfy the weak condition, followed by discarding and trimming.

Location and stepping work on whole arrays of integer numerators: every test
involved (certificate residuals, barycentric coordinates of feet, segment
lengths) is an affine form in the point, so it becomes one integer matrix
product per swipe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .discrete_poset import CLOSED, OPEN, ChainDecomposition, DiscreteChain
from .errors import AmbiguityError, DenominatorError, NotInSnake, PreconditionError
from .exact_core import PartialSimplex, Point, barycentric, point
from .hyperplane_conditions import cover_m, decomposition_n
from .polytope import IntForms, lattice_array, polytope_rank, to_numerators, to_point
from .snake_model import EXACT, FAKE, REAL, GeoDecomposition, Snake, Swipe, snake_locate, swipe_locate

Form = tuple[tuple[Fraction, ...], Fraction]


# --- vectorised membership ---------------------------------------------------


def _shift_form(f: Form, h_coeffs, h_rhs, i: int, a: Fraction) -> Form:
    """f(foot) as a form in p, where foot = p - (h(p) - rhs) / a * e_i."""
    coeffs, const = f
    t = coeffs[i] / a
    return (tuple(c - t * hc for c, hc in zip(coeffs, h_coeffs)), const + t * h_rhs)


class _SimplexForms:
    """Barycentric and span-equality forms of a partial simplex."""

    def __init__(self, ps: PartialSimplex, shift=None):
        lams, eqs = ps.simplex.affine_functionals()
        if shift is not None:
            lams = [_shift_form(f, *shift) for f in lams]
            eqs = [_shift_form(f, *shift) for f in eqs]
        self.k = len(lams)
        self.lams = IntForms(lams)
        self.eqs = IntForms(eqs)
        self.removed = np.array(sorted(sum(1 << j for j in s) for s in ps.removed), dtype=np.int64)

    def member(self, X: np.ndarray, n: int) -> np.ndarray:
        L = self.lams.evaluate(X, n)
        ok = np.all(L >= 0, axis=1)
        if len(self.eqs):
            ok &= np.all(self.eqs.evaluate(X, n) == 0, axis=1)
        if len(self.removed):
            bits = ((L > 0).astype(np.int64) * (1 << np.arange(self.k, dtype=np.int64))).sum(axis=1)
            ok &= ~np.isin(bits, self.removed)
        return ok


class _SwipeForms:
    def __init__(self, s: Swipe):
        i = s.direction
        self.direction = i
        self.swipe = s
        h = s.start_cert
        self.a = h.coeffs[i]
        self.start_resid = IntForms([(h.coeffs, -h.rhs)])
        self.start_scale = int(self.start_resid.A[0][i])  # n * lambda = resid_int / start_scale
        e = s.end_cert
        self.end_resid = IntForms([(e.coeffs, -e.rhs)])
        self.end_sign = 1 if e.coeffs[i] > 0 else -1
        if self.a == 0:
            self.foot = None
            self.start = _SimplexForms(s.start)
            return
        shift = (h.coeffs, h.rhs, i, self.a)
        self.foot = _SimplexForms(s.start, shift)
        # lambda - sum_j c_j beta_j(foot) <= 0, as a form in p
        lams, _ = s.start.simplex.affine_functionals()
        lams = [_shift_form(f, *shift) for f in lams]
        m = len(h.coeffs)
        coeffs = [c / self.a for c in h.coeffs]
        const = -h.rhs / self.a
        for c_j, (lc, lk) in zip(s.lengths, lams):
            coeffs = [x - c_j * y for x, y in zip(coeffs, lc)]
            const -= c_j * lk
        self.excess = IntForms([(tuple(coeffs), const)])
        self.m = m

    def member(self, X: np.ndarray, n: int) -> np.ndarray:
        if self.foot is None:
            return self.start.member(X, n)
        R = self.start_resid.evaluate(X, n)[:, 0]
        ok = R * (1 if self.a > 0 else -1) >= 0
        ok &= self.excess.evaluate(X, n)[:, 0] <= 0
        ok &= self.foot.member(X, n)
        return ok

    def step_back(self, X: np.ndarray, n: int) -> np.ndarray:
        """Feet on the starting set; raises if a foot leaves (1/n)Z^m."""
        Y = X.copy()
        if self.foot is None or len(X) == 0:
            return Y
        R = self.start_resid.evaluate(X, n)[:, 0]
        q = self.start_scale
        if np.any(R % q != 0):
            bad = X[np.nonzero(R % q != 0)[0][0]]
            raise DenominatorError(f"walking back from {tuple(int(v) for v in bad)}/{n} leaves denominator {n}")
        Y[:, self.direction] -= (R // q).astype(Y.dtype)
        return Y


@lru_cache(maxsize=256)
def _swipe_forms(s: Swipe) -> _SwipeForms:
    return _SwipeForms(s)


@lru_cache(maxsize=256)
def _ps_forms(ps: PartialSimplex) -> _SimplexForms:
    return _SimplexForms(ps)


def _snake_hits(snake: Snake, X: np.ndarray, n: int) -> np.ndarray:
    """Boolean matrix (points x swipes): membership in S_i, or T_i for fake snakes."""
    sw = snake.swipes
    hits = np.stack([_swipe_forms(s).member(X, n) for s in sw], axis=1)
    if snake.kind != FAKE or not hits.any():
        return hits
    starts = [_ps_forms(s.start).member(X, n) for s in sw]
    ends = [_ps_forms(s.end).member(X, n) for s in sw]
    both = [a & b for a, b in zip(starts, ends)]
    k = len(sw)
    prefix = [np.ones(len(X), dtype=bool)]
    for j in range(k):
        prefix.append(prefix[-1] & both[j])
    suffix = [np.ones(len(X), dtype=bool)] * (k + 1)
    for j in range(k - 1, -1, -1):
        suffix[j] = suffix[j + 1] & both[j]
    for i in range(k):
        halted = (prefix[i] & starts[i]) | (suffix[i + 1] & ends[i])
        hits[:, i] &= ~halted
    return hits


def locate_array(g: GeoDecomposition, X: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(snake index, earliest swipe) per row, -1 where no snake claims the point."""
    snake_idx = np.full(len(X), -1, dtype=np.int64)
    swipe_idx = np.full(len(X), -1, dtype=np.int64)
    for si, snake in enumerate(g.snakes):
        hits = _snake_hits(snake, X, n)
        any_hit = hits.any(axis=1)
        clash = any_hit & (snake_idx >= 0)
        if clash.any():
            j = int(np.nonzero(clash)[0][0])
            p = tuple(Fraction(int(v), n) for v in X[j])
            raise AmbiguityError(f"{p} lies in snakes {int(snake_idx[j])} and {si}")
        snake_idx[any_hit] = si
        swipe_idx[any_hit] = np.argmax(hits[any_hit], axis=1)
    return snake_idx, swipe_idx


def _kind(snake: Snake) -> str:
    return CLOSED if snake.kind == REAL else OPEN


def _group_chains(keys: np.ndarray, X: np.ndarray, kinds: Sequence[str], snake_col: np.ndarray) -> list[DiscreteChain]:
    """Split rows of X into chains by equal key rows; chains ordered by key."""
    if len(X) == 0:
        return []
    ranks = X.sum(axis=1)
    order = np.lexsort(tuple([ranks] + [keys[:, j] for j in range(keys.shape[1] - 1, -1, -1)]))
    K = keys[order]
    Xs = X[order]
    cuts = np.nonzero(np.any(K[1:] != K[:-1], axis=1))[0] + 1
    chains = []
    for block, snake in zip(np.split(Xs, cuts), np.split(snake_col[order], cuts)):
        chains.append(DiscreteChain(tuple(tuple(int(v) for v in row) for row in block), kinds[int(snake[0])]))
    return chains


# --- exact discretization ----------------------------------------------------


def walk_to_start(g: GeoDecomposition, X: np.ndarray, n: int, snake_idx: np.ndarray, swipe_idx: np.ndarray) -> np.ndarray:
    """Start point of the chain through each row (numerators over n)."""
    F0 = X.copy()
    for si, snake in enumerate(g.snakes):
        rows = snake_idx == si
        for k in range(len(snake.swipes) - 1, -1, -1):
            active = rows & (swipe_idx >= k)
            if active.any():
                F0[active] = _swipe_forms(snake.swipes[k]).step_back(F0[active], n)
    return F0


def decompose(g: GeoDecomposition, n: int) -> ChainDecomposition:
    """Symmetric chain decomposition of P(n) induced by an exact decomposition."""
    if g.mode != EXACT:
        raise PreconditionError("decompose needs an exact decomposition")
    if n < 1:
        raise PreconditionError("n must be positive")
    N = decomposition_n(g)
    if n % N:
        raise PreconditionError(f"n={n} is not a multiple of the decomposition constant {N}")
    X = lattice_array(g.polytope, n)
    snake_idx, swipe_idx = locate_array(g, X, n)
    if np.any(snake_idx < 0):
        j = int(np.nonzero(snake_idx < 0)[0][0])
        raise NotInSnake(f"{to_point(X[j], n)} lies in no snake")
    F0 = walk_to_start(g, X, n, snake_idx, swipe_idx)
    keys = np.concatenate([snake_idx[:, None], F0], axis=1)
    kinds = [_kind(s) for s in g.snakes]
    return ChainDecomposition(n, tuple(_group_chains(keys, X, kinds, snake_idx)), g.polytope)


# --- covering chains ----------------------------------------------------------


@dataclass(frozen=True)
class WalkState:
    current: Point
    snake: int
    swipe: int
    direction: str  # "forward" or "backward"


def _foot(s: Swipe, p: Point) -> tuple[Point, Fraction]:
    pos = swipe_locate(s, p)
    if pos is None:
        raise NotInSnake(f"{p} is not in the swipe")
    return pos.foot, pos.length - pos.offset


def chain_through(g: GeoDecomposition, p: Sequence[Fraction]) -> tuple[int, list[Point]]:
    """Snake index and turning points (start, ..., end) of the continuous chain through p."""
    p = point(p)
    hit = snake_locate(g, p)
    if hit is None:
        raise NotInSnake(f"{p} lies in no snake")
    si, k = hit
    sw = g.snakes[si].swipes
    back = []
    q = p
    for j in range(k, -1, -1):
        q, _ = _foot(sw[j], q)
        back.append(q)
    forward = []
    q = p
    for j in range(k, len(sw)):
        _, rest = _foot(sw[j], q)
        i = sw[j].direction
        q = q[:i] + (q[i] + rest,) + q[i + 1:]
        forward.append(q)
    return si, back[::-1] + forward


def _segment_points(a: Point, b: Point, N: int) -> list[tuple[int, ...]]:
    na, nb = to_numerators(a, N), to_numerators(b, N)
    diff = [j for j in range(len(na)) if na[j] != nb[j]]
    if not diff:
        return [na]
    (i,) = diff
    return [na[:i] + (v,) + na[i + 1:] for v in range(na[i], nb[i] + 1)]


def cover(g: GeoDecomposition, k: int, M: int | None = None) -> ChainDecomposition:
    """Disjoint symmetric chains of P(kM) covering P(k)."""
    if k < 1:
        raise PreconditionError("k must be positive")
    M = cover_m(g) if M is None else M
    N = k * M
    chains: dict[tuple, DiscreteChain] = {}
    for row in lattice_array(g.polytope, k):
        p = to_point(row, k)
        si, turns = chain_through(g, p)
        key = (si, turns[0])
        if key in chains:
            continue
        for t in turns:
            if to_numerators(t, N) is None:
                raise DenominatorError(f"turning point {t} of the chain through {p} is not in (1/{N})Z")
        pts: list[tuple[int, ...]] = []
        for a, b in zip(turns, turns[1:]):
            seg = _segment_points(a, b, N)
            pts.extend(seg if not pts else seg[1:])
        if not pts:
            pts = [to_numerators(turns[0], N)]
        kind = _kind(g.snakes[si])
        if kind == OPEN:
            pts = pts[1:-1]
        if pts:
            chains[key] = DiscreteChain(tuple(pts), kind)
    ordered = [chains[key] for key in sorted(chains, key=lambda t: (t[0], t[1]))]
    return ChainDecomposition(N, tuple(ordered), g.polytope)


@dataclass
class CoverReport:
    disjoint: bool
    symmetric: bool
    saturated: bool
    covers_coarse: bool
    denominators_ok: bool
    messages: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.disjoint and self.symmetric and self.saturated and self.covers_coarse and self.denominators_ok


def verify_cover(d: ChainDecomposition, k: int) -> CoverReport:
    """Disjoint, saturated, symmetric in P(N), and containing every point of P(k)."""
    from .discrete_poset import is_saturated, scaled_rank

    P = d.polytope
    N = d.n
    rep = CoverReport(True, True, True, True, N % k == 0)
    target = polytope_rank(P) * N
    seen = set()
    for idx, c in enumerate(d.chains):
        if not is_saturated(c):
            rep.saturated = False
            rep.messages.append(f"chain {idx} is not saturated")
        if scaled_rank(c.points[0]) + scaled_rank(c.points[-1]) != target:
            rep.symmetric = False
            rep.messages.append(f"chain {idx} is not symmetric")
        for p in c.points:
            if p in seen:
                rep.disjoint = False
                rep.messages.append(f"{p} lies in two chains")
            seen.add(p)
            if not P.contains(to_point(p, N)):
                rep.disjoint = False
                rep.messages.append(f"{p} is outside the polytope")
    if rep.denominators_ok:
        f = N // k
        for row in lattice_array(P, k):
            if tuple(int(v) * f for v in row) not in seen:
                rep.covers_coarse = False
                rep.messages.append(f"{tuple(int(v) for v in row)}/{k} is not covered")
                break
    else:
        rep.messages.append(f"{k} does not divide {N}")
    return rep


# --- asymptotic construction --------------------------------------------------


@dataclass
class AsymptoticReport:
    kept: ChainDecomposition
    discarded_points: int
    trimmed_points: int
    total_points: int
    trim_cap: int
    outside_points: int = 0
    overlap_points: int = 0

    @property
    def loss(self) -> int:
        return self.discarded_points + self.trimmed_points

    @property
    def loss_fraction(self) -> Fraction:
        return Fraction(self.loss, self.total_points) if self.total_points else Fraction(0)


class _Index:
    """Row lookup for integer points by a mixed-radix key."""

    def __init__(self, X: np.ndarray):
        self.lo = X.min(axis=0) - 1
        span = X.max(axis=0) - self.lo + 2
        self.radix = np.cumprod(np.concatenate([[1], span[::-1][:-1]]))[::-1].astype(np.int64)
        keys = self.key(X)
        self.order = np.argsort(keys, kind="stable")
        self.sorted = keys[self.order]

    def key(self, X: np.ndarray) -> np.ndarray:
        return ((X - self.lo) * self.radix).sum(axis=1)

    def find(self, X: np.ndarray) -> np.ndarray:
        keys = self.key(X)
        pos = np.searchsorted(self.sorted, keys)
        pos = np.minimum(pos, len(self.sorted) - 1)
        found = self.sorted[pos] == keys
        out = np.where(found, self.order[pos], -1)
        return out


def _step_all(g: GeoDecomposition, X: np.ndarray, n: int, snake_idx, swipe_idx, start: np.ndarray, record: bool):
    """Run the stepping construction from the rows `start` at once.

    Returns (reached, paths, final_swipe): reached marks rows visited after
    the first step of some walk; paths (when `record`) maps each start row to
    the visited rows; final_swipe is the swipe each walk stops in.
    """
    index = _Index(X)
    total = len(X)
    reached = np.zeros(total, dtype=bool)
    cur = X[start].copy()
    own = start.copy()
    snake = snake_idx[start].copy()
    swipe = swipe_idx[start].copy()
    paths = {int(r): [int(r)] for r in start} if record else None
    final_swipe = np.full(total, -1, dtype=np.int64)
    while len(own):
        nxt = cur.copy()
        move = np.zeros(len(own), dtype=bool)
        new_swipe = swipe.copy()
        for si, sn in enumerate(g.snakes):
            for j, s in enumerate(sn.swipes):
                sel = (snake == si) & (swipe == j)
                if not sel.any():
                    continue
                sf = _swipe_forms(s)
                Q = cur[sel].copy()
                Q[:, sf.direction] += 1
                R = sf.end_resid.evaluate(Q, n)[:, 0] * sf.end_sign
                hits = _snake_hits(sn, Q, n)
                # stay while inside the swipe and not strictly past its end;
                # once strictly past, go on only inside the next swipe
                ok = (R <= 0) & hits[:, j]
                if j + 1 < len(sn.swipes):
                    turn = (R > 0) & hits[:, j + 1]
                    ok |= turn
                    sub = np.nonzero(sel)[0]
                    new_swipe[sub[turn]] = j + 1
                nxt[sel] = Q
                move[np.nonzero(sel)[0][ok]] = True
        done = ~move
        final_swipe[own[done]] = swipe[done]
        own, cur, snake, swipe = own[move], nxt[move], snake[move], new_swipe[move]
        if not len(own):
            break
        rows = index.find(cur)
        if np.any(rows < 0):
            bad = cur[np.nonzero(rows < 0)[0][0]]
            raise NotInSnake(f"stepping left the polytope at {to_point(bad, n)}")
        reached[rows] = True
        if record:
            for o, r in zip(own.tolist(), rows.tolist()):
                paths[o].append(r)
    return reached, paths, final_swipe


def asymptotic(g: GeoDecomposition, k: int, trim_cap: int | None = None) -> AsymptoticReport:
    """Chains of P(k) from the stepping construction, discarded and trimmed."""
    if k < 1:
        raise PreconditionError("k must be positive")
    X = lattice_array(g.polytope, k)
    total = len(X)
    snake_idx, swipe_idx = locate_array(g, X, k)
    in_snake = np.nonzero(snake_idx >= 0)[0]
    reached, _, _ = _step_all(g, X, k, snake_idx, swipe_idx, in_snake, record=False)
    sel = np.nonzero((snake_idx >= 0) & ~reached)[0]
    _, paths, final_swipe = _step_all(g, X, k, snake_idx, swipe_idx, sel, record=True)
    target = int(polytope_rank(g.polytope) * k) if (polytope_rank(g.polytope) * k).denominator == 1 else None
    cap = trim_cap if trim_cap is not None else 4 * max(len(s.swipes) for s in g.snakes)

    used = np.zeros(total, dtype=bool)
    outside = int((snake_idx < 0).sum())
    discarded = outside
    trimmed = 0
    overlap = 0
    kept = []
    ranks = X.sum(axis=1)
    for row in sel.tolist():
        rows = paths[row]
        if used[rows].any():
            overlap += len(rows)
            discarded += int((~used[rows]).sum())
            used[rows] = True
            continue
        used[rows] = True
        sn = g.snakes[int(snake_idx[row])]
        if swipe_idx[row] != 0 or final_swipe[row] != len(sn.swipes) - 1 or target is None:
            discarded += len(rows)
            continue
        excess = int(ranks[rows[0]] + ranks[rows[-1]]) - target
        if abs(excess) > cap or abs(excess) >= len(rows):
            discarded += len(rows)
            continue
        if excess > 0:
            keep = rows[: len(rows) - excess]
        elif excess < 0:
            keep = rows[-excess:]
        else:
            keep = rows
        trimmed += len(rows) - len(keep)
        kept.append(DiscreteChain(tuple(tuple(int(v) for v in X[r]) for r in keep), _kind(sn)))
    discarded += int((~used & (snake_idx >= 0)).sum())
    return AsymptoticReport(ChainDecomposition(k, tuple(kept), g.polytope), discarded, trimmed, total, cap,
                            outside, overlap)

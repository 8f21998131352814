"""Built-in decompositions.

Each order-simplex entry starts life as a decomposition of a two-dimensional
projected polytope (a union of triangles, or of segments for L(2)), given by
the sequence of turning sets of one real and one fake snake. Coning off at
the listed apexes, in order, lifts it to the full polytope. The coned results
are frozen in ``data/catalog.json``; ``build_coned`` regenerates them and the
test-suite checks that the two agree.

Removed faces: real snakes keep every face. On the projected polytope both
snakes share their two boundary chains (the vertex path 0-1-...-m and the
midpoint path), so fake turning segments drop both endpoints; coning lifts
that rule. The apex faces belong to the real snake.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction as F
from functools import lru_cache
from importlib import resources
from typing import Sequence

from .constructions import ConeSpec, cone_off
from .errors import PreconditionError
from .exact_core import Hyperplane, PartialSimplex, Point, Simplex, point, rat
from .hyperplane_conditions import TurningContext
from .polytope import Constraint, Polytope, order_simplex, simplex_polytope, union, weighted_order_simplex
from .snake_model import EXACT, ASYMPTOTIC, FAKE, REAL, GeoDecomposition, Snake, Swipe

IDS = ("L2", "L3", "L4a", "L4b", "L5", "Pt", "projL2", "projL3", "projL4a", "projL4b", "projL5",
       "squareBoundary", "segment")
CONED = ("L2", "L3", "L4a", "L4b", "L5")


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    polytope: Polytope
    decomposition: GeoDecomposition
    certificates: tuple[TurningContext, ...]
    provenance: str
    overrides: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Row:
    coeffs: tuple
    rhs: object
    real: tuple[int, ...] = ()
    fake: tuple[int, ...] = ()


@dataclass(frozen=True)
class _Projected:
    dim: int
    vertices: dict
    faces: tuple[str, ...]
    real: tuple[str, ...]
    fake: tuple[str, ...]
    apexes: tuple[Point, ...]
    rows: tuple[_Row, ...]
    target: Polytope
    ratio: F = F(1)  # a point "mij" sits at (ratio*i + j) / (ratio + 1)
    description: str = ""
    cover_m: int | None = None

    def point(self, label: str) -> Point:
        if label in self.vertices:
            return point(self.vertices[label])
        if label.startswith("m") and len(label) == 3:
            a, b = point(self.vertices[label[1]]), point(self.vertices[label[2]])
            r = self.ratio
            return tuple((r * x + y) / (r + 1) for x, y in zip(a, b))
        raise KeyError(label)


def _unit_chain(m: int) -> dict:
    return {str(i): tuple(int(j >= m - i) for j in range(m)) for i in range(m + 1)}


def _projected(name: str, t: F | None = None) -> _Projected:
    half = F(1, 2)
    if name == "L2":
        return _Projected(
            2, _unit_chain(2), ("01", "12"), ("0", "1", "2"), (), ((half, half),),
            (_Row((1, -1), 0, (0,)), _Row((1, 1), 1, (1,)), _Row((1, -1), 0, (2,))),
            order_simplex(2), description="order simplex L(2), coned from the edges 01 and 12",
        )
    if name == "L3":
        return _Projected(
            3, _unit_chain(3), ("012", "013", "023", "123"),
            ("0 m02", "0 m03", "1 m13", "2 m13", "3 m13"),
            ("0 m02", "1 m02", "2 m02", "3 m03", "3 m13"),
            ((F(1, 4), half, F(3, 4)),),
            (
                _Row((1, 1, -1), 0, (), (0,)),
                _Row((-1, 1, 1), 1, (), (1,)),
                _Row((1, 1, -1), 0, (0,), (2,)),
                _Row((1, -2, 1), 0, (1,), (3,)),
                _Row((-1, 1, 1), 1, (2,), (4,)),
                _Row((1, 1, -1), 0, (3,), ()),
                _Row((-1, 1, 1), 1, (4,), ()),
            ),
            order_simplex(3), description="order simplex L(3), coned from its boundary at the barycenter",
        )
    if name == "L4a":
        return _l4_family(F(1))
    if name == "Pt":
        return _l4_family(t)
    if name == "L4b":
        return _Projected(
            4, _unit_chain(4), ("012", "014", "124", "023", "034", "234"),
            ("0 m02", "0 m03", "0 m04", "1 m14", "2 m24", "3 m24", "4 m24"),
            ("0 m02", "1 m02", "2 m02", "3 m03", "4 m04", "4 m14", "4 m24"),
            ((F(1, 3), F(1, 3), F(2, 3), F(2, 3)), (0, half, half, 1)),
            (
                _Row((-1, 1, 1, -1), 0, (0, 2, 4, 6), (0, 2, 4, 6)),
                _Row((0, -1, 1, 1), 1, (3,), (1, 5)),
                _Row((1, 1, -1, 0), 0, (1, 5), (3,)),
            ),
            order_simplex(4),
            description="order simplex L(4), second decomposition (apexes on the face 024 and the edge 13)",
        )
    if name == "L5":
        return _Projected(
            5, _unit_chain(5), ("012", "023", "034", "014", "125", "235", "345", "145"),
            ("0 m02", "0 m03", "0 m04", "1 m14", "1 m15", "2 m25", "3 m35", "4 m35", "5 m35"),
            ("0 m02", "1 m02", "2 m02", "3 m03", "4 m04", "4 m14", "5 m15", "5 m25", "5 m35"),
            tuple(l5_projection_points()[i] for i in (2, 1, 0)),
            (
                _Row((0, 1, -1, -3, 3), 0, (0, 2, 5), (0, 2, 4, 7)),
                _Row((4, -3, -1, 1, 1), 1, (), (1,)),
                _Row((3, -3, -1, 1, 0), 0, (1, 4, 6, 8), (3, 6, 8)),
                _Row((1, 0, 0, 0, 1), 1, (3,), (5,)),
                _Row((1, 1, -1, -3, 4), 1, (7,), ()),
            ),
            order_simplex(5), cover_m=27,
            description="order simplex L(5), coned at three middle-rank points on the edges 24, 13, 05",
        )
    raise KeyError(name)


def _l4_family(t: F) -> _Projected:
    """L(4)_{1,1/t,t,1} with the cap conv(B'1234) removed; t = 1 is L(4)."""
    t = F(t)
    verts, b, bp = _pt_geometry(t)
    d = t * t * (t + 1)
    rows = (
        _Row((1 / t, -1, -1, t), 0, (0, 4, 6), (0, 2, 6)),
        _Row(((t**3 + 2 * t**2 + 1) / d, -(t**5 + t**4 + t**3 + t) / d, 1, 1), 1, (), (1,)),
        _Row((0, 1, -(t + 1) / t**2, 1), 0, (1,), (3,)),
        _Row((1, (1 - t**3) / (1 + t), -(1 - t**3) / (t**2 * (1 + t)), 1), 1, (2,), (4,)),
        _Row((1, -t * (1 + t), 1, 0), 0, (3,), (5,)),
        _Row((1, 1, -(t**4 + t**2 + t + 1) / d, (t**3 + 2 * t + 1) / (t + 1)), 1, (5,), ()),
    )
    if t == 1:
        target = order_simplex(4)
        desc = "order simplex L(4), coned at the barycenter of 123 and the midpoint of 04"
    else:
        target = pt_polytope(t)
        desc = f"stretched order simplex L(4)_(1,1/t,t,1) minus conv(B'1234), t={t}"
    return _Projected(
        4, verts, ("012", "013", "023", "124", "134", "234"),
        ("0 m02", "0 m03", "1 m13", "1 m14", "2 m24", "3 m24", "4 m24"),
        ("0 m02", "1 m02", "2 m02", "3 m03", "3 m13", "4 m14", "4 m24"),
        (bp, b), rows, target, ratio=t, description=desc,
    )


def _pt_geometry(t: F):
    verts = {"0": (0, 0, 0, 0), "1": (0, 0, 0, 1), "2": (0, 0, t, 1), "3": (0, 1 / t, t, 1), "4": (1, 1 / t, t, 1)}
    b = (F(1, 2), 1 / (2 * t), t / 2, F(1, 2))
    s = t * t + t + 1
    bp = (F(0), (t + 1) / (2 * s), t * (t + 1) ** 2 / (2 * s), (t + 1) / (2 * t))
    return verts, b, bp


def pt_points(t) -> dict[str, Point]:
    """Vertices 0..4 and the apexes B, B' of the stretched family."""
    verts, b, bp = _pt_geometry(rat(t))
    out = {k: point(v) for k, v in verts.items()}
    out["B'"], out["B"] = point(bp), point(b)
    return out


def weighted_l4(a, b, c, d) -> Polytope:
    return weighted_order_simplex((rat(a), rat(b), rat(c), rat(d)))


def pt_polytope(t) -> Polytope:
    """closure(L(4)_t minus conv(B'1234)) as the union of three simplices."""
    t = rat(t)
    pts = pt_points(t)
    if t == 1:
        return order_simplex(4)
    bp = pts["B'"]
    return union([simplex_polytope([bp] + [pts[c] for c in face]) for face in ("0234", "0134", "0124")])


def l5_projection_points() -> list[Point]:
    """Middle-rank points on the edges 05, 13 and 24 of L(5)."""
    h = F(1, 2)
    return [
        (h, h, h, h, h),
        (F(0), F(0), F(3, 4), F(3, 4), F(1)),
        (F(0), F(1, 4), F(1, 4), F(1), F(1)),
    ]


# --- assembling decompositions ---------------------------------------------


def _direction(a: Sequence[Point], b: Sequence[Point]) -> int:
    axes = set()
    for p, q in zip(a, b):
        diff = [j for j in range(len(p)) if p[j] != q[j]]
        if len(diff) > 1 or any(q[j] < p[j] for j in diff):
            raise ValueError(f"{p} -> {q} is not an axis step")
        axes.update(diff)
    if len(axes) != 1:
        raise ValueError(f"swipe direction is not unique: {sorted(axes)}")
    return axes.pop()


def _hyperplane(row: _Row) -> Hyperplane:
    return Hyperplane(point(row.coeffs), rat(row.rhs)).integer_scaled()


def _certificate_map(proj: _Projected) -> dict[tuple[str, int], Hyperplane]:
    certs = {}
    for row in proj.rows:
        h = _hyperplane(row)
        for i in row.real:
            certs[(REAL, i)] = h
        for i in row.fake:
            certs[(FAKE, i)] = h
    return certs


def _projected_decomposition(proj: _Projected) -> GeoDecomposition:
    faces = [simplex_polytope([proj.point(c) for c in face]) for face in proj.faces]
    certs = _certificate_map(proj)
    snakes = []
    for kind, seq in ((REAL, proj.real), (FAKE, proj.fake)):
        if not seq:
            continue
        sets = [tuple(proj.point(lab) for lab in label.split()) for label in seq]
        removed = frozenset()
        if kind == FAKE:
            removed = frozenset(frozenset({j}) for j in range(len(sets[0])))
        swipes = []
        for k in range(len(sets) - 1):
            swipes.append(Swipe(
                _direction(sets[k], sets[k + 1]),
                PartialSimplex(Simplex(sets[k]), removed),
                PartialSimplex(Simplex(sets[k + 1]), removed),
                certs[(kind, k)],
                certs[(kind, k + 1)],
            ))
        snakes.append(Snake(kind, tuple(swipes)))
    return GeoDecomposition(union(faces), tuple(snakes), EXACT, proj.cover_m)


def _cone_all(proj: _Projected, base: GeoDecomposition) -> GeoDecomposition:
    g = base
    for i, apex in enumerate(proj.apexes):
        last = i == len(proj.apexes) - 1
        g = cone_off(ConeSpec(apex, g, target=proj.target if last else None))
    return g


def _contexts(proj: _Projected, g: GeoDecomposition) -> tuple[TurningContext, ...]:
    kinds = {s.kind: s for s in g.snakes}
    out = []
    for row in proj.rows:
        h = _hyperplane(row)
        refs = [(REAL, i) for i in row.real] + [(FAKE, i) for i in row.fake]
        dirs_in, dirs_out, pairs, sets = set(), set(), set(), []
        for kind, i in refs:
            snake = kinds[kind]
            dirs = snake.directions
            sets.append(snake.turning_sets[i])
            a = dirs[i - 1] if i > 0 else None
            b = dirs[i] if i < len(dirs) else None
            if a is not None:
                dirs_in.add(a)
            if b is not None:
                dirs_out.add(b)
            if a is not None and b is not None:
                pairs.add((a, b))
        for ts in sets:
            for v in ts.vertices:
                if not h.contains(v):
                    raise ValueError(f"certificate {h} misses {v}")
        label = "R" + ",".join(map(str, row.real)) + " F" + ",".join(map(str, row.fake))
        out.append(TurningContext(sets[0], frozenset(dirs_in), frozenset(dirs_out), h, frozenset(pairs), label))
    return tuple(out)


def build_coned(name: str, t=None) -> GeoDecomposition:
    proj = _projected(name, t)
    return _cone_all(proj, _projected_decomposition(proj))


@lru_cache(maxsize=None)
def _frozen() -> dict:
    text = resources.files("scdforge").joinpath("data/catalog.json").read_text()
    return json.loads(text)


def freeze(path=None) -> dict:
    """Regenerate the frozen coned decompositions."""
    from .serialize import dumps, geo_to_dict

    data = {name: geo_to_dict(build_coned(name)) for name in CONED}
    if path is not None:
        with open(path, "w") as fh:
            fh.write(dumps(data) + "\n")
    return data


@lru_cache(maxsize=None)
def _get(name: str, t: F | None) -> CatalogEntry:
    from .serialize import geo_from_dict

    if name == "segment":
        g = segment_decomposition()
        return CatalogEntry(name, g.polytope, g, _derived_contexts(g), "unit segment, one real chain")
    if name == "squareBoundary":
        g = square_boundary_decomposition()
        return CatalogEntry(name, g.polytope, g, _derived_contexts(g),
                            "boundary of the unit square, one closed and one open chain")
    if name.startswith("proj"):
        base = name[4:]
        if base not in CONED:
            raise KeyError(name)
        proj = _projected(base)
        g = _projected_decomposition(proj)
        return CatalogEntry(name, g.polytope, g, _contexts(proj, g), "projected: " + proj.description)
    if name == "Pt":
        if t is None:
            raise PreconditionError("Pt needs a parameter t >= 1")
        if t < 1:
            raise PreconditionError("Pt is defined here for t >= 1; use reflected_pt for 0 < t < 1")
        proj = _projected("Pt", t)
        g = _cone_all(proj, _projected_decomposition(proj))
        if t != 1:
            g = GeoDecomposition(g.polytope, g.snakes, ASYMPTOTIC)
        return CatalogEntry(name, g.polytope, g, _contexts(proj, g), proj.description)
    if name in CONED:
        proj = _projected(name)
        g = geo_from_dict(_frozen()[name])
        overrides = {"coverM": proj.cover_m} if proj.cover_m else {}
        return CatalogEntry(name, g.polytope, g, _contexts(proj, g), proj.description, overrides)
    raise KeyError(f"unknown catalog id {name!r}")


def get(name: str, t=None) -> CatalogEntry:
    return _get(name, rat(t) if t is not None else None)


def entries() -> list[tuple[str, str]]:
    out = []
    for name in IDS:
        if name == "Pt":
            out.append((name, "stretched order simplex L(4)_(1,1/t,t,1) minus conv(B'1234), t >= 1"))
            continue
        out.append((name, get(name).provenance))
    return out


def _derived_contexts(g: GeoDecomposition) -> tuple[TurningContext, ...]:
    from .hyperplane_conditions import turning_contexts

    return tuple(turning_contexts(g))


def segment_decomposition(length=1) -> GeoDecomposition:
    a = rat(length)
    poly = order_simplex(1) if a == 1 else weighted_order_simplex((a,))
    sw = Swipe(0, PartialSimplex.closed([(0,)]), PartialSimplex.closed([(a,)]),
               Hyperplane((F(1),), 0), Hyperplane((F(1),), a))
    return GeoDecomposition(poly, (Snake(REAL, (sw,)),))


def square_boundary_decomposition() -> GeoDecomposition:
    pts = [(0, 0), (0, 1), (1, 1), (1, 0)]
    edges = [simplex_polytope([pts[i], pts[(i + 1) % 4]]) for i in range(4)]
    one = PartialSimplex.closed

    def h(a, b, c):
        return Hyperplane((F(a), F(b)), c)

    real = Snake(REAL, (
        Swipe(1, one([(0, 0)]), one([(0, 1)]), h(0, 1, 0), h(1, 1, 1)),
        Swipe(0, one([(0, 1)]), one([(1, 1)]), h(1, 1, 1), h(1, 0, 1)),
    ))
    fake = Snake(FAKE, (
        Swipe(0, one([(0, 0)]), one([(1, 0)]), h(1, 0, 0), h(1, 1, 1)),
        Swipe(1, one([(1, 0)]), one([(1, 1)]), h(1, 1, 1), h(0, 1, 1)),
    ))
    return GeoDecomposition(union(edges), (real, fake))


def reflect(g: GeoDecomposition, top: Sequence) -> GeoDecomposition:
    """Image under x -> top - reverse(x): reverses every chain.

    Maps the decomposition of P onto one of the reflected polytope; swipe
    order, start and end swap and axis i becomes axis m-1-i.
    """
    top = point(top)
    m = len(top)

    def f(p):
        return tuple(top[m - 1 - j] - p[m - 1 - j] for j in range(m))

    def fs(ts: PartialSimplex) -> PartialSimplex:
        return PartialSimplex(Simplex(tuple(f(v) for v in ts.vertices)), ts.removed)

    def fh(h: Hyperplane) -> Hyperplane:
        # sum a_j x_j = b with x_j = top_j - y_{m-1-j}; keeps the side of an inequality
        coeffs = tuple(-h.coeffs[m - 1 - j] for j in range(m))
        return Hyperplane(coeffs, h.rhs - sum(a * c for a, c in zip(h.coeffs, top)))

    def fp(P: Polytope) -> Polytope:
        if P.pieces:
            return union([fp(q) for q in P.pieces])
        cons = tuple(Constraint(fh(c.hyperplane), c.rel) for c in P.constraints)
        return Polytope(P.dim, tuple(sorted(f(v) for v in P.vertices)), cons)

    snakes = []
    for s in g.snakes:
        swipes = [Swipe(m - 1 - w.direction, fs(w.end), fs(w.start),
                        fh(w.end_cert).integer_scaled(), fh(w.start_cert).integer_scaled())
                  for w in reversed(s.swipes)]
        snakes.append(Snake(s.kind, tuple(swipes)))
    return GeoDecomposition(fp(g.polytope), tuple(snakes), g.mode, g.cover_m_override)


def reflected_pt(t) -> GeoDecomposition:
    """The stretched family for 0 < t < 1, as the reflection of the 1/t member."""
    t = rat(t)
    if not 0 < t < 1:
        raise PreconditionError("reflected_pt expects 0 < t < 1")
    s = 1 / t
    g = get("Pt", s).decomposition
    return reflect(g, (F(1), 1 / s, s, F(1)))

"""Command line interface and SVG rendering.

Exit codes: 0 success, 1 a verification failed, 2 usage error,
3 a precondition or hyperplane condition does not hold.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import catalog
from .constructions import ConeSpec, cone_off, product_discrete, product_geometric
from .discrete_poset import ChainDecomposition, rank_profile, verify_scd
from .discretizer import asymptotic, cover, decompose, verify_cover
from .errors import PreconditionError, ScdError
from .exact_core import point, rank, rat, rat_str
from .hyperplane_conditions import check_strong, check_weak
from .oracle import independent_verify, q_binomial, search_scd
from .polytope import order_simplex, polytope_rank
from .serialize import chains_from_dict, chains_to_csv, chains_to_dict, dumps, geo_from_dict, geo_to_dict
from .snake_model import EXACT, GeoDecomposition, validate_geo
from .volume_stats import (
    middle_rank,
    sample_lambdas,
    theorem63_sides,
    theorem64_sides,
    theorem65_66_sides,
    volume_rank_symmetry,
)

OK, VERIFY_FAILED, USAGE, PRECONDITION = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --- SVG --------------------------------------------------------------------


@dataclass(frozen=True)
class ViewSpec:
    """Two affine functionals giving the drawing coordinates of a point."""

    fx: tuple[tuple[Fraction, ...], Fraction]
    fy: tuple[tuple[Fraction, ...], Fraction]

    def __call__(self, p: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
        return (sum((a * b for a, b in zip(self.fx[0], p)), self.fx[1]),
                sum((a * b for a, b in zip(self.fy[0], p)), self.fy[1]))

    @classmethod
    def axes(cls, m: int, i: int = 0, j: int = 1) -> ViewSpec:
        ex = tuple(Fraction(int(k == i)) for k in range(m))
        ey = tuple(Fraction(int(k == j)) for k in range(m))
        return cls((ex, Fraction(0)), (ey, Fraction(0)))


_SIZE = 400
_PAD = 30


class _Canvas:
    def __init__(self, pts: list[tuple[Fraction, Fraction]]):
        xs = [p[0] for p in pts] or [Fraction(0)]
        ys = [p[1] for p in pts] or [Fraction(0)]
        self.x0, self.y0 = min(xs), min(ys)
        span = max(max(xs) - self.x0, max(ys) - self.y0) or Fraction(1)
        self.scale = Fraction(_SIZE - 2 * _PAD) / span
        self.items: list[str] = []

    def xy(self, p) -> str:
        x = _PAD + (p[0] - self.x0) * self.scale
        y = _SIZE - _PAD - (p[1] - self.y0) * self.scale
        return f"{float(x):.3f},{float(y):.3f}"

    def add(self, item: str):
        self.items.append(item)

    def document(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
                f'viewBox="0 0 {_SIZE} {_SIZE}">\n'
                '<defs><marker id="a" markerWidth="6" markerHeight="6" refX="5" refY="3" orient="auto">'
                '<path d="M0,0 L6,3 L0,6 z" fill="#333"/></marker></defs>\n')
        return head + "\n".join(self.items) + "\n</svg>\n"


def _arrow(c: _Canvas, a, b, colour="#333"):
    if a == b:
        return
    (x1, y1), (x2, y2) = c.xy(a).split(","), c.xy(b).split(",")
    c.add(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{colour}" stroke-width="1" marker-end="url(#a)"/>')


def render_svg(obj: GeoDecomposition | ChainDecomposition, view: ViewSpec | None = None, fans: int = 4) -> str:
    """Deterministic SVG of a 2-dimensional decomposition or chain family."""
    dim = obj.dim if isinstance(obj, GeoDecomposition) else (
        len(obj.chains[0].points[0]) if obj.chains and obj.chains[0].points else 2)
    if view is None:
        if dim != 2:
            raise PreconditionError(f"dimension {dim} needs a view to draw in the plane")
        view = ViewSpec.axes(2)
    if isinstance(obj, ChainDecomposition):
        pts = [tuple(Fraction(a, obj.n) for a in p) for c in obj.chains for p in c.points]
        c = _Canvas([view(p) for p in pts])
        for ch in obj.chains:
            fr = [view(tuple(Fraction(a, obj.n) for a in p)) for p in ch.points]
            for a, b in zip(fr, fr[1:]):
                _arrow(c, a, b)
        for p in sorted(set(pts)):
            x, y = c.xy(view(p)).split(",")
            c.add(f'<circle cx="{x}" cy="{y}" r="2.5" fill="#000"/>')
        return c.document()
    g = obj
    verts = [view(v) for piece in g.polytope.convex_pieces() for v in piece.vertices]
    c = _Canvas(verts)
    for snake in g.snakes:
        colour = "#333" if snake.kind == "real" else "#b33"
        for s in snake.swipes:
            sv, ev = s.start.vertices, s.end.vertices
            for k in range(fans + 1):
                lam = Fraction(k, fans)
                if len(sv) == 1:
                    if k:
                        break
                    a, b = sv[0], ev[0]
                else:
                    a = tuple(x + lam * (y - x) for x, y in zip(sv[0], sv[-1]))
                    b = tuple(x + lam * (y - x) for x, y in zip(ev[0], ev[-1]))
                _arrow(c, view(a), view(b), colour)
        for ts in snake.turning_sets:
            fr = [view(v) for v in ts.vertices]
            if len(fr) == 1:
                x, y = c.xy(fr[0]).split(",")
                c.add(f'<circle cx="{x}" cy="{y}" r="3" fill="{colour}"/>')
                continue
            path = " ".join(c.xy(p) for p in fr)
            c.add(f'<polyline points="{path}" fill="none" stroke="{colour}" stroke-width="3"/>')
    return c.document()


# --- output -----------------------------------------------------------------


def write_atomic(path: str, text: str):
    """Write text to path via a temporary file in the same directory."""
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".scdforge-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str):
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _table_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def _structured(args, obj, rows: list[dict] | None = None) -> str:
    if args.format == "csv" and rows is not None:
        return _table_csv(rows)
    return dumps(obj) + "\n"


# --- inputs -----------------------------------------------------------------


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(str(e)) from e


def _geo_file(path: str) -> GeoDecomposition:
    doc = _read_json(path)
    doc = doc.get("decomposition", doc)  # output of `catalog show`
    try:
        return geo_from_dict(doc)
    except (KeyError, TypeError) as e:
        raise UsageError(f"{path} is not a decomposition file") from e


def _geo(spec: str | None, t=None, path: str | None = None) -> GeoDecomposition:
    """Decomposition from a catalog id or a JSON file."""
    if path:
        return _geo_file(path)
    if spec is None:
        raise UsageError("give --entry or --geo")
    if os.path.exists(spec):
        return _geo_file(spec)
    return _entry(spec, t).decomposition


def _entry(name: str, t=None):
    try:
        return catalog.get(name, t)
    except KeyError as e:
        raise UsageError(f"unknown catalog id {name!r}") from e


def _point(text: str):
    return point(x.strip() for x in text.split(","))


# --- commands ---------------------------------------------------------------


def cmd_catalog(args) -> int:
    if args.action == "list":
        rows = [{"id": i, "provenance": p} for i, p in catalog.entries()]
        _emit(args, _structured(args, rows, rows) if args.format == "csv" or args.out
              else "".join(f"{r['id']:16s} {r['provenance']}\n" for r in rows))
        return OK
    if not args.entry:
        raise UsageError("catalog show needs --entry")
    e = _entry(args.entry, args.t)
    doc = {"id": e.id, "provenance": e.provenance, "overrides": e.overrides,
           "decomposition": geo_to_dict(e.decomposition)}
    _emit(args, dumps(doc) + "\n")
    return OK


def _decompose_one(g: GeoDecomposition, n: int) -> tuple[ChainDecomposition, bool]:
    d = decompose(g, n)
    return d, verify_scd(d, g.polytope).ok


def cmd_discretize(args) -> int:
    g = _geo(args.entry, args.t, args.geo)
    ns = args.n
    if args.parallel > 1 and len(ns) > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            results = list(pool.map(_decompose_one, [g] * len(ns), ns))
    else:
        results = [_decompose_one(g, n) for n in ns]
    ok = all(r[1] for r in results)
    if len(results) == 1:
        d = results[0][0]
        text = chains_to_csv(d) if args.format == "csv" else dumps(chains_to_dict(d)) + "\n"
    else:
        text = dumps({"decompositions": [chains_to_dict(d) for d, _ in results]}) + "\n"
    _emit(args, text)
    return OK if ok else VERIFY_FAILED


def cmd_cover(args) -> int:
    g = _geo(args.entry, args.t, args.geo)
    d = cover(g, args.k, args.m)
    rep = verify_cover(d, args.k)
    text = chains_to_csv(d) if args.format == "csv" else dumps(chains_to_dict(d, with_polytope=False)) + "\n"
    _emit(args, text)
    if not rep.ok:
        print("; ".join(rep.messages), file=sys.stderr)
    return OK if rep.ok else VERIFY_FAILED


def cmd_asym(args) -> int:
    g = _geo(args.entry, args.t, args.geo)
    rows = []
    ok = True
    for k in args.k:
        rep = asymptotic(g, k, args.trim_cap)
        good = verify_scd(rep.kept, g.polytope, check_cover=False).ok
        ok &= good
        rows.append({"k": k, "total": rep.total_points, "kept_chains": len(rep.kept.chains),
                     "discarded": rep.discarded_points, "trimmed": rep.trimmed_points,
                     "trim_cap": rep.trim_cap, "loss_fraction": rat_str(rep.loss_fraction),
                     "kept_symmetric": good})
    _emit(args, _structured(args, {"runs": rows}, rows))
    return OK if ok else VERIFY_FAILED


def _check_rows(contexts) -> list[dict]:
    rows = []
    for ctx in contexts:
        strong = check_strong(ctx)
        rows.append({"turning_set": ctx.label, "certificate": str(ctx.certificate),
                     "strong": strong.satisfied,
                     "complexity": strong.complexity if strong.satisfied else "",
                     "weak": check_weak(ctx)})
    return rows


def cmd_check(args) -> int:
    e = _entry(args.entry, args.t)
    rows = _check_rows(e.certificates)
    need = "strong" if e.decomposition.mode == EXACT else "weak"
    failing = [r for r in rows if not r[need]]
    if args.format == "csv" or args.out:
        _emit(args, _structured(args, {"rows": rows, "required": need}, rows))
    else:
        lines = [f"{'turning set':18s} {'strong':7s} {'cx':3s} {'weak':6s} certificate"]
        for r in rows:
            lines.append(f"{r['turning_set']:18s} {str(r['strong']):7s} {str(r['complexity']):3s} "
                         f"{str(r['weak']):6s} {r['certificate']}")
        lines.append(f"{len(failing)} of {len(rows)} rows fail the {need} condition")
        _emit(args, "\n".join(lines) + "\n")
    return PRECONDITION if failing else OK


def cmd_cone(args) -> int:
    base = _geo(args.base)
    g = cone_off(ConeSpec(_point(args.apex), base, args.owner))
    rep = validate_geo(g, (1, 2))
    _emit(args, dumps(geo_to_dict(g)) + "\n")
    return OK if rep.ok else VERIFY_FAILED


def cmd_product(args) -> int:
    a, b = _geo(args.a), _geo(args.b)
    if args.mode == "geo":
        g = product_geometric(a, b)
        rep = validate_geo(g, (1, 2))
        _emit(args, dumps(geo_to_dict(g)) + "\n")
        return OK if rep.ok else VERIFY_FAILED
    if args.n is None:
        raise UsageError("--mode discrete needs --n")
    d = product_discrete(decompose(a, args.n), decompose(b, args.n))
    ok = verify_scd(d, d.polytope).ok
    text = chains_to_csv(d) if args.format == "csv" else dumps(chains_to_dict(d)) + "\n"
    _emit(args, text)
    return OK if ok else VERIFY_FAILED


def cmd_stats(args) -> int:
    g = _geo(args.entry, args.t, args.geo)
    P = g.polytope
    doc: dict = {"rank": rat_str(polytope_rank(P)), "middle_rank": rat_str(middle_rank(P))}
    ok = True
    a, b = theorem63_sides(g)
    doc["middle_slice"] = {"sum_N": rat_str(a), "slice_volume": rat_str(b), "equal": a == b}
    a2, b2 = theorem64_sides(g)
    doc["volume"] = {"sum_N_length": rat_str(a2), "volume": rat_str(b2), "equal": a2 == b2}
    ok &= a == b and a2 == b2
    lams = list(args.lam) if args.lam else sample_lambdas(P)
    if args.samples:
        rng = random.Random(args.seed)
        top = middle_rank(P)
        lams += [top * Fraction(rng.randint(1, 99), 100) for _ in range(args.samples)]
    per = []
    for lam in sorted(set(lams)):
        s = theorem65_66_sides(g, lam)
        ok &= s.ok
        per.append({"lambda": rat_str(lam), "slice_sum": rat_str(s.slice_sum),
                    "slice_volume": rat_str(s.slice_volume), "below_sum": rat_str(s.below_sum),
                    "below_volume": rat_str(s.below_volume), "equal": s.ok})
    doc["lambdas"] = per
    doc["volume_rank_symmetry"] = volume_rank_symmetry(P)
    _emit(args, _structured(args, doc, per))
    return OK if ok else VERIFY_FAILED


def cmd_render(args) -> int:
    if args.chains:
        obj = chains_from_dict(_read_json(args.chains))
    else:
        obj = _geo(args.entry, args.t, args.geo)
        if args.n is not None:
            obj = decompose(obj, args.n)
    view = None
    if args.view:
        fx, fy = args.view.split(";")
        view = ViewSpec((_point(fx), Fraction(0)), (_point(fy), Fraction(0)))
    _emit(args, render_svg(obj, view))
    return OK


def cmd_oracle(args) -> int:
    if args.action == "rank-profile":
        got = rank_profile(order_simplex(args.m), args.n).as_tuple()
        want = q_binomial(args.m, args.n)
        doc = {"m": args.m, "n": args.n, "rank_profile": list(got), "q_binomial": list(want), "equal": got == want}
        _emit(args, dumps(doc) + "\n")
        return OK if got == want else VERIFY_FAILED
    if args.action == "search":
        P = _entry(args.entry, args.t).polytope
        d = search_scd(P, args.n, args.budget, args.cap)
        doc = chains_to_dict(d) if d is not None else {"found": False}
        _emit(args, dumps(doc) + "\n")
        return OK if d is not None else VERIFY_FAILED
    if not args.chains:
        raise UsageError("oracle verify needs --chains")
    d = chains_from_dict(_read_json(args.chains))
    P = d.polytope if d.polytope is not None else (_entry(args.entry, args.t).polytope if args.entry else None)
    if P is None:
        raise UsageError("the chain file has no polytope; give --entry")
    ok = independent_verify(d, P, not args.no_cover) and verify_scd(d, P, not args.no_cover).ok
    _emit(args, dumps({"ok": ok}) + "\n")
    return OK if ok else VERIFY_FAILED


# --- parser -----------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result here (atomically)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--parallel", type=int, default=1, help="worker processes")

    def entry_opts(p, required=False):
        p.add_argument("--entry", required=required, help="catalog id or decomposition file")
        p.add_argument("--t", type=rat, help="parameter for Pt")
        p.add_argument("--geo", help="decomposition JSON file")

    ap = argparse.ArgumentParser(prog="scdforge", parents=[common],
                                 description="Geometric symmetric chain decompositions, exactly.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", parents=[common], help="built-in decompositions")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("--entry")
    p.add_argument("--t", type=rat)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("discretize", parents=[common], help="chains of P(n) from a decomposition")
    entry_opts(p)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("cover", parents=[common], help="covering chains in P(kM)")
    entry_opts(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("asym", parents=[common], help="asymptotic chains and their loss")
    entry_opts(p)
    p.add_argument("--k", type=int, nargs="+", required=True)
    p.add_argument("--trim-cap", type=int)
    p.set_defaults(func=cmd_asym)

    p = sub.add_parser("check", parents=[common], help="hyperplane condition table")
    p.add_argument("--entry", required=True)
    p.add_argument("--t", type=rat)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("cone", parents=[common], help="cone a decomposition off at an apex")
    p.add_argument("--base", required=True)
    p.add_argument("--apex", required=True, help="comma separated rationals")
    p.add_argument("--owner", type=int)
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("product", parents=[common], help="product of two decompositions")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--mode", choices=("geo", "discrete"), default="geo")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("stats", parents=[common], help="volume identities")
    entry_opts(p)
    p.add_argument("--lambda", dest="lam", type=rat, nargs="+", help="ranks to check instead of the defaults")
    p.add_argument("--samples", type=int, default=0, help="extra random lambdas")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("render", parents=[common], help="SVG drawing")
    entry_opts(p)
    p.add_argument("--chains", help="chain decomposition JSON file")
    p.add_argument("--n", type=int, help="draw the chains of P(n) instead")
    p.add_argument("--view", help="two functionals 'a,b,..;c,d,..' for higher dimensions")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("oracle", parents=[common], help="brute-force cross-checks")
    p.add_argument("action", choices=("rank-profile", "search", "verify"))
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--entry")
    p.add_argument("--t", type=rat)
    p.add_argument("--chains")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--cap", type=int, default=60)
    p.add_argument("--no-cover", action="store_true", help="skip the cover check")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"scdforge: {e}", file=sys.stderr)
        return USAGE
    except PreconditionError as e:
        print(f"scdforge: {type(e).__name__}: {e}", file=sys.stderr)
        return PRECONDITION
    except ScdError as e:
        print(f"scdforge: {type(e).__name__}: {e}", file=sys.stderr)
        return VERIFY_FAILED
    except ValueError as e:
        print(f"scdforge: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())

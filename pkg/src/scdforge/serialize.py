"""JSON and CSV encodings. Rationals are always strings such as "3/4"."""

from __future__ import annotations

import csv
import io
import json
from typing import Any

from .discrete_poset import ChainDecomposition, DiscreteChain, scaled_rank
from .exact_core import Hyperplane, PartialSimplex, Simplex, point, rat, rat_str
from .polytope import Constraint, Polytope
from .snake_model import GeoDecomposition, Snake, Swipe


def _pt(p) -> list[str]:
    return [rat_str(c) for c in p]


def hyperplane_to_dict(h: Hyperplane) -> dict:
    return {"coeffs": _pt(h.coeffs), "rhs": rat_str(h.rhs)}


def hyperplane_from_dict(d: dict) -> Hyperplane:
    return Hyperplane(point(d["coeffs"]), rat(d["rhs"]))


def polytope_to_dict(P: Polytope) -> dict:
    out: dict[str, Any] = {
        "dim": P.dim,
        "vertices": [_pt(v) for v in P.vertices],
        "constraints": [
            {**hyperplane_to_dict(c.hyperplane), "rel": c.rel} for c in P.constraints
        ],
    }
    if P.pieces:
        out["pieces"] = [polytope_to_dict(p) for p in P.pieces]
    if P.fast:
        out["fast"] = P.fast
        if P.fast_params:
            out["fastParams"] = _encode_params(P.fast_params)
    return out


def _encode_params(params):
    if isinstance(params, tuple):
        return [_encode_params(p) for p in params]
    return rat_str(params)


def _decode_params(params):
    if isinstance(params, list):
        return tuple(_decode_params(p) for p in params)
    return rat(params)


def polytope_from_dict(d: dict) -> Polytope:
    cons = tuple(Constraint(hyperplane_from_dict(c), c.get("rel", "<=")) for c in d.get("constraints", []))
    pieces = tuple(polytope_from_dict(p) for p in d.get("pieces", []))
    return Polytope(
        int(d["dim"]),
        tuple(point(v) for v in d["vertices"]),
        cons,
        pieces,
        d.get("fast"),
        _decode_params(d["fastParams"]) if "fastParams" in d else (),
    )


def partial_simplex_to_dict(t: PartialSimplex) -> dict:
    return {
        "vertices": [_pt(v) for v in t.vertices],
        "removed": sorted(sorted(s) for s in t.removed),
    }


def partial_simplex_from_dict(d: dict) -> PartialSimplex:
    return PartialSimplex(
        Simplex(tuple(point(v) for v in d["vertices"])),
        frozenset(frozenset(s) for s in d.get("removed", [])),
    )


def geo_to_dict(g: GeoDecomposition) -> dict:
    out: dict[str, Any] = {
        "polytope": polytope_to_dict(g.polytope),
        "mode": g.mode,
        "snakes": [
            {
                "kind": s.kind,
                "swipes": [
                    {
                        "dir": w.direction,
                        "start": partial_simplex_to_dict(w.start),
                        "end": partial_simplex_to_dict(w.end),
                        "startCert": hyperplane_to_dict(w.start_cert),
                        "endCert": hyperplane_to_dict(w.end_cert),
                    }
                    for w in s.swipes
                ],
            }
            for s in g.snakes
        ],
    }
    if g.cover_m_override is not None:
        out["coverM"] = g.cover_m_override
    return out


def geo_from_dict(d: dict) -> GeoDecomposition:
    snakes = []
    for s in d["snakes"]:
        swipes = tuple(
            Swipe(
                int(w["dir"]),
                partial_simplex_from_dict(w["start"]),
                partial_simplex_from_dict(w["end"]),
                hyperplane_from_dict(w["startCert"]),
                hyperplane_from_dict(w["endCert"]),
            )
            for w in s["swipes"]
        )
        snakes.append(Snake(s["kind"], swipes))
    return GeoDecomposition(polytope_from_dict(d["polytope"]), tuple(snakes), d.get("mode", "exact"), d.get("coverM"))


def chains_to_dict(c: ChainDecomposition, with_polytope: bool = True) -> dict:
    out: dict[str, Any] = {
        "n": c.n,
        "chains": [{"kind": ch.kind, "points": [list(p) for p in ch.points]} for ch in c.chains],
    }
    if with_polytope and c.polytope is not None:
        out["polytope"] = polytope_to_dict(c.polytope)
    return out


def chains_from_dict(d: dict) -> ChainDecomposition:
    chains = tuple(DiscreteChain(tuple(tuple(p) for p in ch["points"]), ch.get("kind", "closed")) for ch in d["chains"])
    poly = polytope_from_dict(d["polytope"]) if "polytope" in d else None
    return ChainDecomposition(int(d["n"]), chains, poly)


def chains_to_csv(c: ChainDecomposition) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    dim = len(c.chains[0].points[0]) if c.chains and c.chains[0].points else 0
    w.writerow(["chain_id", "kind", "scaled_rank"] + [f"x{j}" for j in range(dim)] + ["denominator"])
    for idx, ch in enumerate(c.chains):
        for p in ch.points:
            w.writerow([idx, ch.kind, scaled_rank(p)] + list(p) + [c.n])
    return buf.getvalue()


def chains_from_csv(text: str) -> ChainDecomposition:
    rows = list(csv.reader(io.StringIO(text)))
    chains: dict[int, tuple[str, list]] = {}
    n = None
    for r in rows[1:]:
        idx, kind = int(r[0]), r[1]
        nums = tuple(int(x) for x in r[3:-1])
        n = int(r[-1])
        chains.setdefault(idx, (kind, []))[1].append(nums)
    out = tuple(DiscreteChain(tuple(pts), kind) for _, (kind, pts) in sorted(chains.items()))
    return ChainDecomposition(n or 1, out)


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=1, sort_keys=True)

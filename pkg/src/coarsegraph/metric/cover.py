"""Checking (n+1, s)-disjoint bounded covers."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .graph import INF, MetricGraph, as_rational, vkey
from .ops import diameter, dijkstra, distance_regions
from .region import Region


@dataclass(frozen=True)
class ColoredCover:
    items: tuple  # ((Region, color), ...)

    @classmethod
    def of(cls, pairs) -> "ColoredCover":
        return cls(tuple((r, int(c)) for r, c in pairs))


@dataclass
class CoverVerdict:
    ok: bool
    witness: dict | None = None


def _vertex_diameter_below(g: MetricGraph, vs: set, bound: Fraction) -> tuple[bool, Any]:
    for v in sorted(vs, key=vkey):
        reach = dijkstra(g, [v], limit=bound)
        for w in vs:
            d = reach.get(w, INF)
            if d >= bound:
                return False, (v, w)
    return True, None


def verify_cover(g: MetricGraph, target: Region, cover: ColoredCover, n: int, s: Any, d_bound: Any) -> CoverVerdict:
    s, d_bound = as_rational(s), as_rational(d_bound)
    colors = sorted({c for _, c in cover.items})
    bad = [c for c in colors if not 1 <= c <= n + 1]
    if bad:
        return CoverVerdict(False, {"kind": "color", "color": bad[0], "allowed": n + 1})
    regions = [r for r, _ in cover.items]
    for i, r in enumerate(regions):
        if r.vertex_only:
            ok, pair = _vertex_diameter_below(g, set(r.vertices), d_bound)
            if not ok:
                return CoverVerdict(False, {"kind": "diameter", "region": i, "pair": list(pair)})
        else:
            d = diameter(g, r)
            if d >= d_bound:
                return CoverVerdict(False, {"kind": "diameter", "region": i, "diameter": d})
    owner: dict = {}
    for i, (r, c) in enumerate(cover.items):
        if r.vertex_only:
            for v in r.vertices:
                owner.setdefault(v, []).append(i)
    for i, (r, c) in enumerate(cover.items):
        if r.vertex_only and s > 0:
            reach = dijkstra(g, r.vertices, limit=s)
            hits = set()
            for v, d in reach.items():
                if d < s:
                    hits.update(j for j in owner.get(v, ()) if j > i and cover.items[j][1] == c)
            for j in sorted(hits):
                if cover.items[j][0].vertex_only:
                    dist = distance_regions(g, r, cover.items[j][0])
                    return CoverVerdict(False, {"kind": "disjointness", "regions": [i, j], "color": c, "distance": dist})
        for j in range(i + 1, len(cover.items)):
            rj, cj = cover.items[j]
            if cj != c or (r.vertex_only and rj.vertex_only):
                continue
            dist = distance_regions(g, r, rj)
            if dist < s:
                return CoverVerdict(False, {"kind": "disjointness", "regions": [i, j], "color": c, "distance": dist})
    union = regions[0].union(*regions[1:]) if regions else Region.empty(g)
    if not target.subset_of(union):
        missing = [v for v in target.sorted_vertices() if v not in union.vertices]
        return CoverVerdict(False, {"kind": "coverage", "missing": missing[:1]})
    return CoverVerdict(True)

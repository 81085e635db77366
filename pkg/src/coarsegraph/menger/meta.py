"""Meta-bridges: bridges glued by short brown connectors, and the join-trees they form."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..fatminor.constructions import InternalError
from ..metric.graph import MetricGraph
from ..metric.ops import _DSU, distance, distance_regions, shortest_route
from ..metric.region import Region, Route
from .bridges import BaseGeodesic, Bridge, is_crossing, is_perfect


@dataclass
class MetaBridge:
    route: Route  # oriented from the b0 end to the b1 end
    b0: Fraction
    b1: Fraction
    members: tuple  # ids of the bridges it is built from

    @property
    def start(self):
        return self.route.start

    @property
    def end(self):
        return self.route.end

    def region(self) -> Region:
        return self.route.region()


@dataclass
class JoinTree:
    paths: list  # brown connectors (Routes)
    length: Fraction
    rank: int


@dataclass
class MetaResult:
    metas: list
    brown: list
    trees: list
    joins: list  # (meta index, Route)
    a: Fraction
    threshold: Fraction
    problems: list = field(default_factory=list)


def region_length(r: Region) -> Fraction:
    return sum((b - a for _, a, b in r.iter_segments()), Fraction(0))


def _from_bridge(br: Bridge) -> MetaBridge:
    return MetaBridge(br.route, br.b0, br.b1, (br.id,))


def _oriented(base: BaseGeodesic, route: Route) -> MetaBridge | None:
    s0 = base.end_param(route.start, 0)
    s1 = base.end_param(route.end, 1)
    if s1 < s0:
        route = route.reversed()
        s0, s1 = s1, s0
    return MetaBridge(route, s0, s1, ())


def _ends(m: MetaBridge) -> tuple:
    return (m.start, m.end)


def _far_ends(g: MetricGraph, b: MetaBridge, c: MetaBridge, thr: Fraction) -> bool:
    return all(distance(g, x, y) >= thr for x in _ends(b) for y in _ends(c))


def _join(g: MetricGraph, base: BaseGeodesic, b: MetaBridge, c: MetaBridge) -> tuple[MetaBridge, Route]:
    alpha = shortest_route(g, b.region(), c.region())
    tx = b.route.param_of(alpha.start)
    ty = c.route.param_of(alpha.end)
    lb, lc = b.route.length, c.route.length
    options = [
        b.route.sub(0, tx).concat(alpha).concat(c.route.sub(ty, lc)),
        c.route.sub(0, ty).concat(alpha.reversed()).concat(b.route.sub(tx, lb)),
        b.route.sub(0, tx).concat(alpha).concat(c.route.sub(ty, 0)),
        b.route.sub(lb, tx).concat(alpha).concat(c.route.sub(ty, lc)),
    ]
    best = None
    for r in options:
        m = _oriented(base, r)
        if best is None or m.b1 - m.b0 > best.b1 - best.b0:
            best = m
    best.members = tuple(sorted(set(b.members) | set(c.members)))
    return best, alpha


def build_meta_bridges(g: MetricGraph, base: BaseGeodesic, seq: list[Bridge], a: Fraction,
                       threshold: Fraction) -> MetaResult:
    """Repeatedly join the closest pair (< a apart, ends >= threshold apart)."""
    metas = [_from_bridge(b) for b in seq]
    brown: list[Route] = []
    while True:
        best = None
        for i in range(len(metas)):
            for j in range(i + 1, len(metas)):
                b, c = metas[i], metas[j]
                if not _far_ends(g, b, c, threshold):
                    continue
                d = distance_regions(g, b.region(), c.region())
                if d < a and (best is None or d < best[0]):
                    best = (d, i, j)
        if best is None:
            break
        _, i, j = best
        joined, alpha = _join(g, base, metas[i], metas[j])
        brown.append(alpha)
        metas = metas[:i] + [joined] + metas[j + 1:]
    bridge_union = Region.empty(g).union(*(b.region() for b in seq))
    joins = []
    for idx, m in enumerate(metas):
        cur = Fraction(0)
        for s, t in m.route.hits(bridge_union) + [(m.route.length, m.route.length)]:
            if s > cur:
                joins.append((idx, m.route.sub(cur, s)))
            cur = max(cur, t)
    return MetaResult(metas, brown, join_trees(g, brown), joins, a, threshold)


def join_trees(g: MetricGraph, brown: list[Route]) -> list[JoinTree]:
    dsu = _DSU()
    regions = [r.region() for r in brown]
    for i in range(len(brown)):
        dsu.find(i)
        for j in range(i):
            if distance_regions(g, regions[i], regions[j]) == 0:
                dsu.union(i, j)
    groups: dict = {}
    for i in range(len(brown)):
        groups.setdefault(dsu.find(i), []).append(i)
    out = []
    for idx in groups.values():
        union = Region.empty(g).union(*(regions[i] for i in idx))
        length = region_length(union)
        leaves = set()
        for i in idx:
            for p in (brown[i].start, brown[i].end):
                if not any(regions[j].contains(p) for j in idx if j != i):
                    leaves.add(p)
        rank = max(1, len(leaves)) if length > 0 else 1
        out.append(JoinTree([brown[i] for i in idx], length, rank))
    return out


def check_meta(g: MetricGraph, base: BaseGeodesic, res: MetaResult, k: Fraction,
               spacing: Fraction) -> list[str]:
    """Properties of the final meta-bridge sequence; an empty list means all hold."""
    a, thr = res.a, res.threshold
    out = []
    metas = res.metas
    for i in range(len(metas)):
        for j in range(i + 1, len(metas)):
            b, c = metas[i], metas[j]
            close_opposite = distance(g, b.end, c.start) < thr or distance(g, b.start, c.end) < thr
            if not close_opposite and distance_regions(g, b.region(), c.region()) < a:
                out.append(f"meta-bridges {i} and {j} are closer than {a}")
    for idx, j in res.joins:
        if j.length >= 15 * a:
            out.append(f"join of length {j.length} on meta-bridge {idx}")
        if distance_regions(g, j.region(), base.route) < a:
            out.append(f"join on meta-bridge {idx} comes closer than {a} to γ")
    for t in res.trees:
        if t.rank > 16:
            out.append(f"join-tree of rank {t.rank}")
        if t.rank >= 2 and t.length >= a * (t.rank - 1):
            out.append(f"join-tree of rank {t.rank} has length {t.length}")
    if not (is_crossing(metas, spacing, base.length) and is_perfect(metas, spacing)):
        out.append("meta-bridges do not form a perfect crossing sequence")
    return out


def require(problems: list[str], what: str) -> None:
    if problems:
        raise InternalError(f"{what}: " + "; ".join(problems))

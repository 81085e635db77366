"""Base geodesic, bridges and crossing sequences for the two-path coarse Menger problem."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ..fatminor.constructions import InternalError
from ..metric.graph import INF, GraphInputError, Locus, MetricGraph, as_rational
from ..metric.ops import (
    ball,
    distance,
    distance_regions,
    far_set,
    neighborhood,
    shortest_route,
)
from ..metric.region import Region, Route

log = logging.getLogger(__name__)


@dataclass
class BaseGeodesic:
    g: MetricGraph = field(repr=False)
    a: Region
    z: Region
    route: Route
    _pts: list | None = field(default=None, repr=False, compare=False)
    _tabs: dict = field(default_factory=dict, repr=False, compare=False)
    _proj: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def length(self) -> Fraction:
        return self.route.length

    def point(self, t: Any) -> Locus:
        return self.route.point_at(t)

    def param(self, p: Locus) -> Fraction:
        t = self.route.param_of(p)
        if t is None:
            raise InternalError(f"{p} is not on the base geodesic")
        return t

    def segment(self, s: Fraction, t: Fraction) -> Route:
        return self.route.sub(s, t)

    def region(self) -> Region:
        return self.route.region()

    def projection(self, y: Locus) -> tuple[Fraction, Fraction]:
        """Smallest and largest γ-parameter of a point of γ nearest to y.

        Only route points of γ are candidates; that is exact whenever y is off γ,
        since distance to a point inside an edge is minimised at an end of the edge.
        """
        if y.is_vertex and y.vertex in self._proj:
            return self._proj[y.vertex]
        if self._pts is None:
            self._pts = [(p, self.param(p)) for p in self.route.points]
            self._tabs = {p: self.g.distances_from(p.vertex) for p, _ in self._pts if p.is_vertex}
        best, lo, hi = None, None, None
        for p, s in self._pts:
            tab = self._tabs.get(p)
            if tab is None or not y.is_vertex:
                d = distance(self.g, y, p)
            else:
                d = tab.get(y.vertex, INF)
            if best is None or d < best:
                best, lo, hi = d, s, s
            elif d == best:
                lo, hi = min(lo, s), max(hi, s)
        if y.is_vertex:
            self._proj[y.vertex] = (lo, hi)
        return lo, hi

    def end_param(self, p: Locus, side: int) -> Fraction:
        """Parameter of a path end: its position on γ, else 0 in A / ℓ in Z."""
        t = self.route.param_of(p)
        if t is not None:
            return t
        if side == 0 and self.a.contains(p):
            return Fraction(0)
        if side == 1 and self.z.contains(p):
            return self.length
        if self.a.contains(p):
            return Fraction(0)
        if self.z.contains(p):
            return self.length
        raise InternalError(f"{p} is neither on γ nor in A or Z")


def base_geodesic(g: MetricGraph, a: Region, z: Region) -> BaseGeodesic:
    route = shortest_route(g, a, z)
    if route is None:
        raise GraphInputError("A and Z lie in different components")
    return BaseGeodesic(g, a, z, route)


@dataclass
class Separator:
    region: Region
    center: Locus | None
    radius: Fraction
    reason: str = "ball"


@dataclass
class Bridge:
    """c1 ∪ b ∪ c2, stored as one route oriented from the B⁰ side to the B¹ side."""

    id: int
    route: Route
    spine: Route
    leg1: Route | None  # None when the spine starts in A
    leg2: Route | None  # None when the spine ends in Z
    b0: Fraction
    b1: Fraction
    sample: Fraction

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self.b0, self.b1

    @property
    def anchored_a(self) -> bool:
        return self.leg1 is None

    @property
    def anchored_z(self) -> bool:
        return self.leg2 is None

    def region(self) -> Region:
        return self.route.region()


def clamp(t: Fraction, ell: Fraction) -> Fraction:
    return min(max(t, Fraction(0)), ell)


def surrounds(b0: Fraction, b1: Fraction, t: Fraction, d: Fraction, ell: Fraction) -> bool:
    """Interval [b0, b1] contains t−d and t+d (clamped to γ)."""
    return b0 <= clamp(t - d, ell) and clamp(t + d, ell) <= b1


def find_bridge(g: MetricGraph, base: BaseGeodesic, t: Any, k: Any, ident: int = 0) -> Bridge | Separator:
    """A bridge 3k/8-surrounding γ(t), or the ball of radius k/2 at γ(t) as a separator."""
    t, k = as_rational(t), as_rational(k)
    ell = base.length
    x = base.point(t)
    r3 = 3 * k / 8
    gam_a = base.segment(0, t - r3) if t - r3 >= 0 else None
    gam_z = base.segment(t + r3, ell) if t + r3 <= ell else None
    src = base.a.union(gam_a.region()) if gam_a else base.a
    dst = base.z.union(gam_z.region()) if gam_z else base.z
    alpha = shortest_route(g, src, dst, allowed=far_set(g, x, k / 2))
    if alpha is None:
        return Separator(ball(g, x, k / 2), x, k / 2)
    a_near = base.a.union(neighborhood(g, gam_a, k / 8)) if gam_a else base.a
    z_near = base.z.union(neighborhood(g, gam_z, k / 8)) if gam_z else base.z
    q_t = min(s for s, _ in alpha.hits(z_near))
    p_t = max(e for _, e in alpha.hits(a_near) if e <= q_t)
    spine = alpha.sub(p_t, q_t)
    p, q = spine.start, spine.end
    leg1 = None if base.a.contains(p) else shortest_route(g, gam_a.region(), p)
    leg2 = None if base.z.contains(q) else shortest_route(g, q, gam_z.region())
    return _assemble(base, ident, spine, leg1, leg2, t)


def _assemble(base: BaseGeodesic, ident: int, spine: Route, leg1: Route | None, leg2: Route | None,
              sample: Fraction) -> Bridge:
    route = spine
    if leg1 is not None:
        route = leg1.concat(route)
    if leg2 is not None:
        route = route.concat(leg2)
    b0 = Fraction(0) if leg1 is None else base.param(leg1.start)
    b1 = base.length if leg2 is None else base.param(leg2.end)
    return Bridge(ident, route, spine, leg1, leg2, b0, b1, sample)


def bridge_defects(g: MetricGraph, base: BaseGeodesic, br: Bridge, k: Fraction) -> list[str]:
    """Violations of the bridge definition (empty when the bridge is valid)."""
    out = []
    if distance_regions(g, br.spine, base.route) < k / 8:
        out.append("spine closer than k/8 to γ")
    for name, leg in (("first", br.leg1), ("second", br.leg2)):
        if leg is not None and leg.length != k / 8:
            out.append(f"{name} leg has length {leg.length}")
    if br.leg1 is None and not base.a.contains(br.spine.start):
        out.append("trivial first leg outside A")
    if br.leg2 is None and not base.z.contains(br.spine.end):
        out.append("trivial second leg outside Z")
    return out


def widen(g: MetricGraph, base: BaseGeodesic, br: Bridge, k: Fraction, limit: int = 64) -> Bridge:
    """Re-route a leg while some spine point projects to γ outside the interval."""
    for _ in range(limit):
        changed = False
        for y in br.spine.points:
            lo, hi = base.projection(y)
            ty = br.spine.param_of(y)
            if hi > br.b1 and br.leg2 is not None:
                geo = shortest_route(g, y, base.point(hi))
                spine = br.spine.sub(0, ty).concat(geo.sub(0, geo.length - k / 8))
                br = _assemble(base, br.id, spine, br.leg1, geo.sub(geo.length - k / 8, geo.length), br.sample)
                changed = True
                break
            if lo < br.b0 and br.leg1 is not None:
                geo = shortest_route(g, base.point(lo), y)
                spine = geo.sub(k / 8, geo.length).concat(br.spine.sub(ty, br.spine.length))
                br = _assemble(base, br.id, spine, geo.sub(0, k / 8), br.leg2, br.sample)
                changed = True
                break
        if not changed:
            return br
    return br


# -- covers and crossing sequences -------------------------------------------------

@dataclass
class CrossingSequence:
    bridges: list  # ordered by initial point
    radius: Fraction
    perfect: bool
    repairs: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.bridges)


def sample_params(ell: Fraction, k: Fraction) -> list[Fraction]:
    """Parameters at step k/8 plus both ends; a single midpoint sample when γ is shorter than 3k/4."""
    if ell < 3 * k / 4:
        return [ell / 2]
    out, t = [], Fraction(0)
    while t < ell:
        out.append(t)
        t += k / 8
    out.append(ell)
    return out


def maximal_pool(bridges: list[Bridge], min_length: Fraction) -> list[Bridge]:
    """Drop bridges whose interval lies properly inside another's (and duplicates), then short ones."""
    keep = []
    for br in bridges:
        dominated = False
        for other in bridges:
            if other is br:
                continue
            inside = other.b0 <= br.b0 and br.b1 <= other.b1
            if inside and (other.interval != br.interval or other.id < br.id):
                dominated = True
                break
        if not dominated:
            keep.append(br)
    keep = [br for br in keep if br.b1 - br.b0 >= min_length]
    return sorted(keep, key=lambda b: (b.b0, b.b1, b.id))


def is_crossing(seq: list[Bridge], r: Fraction, ell: Fraction) -> bool:
    if not seq or not surrounds(seq[0].b0, seq[0].b1, Fraction(0), r, ell):
        return False
    for prev, cur in zip(seq, seq[1:]):
        if not surrounds(cur.b0, cur.b1, prev.b1, r, ell):
            return False
    return seq[-1].b1 == ell


def is_perfect(seq: list[Bridge], r: Fraction) -> bool:
    starts = [b.b0 for b in seq]
    return all(abs(x - y) >= r for i, x in enumerate(starts) for y in starts[i + 1:])


def crossing_chain(pool: list[Bridge], r: Fraction, ell: Fraction) -> list[Bridge]:
    """Fewest bridges: start at γ(0), repeatedly take the bridge reaching farthest."""
    chain: list[Bridge] = []
    cur = None
    while True:
        if cur is None:
            cands = [b for b in pool if surrounds(b.b0, b.b1, Fraction(0), r, ell)]
        else:
            cands = [b for b in pool if surrounds(b.b0, b.b1, cur, r, ell) and b.b1 > cur]
        if not cands:
            raise InternalError(f"no bridge {r}-surrounds γ({cur if cur is not None else 0})")
        nxt = max(cands, key=lambda b: (b.b1, b.b0, -b.id))
        chain.append(nxt)
        cur = nxt.b1
        if cur == ell:
            return chain


def perfect_subsequence(seq: CrossingSequence, pool: list[Bridge], ell: Fraction, k: Fraction) -> CrossingSequence:
    """Drop the earlier bridge of each pair of initial points closer than k/8."""
    r = k / 8
    bs = seq.bridges
    close = [i for i in range(len(bs) - 1) if bs[i + 1].b0 - bs[i].b0 < r]
    triple = any(j == i + 1 for i, j in zip(close, close[1:]))
    repairs = list(seq.repairs)
    if not triple:
        out = [b for i, b in enumerate(bs) if i not in set(close)]
        if is_crossing(out, r, ell) and is_perfect(out, r):
            return CrossingSequence(out, r, True, repairs)
        repairs.append("matching output not perfect/crossing")
    else:
        repairs.append("three mutually close initial points")
    log.warning("perfect subsequence: %s; searching the bridge pool instead", repairs[-1])
    out = _perfect_search(pool, r, ell)
    if out is None:
        raise InternalError("no perfect k/8-crossing sequence among the bridges found")
    return CrossingSequence(out, r, True, repairs)


def _perfect_search(pool: list[Bridge], r: Fraction, ell: Fraction) -> list[Bridge] | None:
    """Breadth-first search over bridges ordered by initial point."""
    from collections import deque

    starts = [i for i, b in enumerate(pool) if surrounds(b.b0, b.b1, Fraction(0), r, ell)]
    prev = {i: None for i in starts}
    queue = deque(starts)
    while queue:
        i = queue.popleft()
        if pool[i].b1 == ell:
            path = [i]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return [pool[j] for j in reversed(path)]
        for j, c in enumerate(pool):
            if j in prev or c.b0 - pool[i].b0 < r:
                continue
            if surrounds(c.b0, c.b1, pool[i].b1, r, ell) and c.b1 > pool[i].b1:
                prev[j] = i
                queue.append(j)
    return None


@dataclass
class Cover:
    sequence: CrossingSequence | None
    pool: list
    bridges: list  # every bridge found, before pruning
    separator: Separator | None = None


def build_cover(g: MetricGraph, base: BaseGeodesic, k: Any) -> Cover:
    """Bridges at every sample, widened, pruned to maximal ones and chained (radius k/4)."""
    k = as_rational(k)
    ell = base.length
    found = []
    for i, t in enumerate(sample_params(ell, k)):
        br = find_bridge(g, base, t, k, i)
        if isinstance(br, Separator):
            return Cover(None, [], found, br)
        found.append(widen(g, base, br, k))
    pool = maximal_pool(found, min(3 * k / 4, ell))
    chain = crossing_chain(pool, k / 4, ell)
    return Cover(CrossingSequence(chain, k / 4, is_perfect(chain, k / 4)), pool, found)


def disjoint_spot_check(g: MetricGraph, pool: list[Bridge], k: Fraction) -> list[str]:
    """Maximal bridges B < C with C⁰ past B¹ that come within k/4 must have d(B¹, C⁰) < 3k/4."""
    out = []
    for b in pool:
        for c in pool:
            if c.b0 > b.b1 and c.b0 - b.b1 >= 3 * k / 4:
                if distance_regions(g, b.route, c.route) <= k / 4:
                    out.append(f"bridges {b.id} and {c.id} are close but their ends are {c.b0 - b.b1} apart")
    return out

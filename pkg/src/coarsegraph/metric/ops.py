"""Exact metric queries on regions: distances, balls, geodesics, separation."""

from __future__ import annotations

import heapq
from collections import deque
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, Union

from .graph import INF, GraphInputError, Locus, MetricGraph, as_rational, vkey
from .refine import Refinement
from .region import Region, Route

Place = Union[Locus, Region, Route]


class NoPathError(LookupError):
    """Two places lie in different components (or the allowed subspace cuts them off)."""


def as_region(g: MetricGraph, x: Place) -> Region:
    if isinstance(x, Region):
        return x
    if isinstance(x, Route):
        return x.region()
    if isinstance(x, Locus):
        return Region.of_loci(g, [x])
    raise TypeError(f"expected Locus, Region or Route, got {type(x).__name__}")


def dijkstra(h: MetricGraph, sources: Iterable, vallow: set | None = None,
             eallow: set | None = None, limit: Any = None) -> dict:
    """Multi-source distances in ``h``, optionally restricted to a subspace.

    ``limit`` stops expansion beyond that distance (values ≤ limit are exact).
    """
    srcs = [s for s in sources if vallow is None or s in vallow]
    if h.is_unit and eallow is None and vallow is None:
        lim = None if limit is None else int(limit) if limit != INF else None
        return h.bfs(srcs, lim)
    dist: dict = {}
    heap = [(Fraction(0), vkey(s), s) for s in srcs]
    heapq.heapify(heap)
    while heap:
        d, _, v = heapq.heappop(heap)
        if v in dist:
            continue
        dist[v] = d
        if limit is not None and d >= limit:
            continue
        for w, length in h.adjacency(v).items():
            if w in dist:
                continue
            if vallow is not None and w not in vallow:
                continue
            if eallow is not None and h.edge(v, w) not in eallow:
                continue
            nd = d + length
            if limit is None or nd <= limit:
                heapq.heappush(heap, (nd, vkey(w), w))
    return dist


def _nonempty(r: Region, what: str) -> None:
    if r.is_empty():
        raise GraphInputError(f"{what} is empty")


def distance(g: MetricGraph, a: Place, b: Place) -> Fraction | float:
    """Exact distance between loci (or regions/routes); ``INF`` across components."""
    return distance_regions(g, as_region(g, a), as_region(g, b))


def distance_regions(g: MetricGraph, y: Place, z: Place) -> Fraction | float:
    y, z = as_region(g, y), as_region(g, z)
    _nonempty(y, "first region")
    _nonempty(z, "second region")
    ref = Refinement.around(g, y, z)
    ys, _ = ref.discretize(y)
    zs, _ = ref.discretize(z)
    if ys & zs:
        return Fraction(0)
    dist = dijkstra(ref.h, ys)
    best = min((dist[v] for v in zs if v in dist), default=INF)
    return Fraction(best) if best != INF else INF


def vertex_distances(g: MetricGraph, src: Place) -> dict:
    """Distance from ``src`` to every reachable vertex of ``g``."""
    src = as_region(g, src)
    ref = Refinement.around(g, src)
    vs, _ = ref.discretize(src)
    dist = dijkstra(ref.h, vs)
    return {v: Fraction(d) for v, d in dist.items() if v in g}


# -- level sets ---------------------------------------------------------------

def _level_set(g: MetricGraph, src: Region, r: Fraction, mode: str) -> Region:
    """mode 'le': {d <= r}; 'lt': {d < r} closure-free (open part dropped); 'ge': {d >= r}."""
    ref = Refinement.around(g, src)
    h = ref.h
    sv, se = ref.discretize(src)
    dist = dijkstra(h, sv)
    verts, segs = [], []
    for x in h.vertices:
        d = dist.get(x, INF)
        if (mode == "le" and d <= r) or (mode == "ge" and d >= r):
            verts.append(x)
    for x, y in h.edges:
        he = (x, y)
        eid, a, b = ref.host(he)
        length = b - a
        # orientation: local coordinate 0 at x
        x_at_a = ref.locus(x) == g.point(eid, a)
        dx, dy = dist.get(x, INF), dist.get(y, INF)
        if he in se:
            if mode == "le":
                segs.append((eid, a, b))
            elif mode == "ge" and r <= 0:
                segs.append((eid, a, b))
            continue
        pieces: list[tuple[Fraction, Fraction]] = []
        if mode == "le":
            if dx != INF and dx <= r:
                pieces.append((Fraction(0), min(length, r - dx)))
            if dy != INF and dy <= r:
                pieces.append((max(Fraction(0), length - (r - dy)), length))
        else:
            lo = r - dx if dx != INF and dx < r else Fraction(0)
            hi = length - (r - dy) if dy != INF and dy < r else length
            if lo <= hi and lo <= length and hi >= 0:
                pieces.append((max(lo, Fraction(0)), min(hi, length)))
        for s, t in pieces:
            if x_at_a:
                segs.append((eid, a + s, a + t))
            else:
                segs.append((eid, b - t, b - s))
    return ref.region(verts).union(Region.build(g, (), segs))


def neighborhood(g: MetricGraph, src: Place, r: Any) -> Region:
    """Closed r-neighbourhood {p : d(p, src) <= r}."""
    r = as_rational(r)
    if r < 0:
        raise GraphInputError("negative radius")
    src = as_region(g, src)
    _nonempty(src, "region")
    return _level_set(g, src, r, "le")


def ball(g: MetricGraph, center: Locus, r: Any) -> Region:
    return neighborhood(g, g.check_locus(center), r)


def far_set(g: MetricGraph, src: Place, r: Any) -> Region:
    """Closed set {p : d(p, src) >= r}: the complement of the open r-ball."""
    src = as_region(g, src)
    _nonempty(src, "region")
    return _level_set(g, src, as_rational(r), "ge")


# -- routes -------------------------------------------------------------------

def shortest_route(g: MetricGraph, src: Place, dst: Place, allowed: Region | None = None) -> Route | None:
    """Shortest src–dst route inside ``allowed`` (whole graph if None).

    Ties are broken towards the lexicographically smallest vertex sequence.
    Returns None when no route exists.
    """
    src, dst = as_region(g, src), as_region(g, dst)
    _nonempty(src, "source")
    _nonempty(dst, "target")
    ref = Refinement.around(g, src, dst, allowed)
    h = ref.h
    S, _ = ref.discretize(src)
    T, _ = ref.discretize(dst)
    vallow = eallow = None
    if allowed is not None:
        vallow, eallow = ref.discretize(allowed)
        S &= vallow
        T &= vallow
    if not S or not T:
        return None
    dt = dijkstra(h, T, vallow, eallow)
    reach = [s for s in S if s in dt]
    if not reach:
        return None
    best = min(dt[s] for s in reach)
    x = min((s for s in reach if dt[s] == best), key=vkey)
    path = [x]
    while dt[x] != 0:
        nxt = None
        for w in h.neighbors(x):
            if w not in dt:
                continue
            if eallow is not None and h.edge(x, w) not in eallow:
                continue
            if h.adjacency(x)[w] + dt[w] == dt[x]:
                nxt = w
                break
        assert nxt is not None
        path.append(nxt)
        x = nxt
    return ref.route(path)


def geodesic(g: MetricGraph, a: Place, b: Place) -> Route:
    r = shortest_route(g, a, b)
    if r is None:
        raise NoPathError("no path between the given places")
    return r


def is_geodesic(g: MetricGraph, route: Route) -> bool:
    return distance(g, route.start, route.end) == route.length


# -- topology -----------------------------------------------------------------

class _DSU:
    def __init__(self):
        self.p: dict = {}

    def find(self, x):
        self.p.setdefault(x, x)
        root = x
        while self.p[root] != root:
            root = self.p[root]
        while self.p[x] != root:
            self.p[x], x = root, self.p[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if vkey(rb) < vkey(ra):
                ra, rb = rb, ra
            self.p[rb] = ra


def separates(g: MetricGraph, s: Place, a: Place, z: Place) -> bool:
    """True iff every a–z path meets ``s``."""
    s, a, z = as_region(g, s), as_region(g, a), as_region(g, z)
    ref = Refinement.around(g, s, a, z)
    h = ref.h
    sv, se = ref.discretize(s)
    av, ae = ref.discretize(a)
    zv, ze = ref.discretize(z)
    dsu = _DSU()
    for x in h.vertices:
        if x not in sv:
            dsu.find(("v", x))
    for x, y in h.edges:
        e = (x, y)
        if e in se:
            continue
        dsu.find(("e", e))
        for w in (x, y):
            if w not in sv:
                dsu.union(("e", e), ("v", w))
    a_roots = {dsu.find(("v", x)) for x in av - sv} | {dsu.find(("e", e)) for e in ae - se}
    z_roots = {dsu.find(("v", x)) for x in zv - sv} | {dsu.find(("e", e)) for e in ze - se}
    return not (a_roots & z_roots)


def components(g: MetricGraph, region: Place) -> list[Region]:
    """Topological components of a region, ordered by smallest member."""
    region = as_region(g, region)
    ref = Refinement.around(g, region)
    vs, es = ref.discretize(region)
    dsu = _DSU()
    for x in vs:
        dsu.find(x)
    for x, y in es:
        dsu.union(x, y)
    groups: dict = {}
    for x in vs:
        groups.setdefault(dsu.find(x), set()).add(x)
    out = []
    for root in sorted(groups, key=vkey):
        members = groups[root]
        out.append(ref.region(members, [e for e in es if e[0] in members]))
    return out


def is_connected_region(g: MetricGraph, region: Place) -> bool:
    return len(components(g, region)) <= 1


def near_components(g: MetricGraph, s: Place, m: Any) -> list[Region]:
    """Classes of the transitive closure of ``d <= m`` (host metric) on ``s``."""
    m = as_rational(m)
    if m <= 0:
        raise GraphInputError("near-component scale must be positive")
    s = as_region(g, s)
    if s.is_empty():
        return []
    if s.vertex_only:
        return [Region.of_vertices(g, c) for c in near_vertex_classes(g, s.vertices, m)]
    ref = Refinement.around(g, s)
    vs, es = ref.discretize(s)
    dsu = _DSU()
    for x in vs:
        dsu.find(x)
    for x, y in es:
        dsu.union(x, y)
    for x in sorted(vs, key=vkey):
        for y in dijkstra(ref.h, [x], limit=m):
            if y in vs:
                dsu.union(x, y)
    groups: dict = {}
    for x in vs:
        groups.setdefault(dsu.find(x), set()).add(x)
    out = []
    for root in sorted(groups, key=vkey):
        members = groups[root]
        out.append(ref.region(members, [e for e in es if e[0] in members]))
    return out


def near_vertex_classes(g: MetricGraph, vertices: Iterable, m: Any) -> list[list]:
    """Single-linkage classes of a vertex set at scale ``m`` in the host metric."""
    vs = set(vertices)
    dsu = _DSU()
    for v in vs:
        dsu.find(v)
    for v in sorted(vs, key=vkey):
        for w in dijkstra(g, [v], limit=m):
            if w in vs and w != v:
                dsu.union(v, w)
    groups: dict = {}
    for v in vs:
        groups.setdefault(dsu.find(v), []).append(v)
    return sorted((sorted(c, key=vkey) for c in groups.values()), key=lambda c: vkey(c[0]))


# -- diameter -----------------------------------------------------------------

def _max_min_affine(fs: list[tuple], le: Fraction, lf: Fraction) -> Fraction:
    """max over the box [0,le]x[0,lf] of min_i (cs*s + ct*t + c0)."""
    cands = [(Fraction(0), Fraction(0)), (le, Fraction(0)), (Fraction(0), lf), (le, lf)]
    for (a1, b1, c1), (a2, b2, c2) in combinations(fs, 2):
        da, db, dc = a1 - a2, b1 - b2, c1 - c2  # da*s + db*t + dc = 0
        if db != 0:
            for s in (Fraction(0), le):
                cands.append((s, -(da * s + dc) / db))
        if da != 0:
            for t in (Fraction(0), lf):
                cands.append((-(db * t + dc) / da, t))
    for f1, f2, f3 in combinations(fs, 3):
        a1, b1, c1 = f1[0] - f2[0], f1[1] - f2[1], f1[2] - f2[2]
        a2, b2, c2 = f1[0] - f3[0], f1[1] - f3[1], f1[2] - f3[2]
        det = a1 * b2 - a2 * b1
        if det != 0:
            cands.append(((-c1 * b2 + c2 * b1) / det, (-a1 * c2 + a2 * c1) / det))
    best = None
    for s, t in cands:
        if 0 <= s <= le and 0 <= t <= lf:
            val = min(a * s + b * t + c for a, b, c in fs)
            if best is None or val > best:
                best = val
    return best


def diameter(g: MetricGraph, region: Place) -> Fraction | float:
    """Exact diameter of a region (sup over all its points, not only vertices)."""
    region = as_region(g, region)
    if region.is_empty():
        return Fraction(0)
    ref = Refinement.around(g, region)
    h = ref.h
    vs, es = ref.discretize(region)
    dist = {}
    for x in set(vs):
        dist[x] = dijkstra(h, [x])
    best = Fraction(0)
    vlist = sorted(vs, key=vkey)
    for i, x in enumerate(vlist):
        for y in vlist[i + 1:]:
            d = dist[x].get(y, INF)
            if d == INF:
                return INF
            best = max(best, Fraction(d))
    elist = sorted(es, key=lambda e: (vkey(e[0]), vkey(e[1])))
    for e in elist:
        u, v = e
        le = h.length(e)
        best = max(best, (dist[u][v] + le) / 2)
        for x in vlist:
            best = max(best, (dist[x][u] + dist[x][v] + le) / 2)
    for i, e in enumerate(elist):
        u, v = e
        le = h.length(e)
        for f in elist[i + 1:]:
            w, z = f
            lf = h.length(f)
            duw, duz, dvw, dvz = dist[u][w], dist[u][z], dist[v][w], dist[v][z]
            ub = min(duw + dvz, duz + dvw, ) + le + lf
            if ub / 2 <= best:
                continue
            fs = [
                (1, 1, duw),
                (1, -1, duz + lf),
                (-1, 1, le + dvw),
                (-1, -1, le + dvz + lf),
            ]
            best = max(best, _max_min_affine([(Fraction(a), Fraction(b), Fraction(c)) for a, b, c in fs], le, lf))
    return best

"""Quasi-tree recognition: bottleneck checks, layered sphere trees and K_3 witnesses."""

from __future__ import annotations

import random
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any

from .fatminor.constructions import InternalError
from .fatminor.model import FatModel, Pattern, _edge, verify_fat_model
from .metric.graph import INF, GraphInputError, Locus, MetricGraph, as_rational, at, vkey
from .metric.ops import ball, components, geodesic, near_vertex_classes, neighborhood, shortest_route
from .metric.qi import QICertificate, verify_quasi_isometry
from .metric.region import Region, Route


# -- bottleneck property ----------------------------------------------------------

@dataclass
class BottleneckVerdict:
    ok: bool
    delta: Fraction
    pair: tuple | None = None
    midpoint: Locus | None = None
    checked_pairs: int = 0
    exhaustive: bool = True

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "delta": self.delta,
            "pair": list(self.pair) if self.pair else None,
            "midpoint": self.midpoint,
            "checked_pairs": self.checked_pairs,
            "exhaustive": self.exhaustive,
        }


def _midpoints(g: MetricGraph, dist: dict, x: Any, y: Any) -> list[Locus]:
    """Every point m with d(x, m) = d(y, m) = d(x, y) / 2."""
    half = Fraction(dist[x][y]) / 2
    dx, dy = dist[x], dist[y]
    out = [at(v) for v in g.vertices if dx.get(v) == half and dy.get(v) == half]

    def d_at(d: dict, u: Any, w: Any, length: Fraction, t: Fraction):
        return min(d.get(u, INF) + t, d.get(w, INF) + length - t)

    for u, w, length in g.iter_edges():
        for t in (half - dx.get(u, INF), length - (half - dx.get(w, INF))):
            if t in (INF, -INF) or not 0 < t < length:
                continue
            if d_at(dx, u, w, length, t) == half and d_at(dy, u, w, length, t) == half:
                out.append(g.point((u, w), t))
    return sorted(set(out), key=Locus.key)


def _bottleneck_at(g: MetricGraph, dist: dict, x: Any, y: Any, m: Locus, delta: Fraction) -> bool:
    """Every x–y path meets the open ball of radius delta around m."""
    ends = g.locus_ends(m)
    dm = {v: min(off + dist[e].get(v, INF) for e, off in ends) for v in g.vertices}
    if dm[x] < delta or dm[y] < delta:
        return True
    host = None if m.is_vertex else m.edge
    seen = {x}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        if v == y:
            return False
        for w in g.neighbors(v):
            if w in seen or dm[w] < delta:
                continue
            if host is not None and g.edge(v, w) == host:
                continue
            seen.add(w)
            queue.append(w)
    return True


def bottleneck_check(g: MetricGraph, delta: Any, pair_budget: int = 5000,
                     all_midpoints: bool | None = None) -> BottleneckVerdict:
    """Test the bottleneck property at ``delta`` on vertex pairs.

    Pairs are visited by decreasing distance, so the first violation found is
    a farthest one.  The canonical geodesic midpoint is tried first; with
    ``all_midpoints`` (default: graphs of at most 200 vertices) every other
    midpoint is tried before a pair is declared a violation.  When there are
    more pairs than ``pair_budget`` only the farthest ones are checked, with a
    seeded shuffle inside each distance class.
    """
    delta = as_rational(delta)
    if delta <= 0:
        raise GraphInputError("delta must be positive")
    if all_midpoints is None:
        all_midpoints = len(g) <= 200
    dist = {v: g.distances_from(v) for v in g.vertices}
    pairs = [(x, y) for x, y in combinations(g.vertices, 2) if y in dist[x]]
    exhaustive = len(pairs) <= pair_budget
    rng = random.Random(0)
    rng.shuffle(pairs)
    pairs.sort(key=lambda p: -dist[p[0]][p[1]])
    if not exhaustive:
        pairs = pairs[:pair_budget]
    else:
        pairs.sort(key=lambda p: (-dist[p[0]][p[1]], vkey(p[0]), vkey(p[1])))
    for count, (x, y) in enumerate(pairs, 1):
        d = Fraction(dist[x][y])
        m = geodesic(g, at(x), at(y)).point_at(d / 2)
        if _bottleneck_at(g, dist, x, y, m, delta):
            continue
        if all_midpoints and any(_bottleneck_at(g, dist, x, y, q, delta) for q in _midpoints(g, dist, x, y)):
            continue
        return BottleneckVerdict(False, delta, (x, y), m, count, exhaustive)
    return BottleneckVerdict(True, delta, None, None, len(pairs), exhaustive)


# -- layered partition --------------------------------------------------------------

@dataclass
class SpherePartition:
    g: MetricGraph = field(repr=False)
    root: Any
    k: Fraction
    spheres: list  # level -> sorted vertex list
    classes: list  # level -> list of sorted vertex lists
    diameters: list  # level -> list of class diameters
    level: dict = field(repr=False, default_factory=dict)  # vertex -> level
    cls: dict = field(repr=False, default_factory=dict)  # vertex -> (level, index)

    def class_of(self, v: Any) -> tuple:
        return self.cls[v]

    def members(self, c: tuple) -> list:
        return self.classes[c[0]][c[1]]


def _require_unit_connected(g: MetricGraph) -> None:
    if not g.is_unit:
        raise GraphInputError("unit edge lengths required; subdivide the graph first")
    if not g.is_connected():
        raise GraphInputError("graph must be connected")


def _vertex_diameter(g: MetricGraph, vs: list) -> int:
    if len(vs) < 2:
        return 0
    targets = set(vs)
    best = 0
    for v in vs:
        d = g.bfs([v])
        best = max(best, max(d[w] for w in targets))
    return best


def sphere_partition(g: MetricGraph, o: Any, k: Any, workers: int = 1) -> SpherePartition:
    """Spheres around ``o``, each split into 5k-near classes with exact diameters."""
    k = as_rational(k)
    if k <= 0:
        raise GraphInputError("k must be positive")
    _require_unit_connected(g)
    if o not in g:
        raise GraphInputError(f"unknown root {o!r}")
    dist = g.bfs([o])
    ecc = max(dist.values())
    spheres: list[list] = [[] for _ in range(ecc + 1)]
    for v in g.vertices:
        spheres[dist[v]].append(v)

    def split(vs: list) -> tuple[list, list]:
        cl = near_vertex_classes(g, vs, 5 * k)
        return cl, [_vertex_diameter(g, c) for c in cl]

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            done = list(pool.map(split, spheres))
    else:
        done = [split(s) for s in spheres]
    part = SpherePartition(g, o, k, spheres, [c for c, _ in done], [d for _, d in done], dict(dist))
    for n, cl in enumerate(part.classes):
        for i, c in enumerate(cl):
            for v in c:
                part.cls[v] = (n, i)
    return part


@dataclass
class Claim1Violation:
    level: int
    cls: tuple
    pair: tuple
    distance: int
    kind: str = "claim1"

    def to_json(self) -> dict:
        return {"kind": self.kind, "level": self.level, "class": list(self.cls),
                "pair": list(self.pair), "distance": self.distance}


@dataclass
class Claim2Violation:
    level: int  # parents live on this level; the class on the next
    cls: tuple
    parents: list
    path: list  # vertex sequence of A, from a to z
    kind: str = "claim2"

    @property
    def a(self) -> Any:
        return self.path[0]

    @property
    def z(self) -> Any:
        return self.path[-1]

    def to_json(self) -> dict:
        return {"kind": self.kind, "level": self.level, "class": list(self.cls),
                "parents": [list(p) for p in self.parents], "path": self.path}


@dataclass
class TreeResult:
    ok: bool
    tree: MetricGraph | None = None
    parent: dict = field(default_factory=dict)  # class id -> parent class id
    f: dict = field(default_factory=dict)  # vertex -> class id
    violation: Claim1Violation | Claim2Violation | None = None


def _bfs_path(g: MetricGraph, s: Any, t: Any, allowed: set) -> list | None:
    prev = {s: None}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        if v == t:
            out = [v]
            while prev[out[-1]] is not None:
                out.append(prev[out[-1]])
            return out[::-1]
        for w in g.neighbors(v):
            if w in allowed and w not in prev:
                prev[w] = v
                queue.append(w)
    return None


def _find_path_a(part: SpherePartition, n: int, c: tuple, parents: list) -> list:
    """Path with ends in distinct classes of S_n and interior strictly above level n."""
    g, k = part.g, part.k
    members = part.members(c)
    p1, p2 = parents[0], parents[1]
    e = next((u, w) for u in members for w in g.neighbors(u) if part.cls[w] == p1)
    f = next((u, w) for u in members for w in g.neighbors(u) if part.cls[w] == p2)
    zone = set()
    for v in members:
        zone |= {w for w, d in g.bfs([v], int(5 * k)).items() if d <= 5 * k}
    connector = _bfs_path(g, e[0], f[0], zone)
    if connector is not None:
        walk = [e[1]] + connector + [f[1]]
        lows = [i for i, v in enumerate(walk) if part.level[v] <= n]
        for i, j in zip(lows, lows[1:]):
            a, z = walk[i], walk[j]
            if j > i + 1 and part.level[a] == n == part.level[z] and part.cls[a] != part.cls[z]:
                return walk[i:j + 1]
    # fallback: a component above level n touching two classes of S_n
    above = {v for v, d in part.level.items() if d > n}
    seen: set = set()
    for start in sorted(above, key=vkey):
        if start in seen:
            continue
        comp = set(_bfs_tree(g, start, above))
        seen |= comp
        touch = sorted({w for v in comp for w in g.neighbors(v) if part.level[w] == n}, key=vkey)
        if len({part.cls[w] for w in touch}) < 2:
            continue
        a = touch[0]
        z = next(w for w in touch if part.cls[w] != part.cls[a])
        path = _bfs_path(g, a, z, comp | {a, z})
        if path is not None:
            return path
    raise InternalError(f"no connecting path found above level {n}")


def _bfs_tree(g: MetricGraph, s: Any, allowed: set) -> list:
    seen = {s}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        for w in g.neighbors(v):
            if w in allowed and w not in seen:
                seen.add(w)
                queue.append(w)
    return list(seen)


def build_tree(part: SpherePartition) -> TreeResult:
    """Join each class to the classes of the previous sphere it touches."""
    g, k = part.g, part.k
    parent: dict = {}
    for n, cl in enumerate(part.classes):
        for i, members in enumerate(cl):
            if part.diameters[n][i] > 10 * k:
                pair = _far_pair(g, members)
                return TreeResult(False, violation=Claim1Violation(n, (n, i), pair[:2], pair[2]))
        if n == 0:
            continue
        for i, members in enumerate(cl):
            ps = sorted({part.cls[w] for v in members for w in g.neighbors(v) if part.level[w] == n - 1})
            if len(ps) != 1:
                path = _find_path_a(part, n - 1, (n, i), ps)
                return TreeResult(False, violation=Claim2Violation(n - 1, (n, i), ps, path))
            parent[(n, i)] = ps[0]
    nodes = [(n, i) for n, cl in enumerate(part.classes) for i in range(len(cl))]
    tree = MetricGraph(nodes, [(c, p) for c, p in parent.items()])
    return TreeResult(True, tree, parent, dict(part.cls))


def _far_pair(g: MetricGraph, vs: list) -> tuple:
    best = (vs[0], vs[0], 0)
    targets = set(vs)
    for v in vs:
        d = g.bfs([v])
        for w in vs:
            if w in targets and d[w] > best[2]:
                best = (v, w, d[w])
    return best


# -- K_3 witnesses ------------------------------------------------------------------

def _last_near(route: Route, target: Region, r: Fraction) -> Fraction:
    return max(b for _, b in route.hits(neighborhood(route.g, target, r)))


def _first_near_after(route: Route, target: Region, r: Fraction, t0: Fraction) -> Fraction:
    ivs = [iv for iv in route.hits(neighborhood(route.g, target, r)) if iv[1] >= t0]
    return min(max(a, t0) for a, _ in ivs)


def _claim2_witness(part: SpherePartition, v: Claim2Violation) -> FatModel:
    g, k, o = part.g, part.k, part.root
    a, z = v.a, v.z
    path_a = Route.of_vertices(g, v.path)
    pi_a, pi_z = geodesic(g, at(a), at(o)), geodesic(g, at(z), at(o))
    b_a = pi_a.sub(0, 2 * k).region()
    b_z = pi_z.sub(0, 2 * k).region()
    # a–z path inside the two geodesics, joined where they first meet
    t_w = min(s for s, _ in pi_a.hits(pi_z.region()))
    w = pi_a.point_at(t_w)
    big_z = pi_a.sub(0, t_w).concat(pi_z.sub(0, pi_z.param_of(w)).reversed())
    p_az = big_z.sub(2 * k, big_z.length - 2 * k)
    p_t = _last_near(path_a, b_a, k)
    q_t = _first_near_after(path_a, b_z, k, p_t)
    b_w = path_a.sub(p_t, q_t).region()
    leg_a = geodesic(g, b_a, path_a.point_at(p_t))
    leg_z = geodesic(g, path_a.point_at(q_t), b_z)
    pat = Pattern.of(["a", "w", "z"], [("a", "w"), ("w", "z"), ("a", "z")], "K_3")
    return FatModel(pat, {"a": b_a, "w": b_w, "z": b_z},
                    {_edge("a", "w"): leg_a, _edge("w", "z"): leg_z, _edge("a", "z"): p_az}, k)


def _claim1_witness(part: SpherePartition, v: Claim1Violation) -> FatModel:
    g, k, o, n = part.g, part.k, part.root, v.level
    x1, x2 = v.pair
    cls = Region.of_vertices(g, part.members(v.cls))
    path = shortest_route(g, at(x1), at(x2), allowed=neighborhood(g, cls, Fraction(5, 2) * k))
    if path is None:
        raise InternalError("class is not near-connected")
    sets, legs = {}, {}
    for name, x in (("x1", x1), ("x2", x2)):
        pi = geodesic(g, at(x), at(o))
        near = pi.region().union(path.region()).intersection(ball(g, at(x), Fraction(7, 2) * k))
        b = next(c for c in components(g, near) if c.contains(at(x)))
        t = max(e for _, e in pi.hits(b))
        sets[name] = b
        legs[_edge(name, "o")] = pi.sub(t, t + k)
    s2 = min(s for s, _ in path.hits(sets["x2"]))
    s1 = max(e for _, e in path.hits(sets["x1"]) if e <= s2)
    legs[_edge("x1", "x2")] = path.sub(s1, s2)
    sets["o"] = ball(g, at(o), n - Fraction(9, 2) * k)
    pat = Pattern.of(["x1", "x2", "o"], [("x1", "x2"), ("x1", "o"), ("x2", "o")], "K_3")
    return FatModel(pat, sets, legs, k)


def extract_k3_witness(part: SpherePartition, violation: Claim1Violation | Claim2Violation) -> FatModel:
    """Build the K-fat K_3 model forced by a failed claim and verify it."""
    if isinstance(violation, Claim1Violation):
        model = _claim1_witness(part, violation)
    else:
        model = _claim2_witness(part, violation)
    verdict = verify_fat_model(part.g, model, part.k)
    if not verdict.ok:
        raise InternalError(f"{violation.kind} witness fails verification: {verdict.failure}")
    return model


@dataclass
class QuasiTreeResult:
    branch: str  # "tree" | "witness"
    partition: SpherePartition = field(repr=False)
    tree: TreeResult | None = None
    certificate: QICertificate | None = None
    model: FatModel | None = None

    def to_json(self) -> dict:
        if self.branch == "witness":
            return {"branch": "witness", "violation": self.tree.violation, "model": self.model}
        return {"branch": "tree", "nodes": len(self.tree.tree), "certificate": self.certificate.summary()}


def quasi_tree_pipeline(g: MetricGraph, k: Any, root: Any = None, workers: int = 1) -> QuasiTreeResult:
    """Either a tree with a verified (1, 10k) quasi-isometry, or a verified k-fat K_3."""
    k = as_rational(k)
    _require_unit_connected(g)
    if root is None:
        root = g.vertices[0]
    part = sphere_partition(g, root, k, workers)
    res = build_tree(part)
    if res.ok:
        cert = verify_quasi_isometry(g, res.tree, res.f, 1, 10 * k)
        if not cert.verdict:
            raise InternalError(f"tree map fails its certificate: {cert.witness}")
        return QuasiTreeResult("tree", part, res, cert)
    return QuasiTreeResult("witness", part, res, model=extract_k3_witness(part, res.violation))

"""Menger variants: pinned endpoints, and paths from a set out to a sphere around it."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from ..fatminor.constructions import InternalError
from ..metric.graph import GraphInputError, MetricGraph, as_rational, at
from ..metric.ops import distance
from ..metric.region import Region, Route
from .pipeline import MengerOutcome, menger2, verify_paths, verify_separator, vertex_region


def _tip(side: str, v) -> tuple:
    return ("tip", side, v)


def _pendant_graph(g: MetricGraph, a: list, z: list, x, z0, length: Fraction) -> MetricGraph:
    edges = [(u, v, w) for u, v, w in g.iter_edges()]
    for side, vs, keep in (("A", a, x), ("Z", z, z0)):
        for v in vs:
            if v != keep:
                edges.append((v, _tip(side, v), length))
    return MetricGraph(g.vertices, edges)


def _back(g: MetricGraph, route: Route) -> Route:
    """Drop the pendant arcs at either end of a route in the extended graph."""
    pts = list(route.points)
    while len(pts) > 1 and not _in_g(g, pts[0]):
        pts.pop(0)
    while len(pts) > 1 and not _in_g(g, pts[-1]):
        pts.pop()
    return Route.of(g, pts)


def _in_g(g: MetricGraph, p) -> bool:
    return g.has_vertex(p.vertex) if p.is_vertex else g.has_edge(p.edge)


def _project(g: MetricGraph, s: Region) -> Region:
    vs = [v for v in s.vertices if g.has_vertex(v)]
    segs = []
    for eid, lo, hi in s.iter_segments():
        if g.has_edge(eid):
            segs.append((eid, lo, hi))
        else:
            vs.append(eid[0] if g.has_vertex(eid[0]) else eid[1])
    for v in s.vertices:
        if isinstance(v, tuple) and len(v) == 3 and v[0] == "tip":
            vs.append(v[2])
    return Region.build(g, vs, segs)


def menger2_endpoints(g: MetricGraph, a: Any, z: Any, k: Any, x, z0, mode: str = "aux") -> MengerOutcome:
    """Like :func:`menger2`, but two of the four path ends are the given x ∈ A and z0 ∈ Z.

    Every other vertex of A and Z gets a pendant arc longer than d(x, z0) and is
    replaced by the arc's tip, so a shortest A–Z geodesic runs from x to z0.
    """
    a_vs, z_vs = sorted(set(a), key=repr), sorted(set(z), key=repr)
    if x not in a_vs or z0 not in z_vs:
        raise GraphInputError("x must lie in A and z0 in Z")
    k = as_rational(k)
    d = distance(g, at(x), at(z0))
    if d == float("inf"):
        raise GraphInputError("x and z0 lie in different components")
    length = Fraction(d) + 1
    h = _pendant_graph(g, a_vs, z_vs, x, z0, length)
    a2 = [x] + [_tip("A", v) for v in a_vs if v != x]
    z2 = [z0] + [_tip("Z", v) for v in z_vs if v != z0]
    out = menger2(h, a2, z2, k, mode)
    ra, rz = vertex_region(g, a_vs), vertex_region(g, z_vs)
    if out.branch == "separator":
        s = _project(g, out.separator)
        ok, diam = verify_separator(g, s, ra, rz, k)
        if not ok:
            raise InternalError("projected separator failed verification")
        out.separator = s
        out.report.update(diameter=diam, extended_vertices=len(h))
        return out
    paths = tuple(_back(g, p) for p in out.paths)
    ok, dist = verify_paths(g, paths, ra, rz, out.a)
    if not ok:
        raise InternalError("paths failed verification after removing the pendant arcs")
    ends = [p.start for p in paths] + [p.end for p in paths]
    pinned = at(x) in ends and at(z0) in ends
    if mode == "primary" and not pinned:
        raise InternalError("pinned endpoints are not among the path ends")
    out.paths, out.path_distance = paths, dist
    out.report.update(pinned=pinned, extended_vertices=len(h))
    return out


@dataclass
class BoundaryRun:
    radius: int
    outcome: MengerOutcome


def ball_subgraph(g: MetricGraph, dist: dict, n: Fraction) -> MetricGraph:
    """Vertices within n of the source and the edges lying wholly within n."""
    keep = [v for v, d in dist.items() if d <= n]
    edges = [(u, v, w) for u, v, w in g.iter_edges()
             if u in dist and v in dist and (dist[u] + dist[v] + w) / 2 <= n]
    return MetricGraph(keep, edges)


def menger2_to_boundary(g: MetricGraph, a: Any, k: Any, radii: list, mode: str = "aux") -> list[BoundaryRun]:
    """Run :func:`menger2` in the ball of each radius n around A, with Z its distance-n sphere."""
    a_vs = sorted(set(a), key=repr)
    missing = [v for v in a_vs if not g.has_vertex(v)]
    if missing or not a_vs:
        raise GraphInputError(f"bad source set {a_vs}")
    dist = g.dijkstra({v: Fraction(0) for v in a_vs})
    ecc = max(dist.values())
    out = []
    for n in radii:
        n = as_rational(n)
        if n < 0 or n > ecc:
            raise GraphInputError(f"radius {n} outside [0, {ecc}]")
        h = ball_subgraph(g, dist, n)
        sphere = [v for v in h.vertices if dist[v] == n]
        if not sphere:
            raise GraphInputError(f"no vertex at distance exactly {n}")
        res = menger2(h, a_vs, sphere, k, mode)
        if res.paths is not None:
            res.paths = tuple(Route.of(g, list(p.points)) for p in res.paths)
        res.report.update(radius=str(n), sphere=len(sphere))
        out.append(BoundaryRun(int(n) if n.denominator == 1 else n, res))
    return out


def stabilization(runs: list[BoundaryRun]) -> dict:
    """Branch per radius and the first radius from which the branch no longer changes."""
    branches = [(r.radius, r.outcome.branch) for r in runs]
    stable_from = None
    for i, (n, br) in enumerate(branches):
        if all(b == br for _, b in branches[i:]):
            stable_from = n
            break
    return {"branches": [[str(n), b] for n, b in branches], "stable_from": None if stable_from is None else str(stable_from)}

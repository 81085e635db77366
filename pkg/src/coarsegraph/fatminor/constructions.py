"""Explicit fat-minor constructions: subdivision transfer, fat rays, fat ⋁Pₙ prefixes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ..metric.graph import GraphInputError, MetricGraph, as_rational, vkey
from ..metric.ops import distance, geodesic, is_geodesic, neighborhood, vertex_distances
from ..metric.qi import ContractError
from ..metric.region import Region, Route
from .model import FatModel, Pattern, _edge, verify_fat_model


class InternalError(RuntimeError):
    """A construction that is guaranteed to succeed failed its own verification."""


def _checked(g: MetricGraph, model: FatModel, k: Fraction, what: str) -> FatModel:
    verdict = verify_fat_model(g, model, k)
    if not verdict.ok:
        raise InternalError(f"{what}: output fails verification at {k}: {verdict.failure}")
    return model


def subdivision_transfer(g: MetricGraph, model: FatModel, e: tuple, k: Any, new_vertex: Any = None) -> FatModel:
    """From a 3k-fat model of Δ build a k-fat model of Δ with ``e`` subdivided once."""
    k = as_rational(k)
    e = _edge(*e)
    if e not in model.pattern.edges:
        raise GraphInputError(f"{e!r} is not a pattern edge")
    pre = verify_fat_model(g, model, 3 * k)
    if not pre.ok:
        raise ContractError(f"input model is not {3 * k}-fat: {pre.failure}")
    x, y = e
    o = new_vertex if new_vertex is not None else ("sub", x, y)
    vx, vy = model.branch_sets[x], model.branch_sets[y]
    pe = model.branch_paths[e]
    if not vx.contains(pe.start):
        pe = pe.reversed()
    length = pe.length
    if k == 0:
        # degenerate level: split the path in thirds
        p_t, q_t = length / 3, 2 * length / 3
        leg_x, leg_y = pe.sub(0, p_t), pe.sub(q_t, length).reversed()
    else:
        near_x = pe.hits(neighborhood(g, vx, k))
        p_t = max(b for _, b in near_x)
        near_y = [iv for iv in pe.hits(neighborhood(g, vy, k)) if iv[1] >= p_t]
        q_t = min(max(a, p_t) for a, _ in near_y)
        leg_x = geodesic(g, vx, pe.point_at(p_t))
        leg_y = geodesic(g, vy, pe.point_at(q_t))
    core = pe.sub(p_t, q_t)
    sets = dict(model.branch_sets)
    sets[o] = core.region()
    paths = {f: r for f, r in model.branch_paths.items() if f != e}
    pat = model.pattern.subdivide(e, o)
    paths[_edge(x, o)] = leg_x
    paths[_edge(o, y)] = leg_y
    out = FatModel(pat, sets, paths, k)
    return _checked(g, out, k, "subdivision transfer")


@dataclass
class TooShort:
    length: Fraction
    r: Fraction
    reason: str = "route too short for two blocks"


def ray_blocks(route: Route, r: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Greedy blocks of a geodesic from its origin: [0,0], then steps of r."""
    blocks = [(Fraction(0), Fraction(0))]
    s = Fraction(0)
    while s < route.length:
        t = min(s + r, route.length)
        blocks.append((s, t))
        s = t
    return blocks


def fat_ray_prefix(g: MetricGraph, route: Route, r: Any) -> FatModel | TooShort:
    """Alternate greedy blocks of a geodesic as branch sets (even) and paths (odd)."""
    r = as_rational(r)
    if r <= 0:
        raise GraphInputError("r must be positive")
    if not is_geodesic(g, route):
        raise ContractError("route is not a geodesic from its origin")
    if route.length <= r:
        return TooShort(route.length, r)
    blocks = ray_blocks(route, r)
    if len(blocks) % 2 == 0:
        # a trailing path block has no set after it: fold it into the last set
        a, _ = blocks[-2]
        blocks[-2:] = [(a, blocks[-1][1])]
    n_sets = (len(blocks) + 1) // 2
    pat = Pattern.path(n_sets - 1)
    sets, paths = {}, {}
    for i, (a, b) in enumerate(blocks):
        if i % 2 == 0:
            sets[i // 2] = route.sub(a, b).region()
        else:
            paths[(i // 2, i // 2 + 1)] = route.sub(a, b)
    model = FatModel(pat, sets, paths, r)
    return _checked(g, model, r, "fat ray")


@dataclass
class BadPairGraph:
    r: Fraction
    n: Fraction
    size: int
    edges: dict = field(default_factory=dict)  # (i, j) -> (v_i, v_j, distance)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "n": self.n,
            "routes": self.size,
            "bad_pairs": [{"pair": list(p), "witness": list(w)} for p, w in sorted(self.edges.items())],
        }


def _check_rooted_geodesics(g: MetricGraph, routes: list[Route]) -> None:
    if not routes:
        return
    o = routes[0].start
    for i, rt in enumerate(routes):
        if rt.start != o:
            raise ContractError(f"route {i} does not start at the common root")
        if not is_geodesic(g, rt):
            raise ContractError(f"route {i} is not a geodesic")


def bad_pair_graph(g: MetricGraph, routes: list[Route], r: Any, n: Any) -> BadPairGraph:
    """Pairs of rooted geodesics with vertices beyond n from the root at distance <= r."""
    r, n = as_rational(r), as_rational(n)
    _check_rooted_geodesics(g, routes)
    out = BadPairGraph(r, n, len(routes))
    if not routes:
        return out
    o = routes[0].start
    dist_o = vertex_distances(g, o)
    far = [[v for v in rt.vertex_sequence() if dist_o.get(v, 0) > n] for rt in routes]
    fields = {}
    for i in range(len(routes)):
        for j in range(i + 1, len(routes)):
            best = None
            for v in far[i]:
                if v not in fields:
                    fields[v] = vertex_distances(g, Region.of_vertices(g, [v]))
                for w in far[j]:
                    d = fields[v].get(w)
                    if d is not None and d <= r and (best is None or (d, vkey(v), vkey(w)) < (best[2], vkey(best[0]), vkey(best[1]))):
                        best = (v, w, d)
            if best is not None:
                out.edges[(i, j)] = best
    return out


def fat_star_of_paths(g: MetricGraph, routes: list[Route], r: Any, n: Any) -> FatModel:
    """r-fat model of the finite ⋁ of paths P_1, ..., P_m built from rooted geodesics."""
    r, n = as_rational(r), as_rational(n)
    if not routes:
        raise GraphInputError("need at least one geodesic")
    bad = bad_pair_graph(g, routes, r, n)
    if bad.edges:
        (i, j), w = min(bad.edges.items())
        raise ContractError(f"routes {i} and {j} form a bad pair (witness {w})")
    for idx, rt in enumerate(routes, 1):
        if rt.length <= 2 * idx * r + n:
            raise ContractError(f"route {idx} has length {rt.length} <= {2 * idx * r + n}")
    centre = "c"
    vertices, edges = [centre], []
    centre_region = routes[0].sub(0, n).region().union(*(rt.sub(0, n).region() for rt in routes[1:]))
    sets = {centre: centre_region}
    paths = {}
    for idx, rt in enumerate(routes, 1):
        cuts = [n + j * r for j in range(2 * idx)] + [rt.length]
        prev = centre
        for j in range(2 * idx):
            a, b = cuts[j], cuts[j + 1]
            if j % 2 == 0:
                nxt = (idx, j // 2 + 1)
                vertices.append(nxt)
                edges.append((prev, nxt))
                paths[_edge(prev, nxt)] = rt.sub(a, b)
            else:
                sets[(idx, j // 2 + 1)] = rt.sub(a, b).region()
                prev = (idx, j // 2 + 1)
    pat = Pattern.of(vertices, edges, f"V_{len(routes)}")
    model = FatModel(pat, sets, paths, r)
    return _checked(g, model, r, "fat star of paths")

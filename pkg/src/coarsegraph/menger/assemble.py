"""Turning a meta-bridge sequence into two far-apart A–Z paths."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from ..fatminor.constructions import InternalError
from ..metric.ops import _DSU, distance, far_set, shortest_route
from ..metric.region import Region, Route
from .bridges import BaseGeodesic, surrounds
from .meta import MetaBridge


@dataclass
class Colouring:
    """The two paths of the red/green game, with their shared current end."""

    paths: list
    t: Fraction
    steps: list


def _gamma_hits(base: BaseGeodesic, beta: Route) -> list[tuple[Fraction, Fraction, Fraction]]:
    """(β-parameter, γ-parameter range lo, hi) for each stretch of β on γ, with β-params at the range ends."""
    out = []
    for u, v in beta.hits(base.region()):
        gu = base.param(beta.point_at(u))
        gv = base.param(beta.point_at(v))
        out.append((u, gu, v, gv))
    return out


def _closest_on(base: BaseGeodesic, paths: list[Route], c0: Fraction) -> tuple[int, Fraction, Fraction]:
    """Path index, β-parameter and γ-parameter of the point of γ ∩ (β1 ∪ β2) closest to γ(c0)."""
    best = None
    for i, beta in enumerate(paths):
        for u, gu, v, gv in _gamma_hits(base, beta):
            lo, hi = min(gu, gv), max(gu, gv)
            s = min(max(c0, lo), hi)
            tb = u + abs(s - gu)
            key = (abs(s - c0), i, tb)
            if best is None or key < best[0]:
                best = (key, i, tb, s)
    if best is None:
        raise InternalError("neither path meets γ")
    return best[1], best[2], best[3]


def colour_paths(base: BaseGeodesic, metas: list[MetaBridge], spacing: Fraction) -> Colouring:
    """Red/green game along a perfect crossing sequence of meta-bridges."""
    ell = base.length
    first = metas[0]
    red = first.route
    if first.b1 == ell:
        return Colouring([red, base.segment(0, ell)], ell, ["first meta-bridge reaches Z"])
    paths = [red, base.segment(0, first.b1)]
    t = first.b1
    steps = [f"red {first.members} green γ[0, {t}]"]
    for c in metas[1:]:
        if not surrounds(c.b0, c.b1, t, spacing, ell):
            raise InternalError(f"meta-bridge {c.members} does not surround γ({t})")
        if not base.route.param_of(c.start) == c.b0:
            raise InternalError(f"meta-bridge {c.members} does not start on γ")
        i, tb, s = _closest_on(base, paths, c.b0)
        gi = paths[i].sub(0, tb).concat(base.segment(s, c.b0)).concat(c.route)
        other = paths[1 - i].concat(base.segment(t, c.b1))
        paths[i], paths[1 - i] = gi, other
        steps.append(f"{'red' if i == 0 else 'green'} reroutes at γ({s}) through {c.members}")
        t = c.b1
        if t == ell:
            return Colouring(paths, t, steps)
    raise InternalError("meta-bridges never reach Z")


# -- auxiliary construction -------------------------------------------------------

@dataclass
class AuxGraph:
    nodes: list  # γ-parameters or ("A", i)/("Z", i) anchored ends
    edges: list  # (u, v, kind, payload)
    group: dict  # node -> contracted node


def _node(base: BaseGeodesic, p, side: int, m_index: int):
    t = base.route.param_of(p)
    if t is not None:
        return t
    return ("A" if side == 0 else "Z", m_index)


def aux_graph(base: BaseGeodesic, metas: list[MetaBridge], short: Fraction) -> AuxGraph:
    ell = base.length
    gam = {Fraction(0), ell}
    edges = []
    for i, m in enumerate(metas):
        u, v = _node(base, m.start, 0, i), _node(base, m.end, 1, i)
        for x in (u, v):
            if not isinstance(x, tuple):
                gam.add(x)
        edges.append((u, v, "meta", i))
    pts = sorted(gam)
    for x, y in zip(pts, pts[1:]):
        edges.append((x, y, "gamma", (x, y)))
    nodes = pts + sorted({e[k] for e in edges for k in (0, 1) if isinstance(e[k], tuple)})
    dsu = _DSU()
    for x in nodes:
        dsu.find(x)
    for x, y in zip(pts, pts[1:]):
        if y - x < short:
            dsu.union(x, y)
    return AuxGraph(nodes, edges, {x: dsu.find(x) for x in nodes})


def two_disjoint_paths(nodes: list, edges: list, sources: set, sinks: set,
                       shared_ends: bool = False) -> list[list[tuple]] | None:
    """Two vertex-disjoint source-to-sink paths by augmenting unit vertex capacities.

    ``edges`` are (u, v) pairs of a multigraph; each path is returned as the list of
    (edge index, from node, to node) steps it uses, in order from its source.
    With ``shared_ends`` the source and sink nodes may carry both paths.
    """
    arcs: list = []  # [tail, head, residual, edge index or None, partner]
    out: dict = {}

    def add(x, y, e=None, c=1):
        out.setdefault(x, []).append(len(arcs))
        arcs.append([x, y, c, e, len(arcs) + 1])
        out.setdefault(y, []).append(len(arcs))
        arcs.append([y, x, 0, None, len(arcs) - 1])

    for v in nodes:
        add(("in", v), ("out", v), c=2 if shared_ends and (v in sources or v in sinks) else 1)
    for idx, (u, v) in enumerate(edges):
        if u != v:
            add(("out", u), ("in", v), idx)
            add(("out", v), ("in", u), idx)
    for v in sorted(sources, key=repr):
        add("s", ("in", v), c=2 if shared_ends else 1)
    for v in sorted(sinks, key=repr):
        add(("out", v), "t", c=2 if shared_ends else 1)
    for _ in range(2):
        prev = {"s": None}
        queue = deque(["s"])
        while queue and "t" not in prev:
            x = queue.popleft()
            for a in out.get(x, ()):
                y = arcs[a][1]
                if arcs[a][2] > 0 and y not in prev:
                    prev[y] = a
                    queue.append(y)
        if "t" not in prev:
            return None
        y = "t"
        while prev[y] is not None:
            a = prev[y]
            arcs[a][2] -= 1
            arcs[arcs[a][4]][2] += 1
            y = arcs[a][0]
    # forward arcs (even index) carry flow when their residual dropped to 0
    carried = {a: arcs[a + 1][2] for a in range(0, len(arcs), 2) if arcs[a + 1][2] > 0}
    paths = []
    for a0 in [a for a in carried if arcs[a][0] == "s" for _ in range(carried[a])]:
        carried[a0] -= 1
        x, path = arcs[a0][1], []
        while x != "t":
            a = next(a for a in out[x] if carried.get(a, 0) > 0)
            carried[a] -= 1
            if arcs[a][3] is not None:
                path.append((arcs[a][3], arcs[a][0][1], arcs[a][1][1]))
            x = arcs[a][1]
        paths.append(path)
    return paths


def aux_paths(base: BaseGeodesic, metas: list[MetaBridge], short: Fraction,
              shared_ends: bool = False) -> list[Route] | None:
    """Two A–Z paths through the contracted graph of meta-bridges and γ-edges."""
    ell = base.length
    aux = aux_graph(base, metas, short)
    grp = aux.group
    is_a = {x for x in aux.nodes if x == 0 or (isinstance(x, tuple) and x[0] == "A")}
    is_z = {x for x in aux.nodes if x == ell or (isinstance(x, tuple) and x[0] == "Z")}
    real = [e for e in aux.edges if grp[e[0]] != grp[e[1]]]
    gnodes = sorted(set(grp.values()), key=repr)
    res = two_disjoint_paths(gnodes, [(grp[u], grp[v]) for u, v, _, _ in real],
                             {grp[x] for x in is_a}, {grp[x] for x in is_z}, shared_ends)
    if res is None:
        return None
    a_groups = {grp[x]: x for x in sorted(is_a, key=repr)}
    z_groups = {grp[x]: x for x in sorted(is_z, key=repr)}
    routes = []
    for steps in res:
        first = steps[0][1] if steps else next(gr for gr in a_groups if gr in z_groups)
        cur = a_groups[first]
        pieces = [Route.trivial(base.g, _locus(base, metas, cur))]
        for idx, gu, _ in steps:
            u, v, kind, payload = real[idx]
            if grp[u] != gu:
                u, v = v, u
            if u != cur:
                pieces.append(base.segment(cur, u))
            pieces.append(_edge_route(base, metas, kind, payload, u))
            cur = v
        end = z_groups[grp[cur]]
        if end != cur:
            pieces.append(base.segment(cur, end))
        route = pieces[0]
        for piece in pieces[1:]:
            route = route.concat(piece)
        routes.append(route)
    return routes


def _locus(base: BaseGeodesic, metas: list[MetaBridge], x):
    if not isinstance(x, tuple):
        return base.point(x)
    m = metas[x[1]]
    return m.start if x[0] == "A" else m.end


def _edge_route(base: BaseGeodesic, metas: list[MetaBridge], kind: str, payload, u) -> Route:
    if kind == "gamma":
        x, y = payload
        return base.segment(x, y) if u == x else base.segment(y, x)
    r = metas[payload].route
    return r if _node(base, r.start, 0, payload) == u else r.reversed()


def _far_stretch(g, path: Route, other: Route, bound: Fraction) -> Route | None:
    hits = path.hits(far_set(g, other, bound))
    if not hits:
        return None
    u, v = max(hits, key=lambda iv: (iv[1] - iv[0], -iv[0]))
    return path.sub(u, v)


def reanchor(g, paths: list[Route], a, z, bound: Fraction) -> list[Route] | None:
    """Reconnect the mutually far stretches of two paths to A and Z, keeping them apart.

    Needed when a meta-bridge leg lands on γ(0) or γ(ℓ): the colouring then gives
    both paths the same end.  Each path keeps its longest stretch at distance >= bound
    from the other; new heads and tails are shortest routes avoiding everything
    already placed, tried in all four orders.  The caller re-verifies the result.
    """
    mids = [_far_stretch(g, paths[0], paths[1], bound), _far_stretch(g, paths[1], paths[0], bound)]
    if None in mids:
        return None
    for head_first in (0, 1):
        for tail_first in (0, 1):
            heads: list = [None, None]
            tails: list = [None, None]
            ok = True
            for ends, target, first in ((heads, a, head_first), (tails, z, tail_first)):
                for i in (first, 1 - first):
                    block = [mids[1 - i]] + [r for r in (heads[1 - i], tails[1 - i]) if r is not None]
                    allowed = far_set(g, Region.empty(g).union(*(r.region() for r in block)), bound)
                    if ends is heads:
                        r = shortest_route(g, target, mids[i].region(), allowed=allowed)
                    else:
                        r = shortest_route(g, mids[i].region(), target, allowed=allowed)
                    if r is None:
                        ok = False
                        break
                    ends[i] = r
                if not ok:
                    break
            if not ok:
                continue
            out = []
            for i in (0, 1):
                s0, s1 = mids[i].param_of(heads[i].end), mids[i].param_of(tails[i].start)
                out.append(heads[i].concat(mids[i].sub(s0, s1)).concat(tails[i]))
            return out
    return None


def same_path_check(g, metas: list[MetaBridge], paths: list[Route], close: Fraction) -> list[str]:
    """Meta-bridges with close opposite ends must not lie in different paths."""
    regions = [p.region() for p in paths]
    home = []
    for m in metas:
        r = m.region()
        home.append({j for j in (0, 1) if r.subset_of(regions[j])})
    out = []
    for i, b in enumerate(metas):
        for j, c in enumerate(metas):
            if i >= j or not home[i] or not home[j] or home[i] & home[j]:
                continue
            if distance(g, b.end, c.start) < close or distance(g, b.start, c.end) < close:
                out.append(f"meta-bridges {i} and {j} have close ends but lie in different paths")
    return out

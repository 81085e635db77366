"""Finite metric graphs with exact rational edge lengths, and points on them."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable, Iterable, Iterator, NamedTuple

INF = float("inf")

Vertex = Hashable
EdgeId = tuple  # canonical (u, v) with vkey(u) <= vkey(v)


class GraphInputError(ValueError):
    """Malformed graph, locus or region input."""


class CutPoint(NamedTuple):
    """Vertex id of a refinement vertex inserted on ``edge`` at ``offset``."""

    edge: tuple
    offset: Fraction


def vkey(v: Any) -> tuple:
    """Total order on heterogeneous vertex ids (used for every tie-break)."""
    if isinstance(v, CutPoint):
        return (4, vkey(v.edge[0]), vkey(v.edge[1]), v.offset)
    if isinstance(v, bool):
        return (3, str(v))
    if isinstance(v, int):
        return (0, v)
    if isinstance(v, str):
        return (1, v)
    if isinstance(v, tuple):
        return (2, tuple(vkey(x) for x in v))
    return (3, repr(v))


def as_rational(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise GraphInputError(f"float {x!r} is not an exact length; use 'p/q'")
    try:
        return Fraction(x)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise GraphInputError(f"not a rational: {x!r}") from exc


@dataclass(frozen=True)
class Locus:
    """A vertex, or a point at ``offset`` from ``edge[0]`` inside ``edge``.

    Build through :meth:`MetricGraph.point` so that offsets 0 and the full
    edge length collapse to the vertex form.
    """

    vertex: Any = None
    edge: tuple | None = None
    offset: Fraction = Fraction(0)

    @property
    def is_vertex(self) -> bool:
        return self.edge is None

    def key(self) -> tuple:
        if self.edge is None:
            return (0, vkey(self.vertex))
        return (1, vkey(self.edge[0]), vkey(self.edge[1]), self.offset)

    def __repr__(self) -> str:
        if self.edge is None:
            return f"Locus({self.vertex!r})"
        return f"Locus({self.edge!r}@{self.offset})"


def at(v: Vertex) -> Locus:
    return Locus(vertex=v)


class MetricGraph:
    """Immutable undirected graph; every edge carries a positive rational length.

    Parallel edges and self-loops are rejected.  Vertex ids may be any
    hashable; ordering uses :func:`vkey`.
    """

    def __init__(self, vertices: Iterable[Vertex] = (), edges: Iterable[tuple] = ()):
        adj: dict[Vertex, dict[Vertex, Fraction]] = {}
        for v in vertices:
            adj.setdefault(v, {})
        lengths: dict[EdgeId, Fraction] = {}
        for item in edges:
            if len(item) == 2:
                u, v = item
                length = Fraction(1)
            elif len(item) == 3:
                u, v, length = item
                length = as_rational(length)
            else:
                raise GraphInputError(f"bad edge spec {item!r}")
            if u == v:
                raise GraphInputError(f"self-loop at {u!r}")
            if length <= 0:
                raise GraphInputError(f"non-positive length on {u!r}-{v!r}")
            eid = self._canon(u, v)
            if eid in lengths:
                raise GraphInputError(f"parallel edge {u!r}-{v!r}")
            adj.setdefault(u, {})[v] = length
            adj.setdefault(v, {})[u] = length
            lengths[eid] = length
        self._adj = adj
        self._len = lengths
        self._order = sorted(adj, key=vkey)
        self._unit = all(x == 1 for x in lengths.values())

    @staticmethod
    def _canon(u: Vertex, v: Vertex) -> EdgeId:
        return (u, v) if vkey(u) <= vkey(v) else (v, u)

    # -- structure ---------------------------------------------------------
    @property
    def vertices(self) -> list:
        return list(self._order)

    @property
    def edges(self) -> list[EdgeId]:
        return sorted(self._len, key=lambda e: (vkey(e[0]), vkey(e[1])))

    def __len__(self) -> int:
        return len(self._order)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    @property
    def is_unit(self) -> bool:
        return self._unit

    def has_vertex(self, v: Vertex) -> bool:
        return v in self._adj

    def neighbors(self, v: Vertex) -> list:
        return sorted(self._adj[v], key=vkey)

    def adjacency(self, v: Vertex) -> dict:
        """Neighbour -> edge length (unsorted, read-only by convention)."""
        return self._adj[v]

    def degree(self, v: Vertex) -> int:
        return len(self._adj[v])

    def edge(self, u: Vertex, v: Vertex) -> EdgeId | None:
        if u in self._adj and v in self._adj[u]:
            return self._canon(u, v)
        return None

    def length(self, eid: EdgeId) -> Fraction:
        try:
            return self._len[eid]
        except KeyError:
            raise GraphInputError(f"unknown edge {eid!r}") from None

    def has_edge(self, eid: EdgeId) -> bool:
        return eid in self._len

    def incident_edges(self, v: Vertex) -> list[EdgeId]:
        return [self._canon(v, w) for w in self.neighbors(v)]

    # -- loci ----------------------------------------------------------------
    def point(self, edge: EdgeId | tuple, offset: Any) -> Locus:
        """Canonical locus at ``offset`` measured from ``edge[0]``."""
        u, v = edge
        eid = self._canon(u, v)
        length = self.length(eid)
        t = as_rational(offset)
        if eid[0] != u:
            t = length - t
        if t < 0 or t > length:
            raise GraphInputError(f"offset {offset} outside edge {eid!r}")
        if t == 0:
            return Locus(vertex=eid[0])
        if t == length:
            return Locus(vertex=eid[1])
        return Locus(edge=eid, offset=t)

    def check_locus(self, p: Locus) -> Locus:
        if p.edge is None:
            if p.vertex not in self._adj:
                raise GraphInputError(f"unknown vertex {p.vertex!r}")
            return p
        return self.point(p.edge, p.offset)

    def locus_ends(self, p: Locus) -> list[tuple[Vertex, Fraction]]:
        """(vertex, distance along the edge) pairs for the host-edge ends of ``p``."""
        if p.edge is None:
            return [(p.vertex, Fraction(0))]
        u, v = p.edge
        return [(u, p.offset), (v, self._len[p.edge] - p.offset)]

    # -- shortest paths ------------------------------------------------------
    def dijkstra(self, seeds: dict) -> dict:
        """Multi-source exact distances; ``seeds`` maps vertex -> initial distance."""
        if self._unit and all(d == 0 for d in seeds.values()):
            return self.bfs(seeds)
        dist: dict = {}
        heap = [(d, vkey(v), v) for v, d in seeds.items()]
        heapq.heapify(heap)
        while heap:
            d, _, v = heapq.heappop(heap)
            if v in dist:
                continue
            dist[v] = d
            for w, length in self._adj[v].items():
                if w not in dist:
                    heapq.heappush(heap, (d + length, vkey(w), w))
        return dist

    def bfs(self, sources: Iterable[Vertex], limit: int | None = None) -> dict:
        """Hop distances (ints) from ``sources``; ignores lengths."""
        dist = {s: 0 for s in sources}
        queue = deque(dist)
        while queue:
            v = queue.popleft()
            dv = dist[v]
            if limit is not None and dv >= limit:
                continue
            for w in self._adj[v]:
                if w not in dist:
                    dist[w] = dv + 1
                    queue.append(w)
        return dist

    def distances_from(self, v: Vertex) -> dict:
        return self.dijkstra({v: Fraction(0)}) if not self._unit else self.bfs([v])

    def components(self) -> list[list]:
        seen: set = set()
        out = []
        for v in self._order:
            if v in seen:
                continue
            comp = list(self.bfs([v]))
            seen.update(comp)
            out.append(sorted(comp, key=vkey))
        return out

    def is_connected(self) -> bool:
        return len(self._order) <= 1 or len(self.bfs([self._order[0]])) == len(self._order)

    def subgraph(self, vertices: Iterable[Vertex]) -> "MetricGraph":
        keep = set(vertices)
        return MetricGraph(keep, [(u, v, self._len[(u, v)]) for (u, v) in self._len if u in keep and v in keep])

    def iter_edges(self) -> Iterator[tuple[Vertex, Vertex, Fraction]]:
        for u, v in self.edges:
            yield u, v, self._len[(u, v)]

    def __repr__(self) -> str:
        return f"MetricGraph(|V|={len(self._order)}, |E|={len(self._len)})"


# -- small constructors used throughout tests and the CLI -------------------

def path_graph(n: int, length: Any = 1) -> MetricGraph:
    """Path on vertices 0..n with n edges."""
    return MetricGraph(range(n + 1), [(i, i + 1, length) for i in range(n)])


def cycle_graph(n: int) -> MetricGraph:
    return MetricGraph(range(n), [(i, (i + 1) % n) for i in range(n)])


def grid_graph(w: int, h: int) -> MetricGraph:
    edges = []
    for x in range(w):
        for y in range(h):
            if x + 1 < w:
                edges.append(((x, y), (x + 1, y)))
            if y + 1 < h:
                edges.append(((x, y), (x, y + 1)))
    return MetricGraph([(x, y) for x in range(w) for y in range(h)], edges)


def spider_graph(legs: int, leg_length: int) -> MetricGraph:
    """Centre 0; leg i has vertices (i, 1..leg_length)."""
    edges = []
    for i in range(legs):
        prev: Any = 0
        for j in range(1, leg_length + 1):
            edges.append((prev, (i, j)))
            prev = (i, j)
    return MetricGraph([0], edges)


def theta_graph(paths: int, length: int) -> MetricGraph:
    """``paths`` internally disjoint paths of ``length`` between 's' and 't'."""
    edges = []
    for i in range(paths):
        prev: Any = "s"
        for j in range(1, length):
            edges.append((prev, (i, j)))
            prev = (i, j)
        edges.append((prev, "t"))
    return MetricGraph(["s", "t"], edges)

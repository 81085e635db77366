"""Temporary refinement of a metric graph at rational cut points.

Once every segment end of the regions involved is a vertex of the refined
graph ``H``, each region is a plain set of H-vertices plus H-edges and all
distance questions become vertex questions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .graph import CutPoint, Locus, MetricGraph, at, vkey
from .region import Region, Route


def collect_cuts(g: MetricGraph, things: Iterable) -> set[tuple]:
    cuts: set[tuple] = set()
    for x in things:
        if x is None:
            continue
        if isinstance(x, Region):
            cuts |= x.cut_points()
        elif isinstance(x, Route):
            for p in x.points:
                if not p.is_vertex:
                    cuts.add((p.edge, p.offset))
        elif isinstance(x, Locus):
            if not x.is_vertex:
                cuts.add((x.edge, x.offset))
        else:
            raise TypeError(f"cannot refine at {type(x).__name__}")
    return cuts


class Refinement:
    """Refined graph ``h`` of ``g`` with translation helpers."""

    def __init__(self, g: MetricGraph, cuts: Iterable[tuple] = ()):
        self.g = g
        per: dict[tuple, set] = {}
        for eid, t in cuts:
            per.setdefault(eid, set()).add(Fraction(t))
        self.cuts = {e: sorted(ts) for e, ts in per.items()}
        if not self.cuts:
            self.h = g
            return
        edges = []
        for u, v, length in g.iter_edges():
            chain = [(Fraction(0), u)]
            for t in self.cuts.get((u, v), ()):
                chain.append((t, CutPoint((u, v), t)))
            chain.append((length, v))
            for (t0, x), (t1, y) in zip(chain, chain[1:]):
                edges.append((x, y, t1 - t0))
        self.h = MetricGraph(g.vertices, edges)

    @classmethod
    def around(cls, g: MetricGraph, *things) -> "Refinement":
        return cls(g, collect_cuts(g, things))

    # -- translation ---------------------------------------------------------
    def node(self, p: Locus):
        if p.is_vertex:
            return p.vertex
        node = CutPoint(p.edge, p.offset)
        if node not in self.h:
            raise KeyError(f"{p} is not a refinement vertex")
        return node

    def locus(self, x) -> Locus:
        if isinstance(x, CutPoint):
            return self.g.point(x.edge, x.offset)
        return at(x)

    def _chain(self, eid: tuple) -> list[tuple[Fraction, object]]:
        u, v = eid
        out = [(Fraction(0), u)]
        out += [(t, CutPoint(eid, t)) for t in self.cuts.get(eid, ())]
        out.append((self.g.length(eid), v))
        return out

    def host(self, hedge: tuple) -> tuple[tuple, Fraction, Fraction]:
        """Base edge and offset interval of an H-edge."""
        x, y = hedge
        px, py = self.locus(x), self.locus(y)
        for p in (px, py):
            if not p.is_vertex:
                eid = p.edge
                break
        else:
            eid = self.g.edge(x, y)
        length = self.g.length(eid)

        def off(p: Locus) -> Fraction:
            if p.is_vertex:
                return Fraction(0) if p.vertex == eid[0] else length
            return p.offset

        a, b = off(px), off(py)
        return eid, min(a, b), max(a, b)

    def discretize(self, r: Region) -> tuple[set, set]:
        """H-vertices and H-edges of a region (edges as canonical H edge ids)."""
        vs = set(r.vertices)
        es: set = set()
        for eid, a, b in r.iter_segments():
            chain = self._chain(eid)
            for t, x in chain:
                if a <= t <= b:
                    vs.add(x)
            for (t0, x), (t1, y) in zip(chain, chain[1:]):
                if a <= t0 and t1 <= b:
                    es.add(self.h.edge(x, y))
        return vs, es

    def region(self, vs: Iterable, es: Iterable = ()) -> Region:
        segs = []
        verts = []
        for x in vs:
            if isinstance(x, CutPoint):
                segs.append((x.edge, x.offset, x.offset))
            else:
                verts.append(x)
        for he in es:
            segs.append(self.host(he))
        return Region.build(self.g, verts, segs)

    def route(self, hpath: list) -> Route:
        """Map an H-vertex path back to a base route, dropping collinear cut points."""
        loci = [self.locus(x) for x in hpath]
        if len(loci) <= 2:
            return Route.of(self.g, loci)
        keep = [loci[0]]
        for i in range(1, len(loci) - 1):
            p = loci[i]
            if not p.is_vertex:
                prev_e = self.host(self.h.edge(hpath[i - 1], hpath[i]))[0]
                next_e = self.host(self.h.edge(hpath[i], hpath[i + 1]))[0]
                if prev_e == next_e:
                    continue
            keep.append(p)
        keep.append(loci[-1])
        return Route.of(self.g, keep)

    def hroute(self, route: Route) -> list:
        """H-vertex sequence traversed by a base route whose points are H-vertices."""
        out = [self.node(route.points[0])]
        for (eid, a, b), q in zip(route.steps, route.points[1:]):
            chain = self._chain(eid)
            inner = [x for t, x in chain if min(a, b) < t < max(a, b)]
            if b < a:
                inner.reverse()
            out.extend(inner)
            out.append(self.node(q))
        return out

    def sorted_nodes(self, nodes: Iterable) -> list:
        return sorted(nodes, key=vkey)

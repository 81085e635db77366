"""Closed subspaces (regions) and rectifiable paths (routes) of a metric graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .graph import GraphInputError, Locus, MetricGraph, as_rational, at, vkey


def _merge(intervals: Iterable[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    out: list[list[Fraction]] = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


@dataclass(frozen=True)
class Region:
    """A closed subset of a metric graph: vertices plus closed edge intervals.

    ``segments`` maps an edge id to merged, sorted intervals (offsets from
    ``edge[0]``).  Whenever an interval touches an edge end the end vertex is
    also listed in ``vertices``.  A degenerate interval ``(t, t)`` is a single
    interior point.
    """

    g: MetricGraph = field(compare=False, repr=False)
    vertices: frozenset
    segments: tuple  # ((edge, ((a, b), ...)), ...) sorted by edge

    # -- constructors --------------------------------------------------------
    @classmethod
    def build(cls, g: MetricGraph, vertices: Iterable = (), segments: Iterable[tuple] = ()) -> "Region":
        """``segments`` is an iterable of ``(edge, a, b)`` triples in any orientation."""
        vs = set()
        for v in vertices:
            if not g.has_vertex(v):
                raise GraphInputError(f"unknown vertex {v!r}")
            vs.add(v)
        per: dict[tuple, list] = {}
        for edge, a, b in segments:
            u, w = edge
            eid = g.edge(u, w)
            if eid is None:
                raise GraphInputError(f"unknown edge {edge!r}")
            length = g.length(eid)
            a, b = as_rational(a), as_rational(b)
            if eid[0] != u:
                a, b = length - a, length - b
            if a > b:
                a, b = b, a
            if a < 0 or b > length:
                raise GraphInputError(f"segment [{a}, {b}] outside edge {eid!r}")
            if a == 0:
                vs.add(eid[0])
            if b == length:
                vs.add(eid[1])
            if a == b and (a == 0 or a == length):
                continue
            per.setdefault(eid, []).append((a, b))
        segs = []
        for eid in sorted(per, key=lambda e: (vkey(e[0]), vkey(e[1]))):
            segs.append((eid, tuple(_merge(per[eid]))))
        return cls(g, frozenset(vs), tuple(segs))

    @classmethod
    def of_vertices(cls, g: MetricGraph, vertices: Iterable) -> "Region":
        return cls.build(g, vertices)

    @classmethod
    def induced(cls, g: MetricGraph, vertices: Iterable) -> "Region":
        """Vertex set together with every edge joining two of its members."""
        vs = set(vertices)
        segs = []
        for v in vs:
            for w in g.neighbors(v):
                if w in vs and vkey(v) < vkey(w):
                    eid = g.edge(v, w)
                    segs.append((eid, 0, g.length(eid)))
        return cls.build(g, vs, segs)

    @classmethod
    def of_loci(cls, g: MetricGraph, loci: Iterable[Locus]) -> "Region":
        vs, segs = [], []
        for p in loci:
            p = g.check_locus(p)
            if p.is_vertex:
                vs.append(p.vertex)
            else:
                segs.append((p.edge, p.offset, p.offset))
        return cls.build(g, vs, segs)

    @classmethod
    def whole(cls, g: MetricGraph) -> "Region":
        return cls.build(g, g.vertices, [(e, 0, g.length(e)) for e in g.edges])

    @classmethod
    def empty(cls, g: MetricGraph) -> "Region":
        return cls(g, frozenset(), ())

    # -- queries -------------------------------------------------------------
    def is_empty(self) -> bool:
        return not self.vertices and not self.segments

    @property
    def vertex_only(self) -> bool:
        return not self.segments

    def seg_map(self) -> dict:
        return dict(self.segments)

    def iter_segments(self):
        for eid, ivs in self.segments:
            for a, b in ivs:
                yield eid, a, b

    def contains(self, p: Locus) -> bool:
        if p.is_vertex:
            return p.vertex in self.vertices
        for a, b in self.seg_map().get(p.edge, ()):
            if a <= p.offset <= b:
                return True
        return False

    def cut_points(self) -> set[tuple]:
        """Interior (edge, offset) points where segments start or end."""
        cuts = set()
        for eid, a, b in self.iter_segments():
            length = self.g.length(eid)
            for t in (a, b):
                if 0 < t < length:
                    cuts.add((eid, t))
        return cuts

    def union(self, *others: "Region") -> "Region":
        vs = set(self.vertices)
        segs = list(self.iter_segments())
        for o in others:
            vs |= o.vertices
            segs.extend(o.iter_segments())
        return Region.build(self.g, vs, segs)

    def intersection(self, other: "Region") -> "Region":
        vs = self.vertices & other.vertices
        segs = []
        om = other.seg_map()
        for eid, a, b in self.iter_segments():
            for x, y in om.get(eid, ()):
                s, t = max(a, x), min(b, y)
                if s <= t:
                    segs.append((eid, s, t))
        # a vertex of one region inside a segment end of the other is already a shared vertex
        return Region.build(self.g, vs, segs)

    def subset_of(self, other: "Region") -> bool:
        if not self.vertices <= other.vertices:
            return False
        om = other.seg_map()
        for eid, a, b in self.iter_segments():
            ivs = list(om.get(eid, ()))
            if any(x <= a and b <= y for x, y in ivs):
                continue
            return False
        return True

    def loci(self) -> list[Locus]:
        """Vertices plus the end points of every segment (sufficient sample for most checks)."""
        pts = {at(v) for v in self.vertices}
        for eid, a, b in self.iter_segments():
            pts.add(self.g.point(eid, a))
            pts.add(self.g.point(eid, b))
        return sorted(pts, key=Locus.key)

    def sorted_vertices(self) -> list:
        return sorted(self.vertices, key=vkey)

    def __repr__(self) -> str:
        segs = ", ".join(f"{e}:{[(str(a), str(b)) for a, b in iv]}" for e, iv in self.segments)
        return f"Region(V={self.sorted_vertices()!r}{', ' + segs if segs else ''})"


def _common_edge(g: MetricGraph, p: Locus, q: Locus) -> tuple[tuple, Fraction, Fraction]:
    """Edge containing both loci and their offsets on it."""
    if p.is_vertex and q.is_vertex:
        eid = g.edge(p.vertex, q.vertex)
        if eid is None:
            raise GraphInputError(f"loci {p} and {q} share no edge")
        length = g.length(eid)
        return eid, (Fraction(0) if p.vertex == eid[0] else length), (Fraction(0) if q.vertex == eid[0] else length)
    eid = p.edge if not p.is_vertex else q.edge
    length = g.length(eid)

    def off(x: Locus) -> Fraction:
        if x.is_vertex:
            if x.vertex == eid[0]:
                return Fraction(0)
            if x.vertex == eid[1]:
                return length
            raise GraphInputError(f"loci {p} and {q} share no edge")
        if x.edge != eid:
            raise GraphInputError(f"loci {p} and {q} share no edge")
        return x.offset

    return eid, off(p), off(q)


@dataclass(frozen=True)
class Route:
    """A path given by consecutive loci, each pair lying on a common edge."""

    g: MetricGraph = field(compare=False, repr=False)
    points: tuple
    steps: tuple = field(compare=False, repr=False)  # (edge, from_offset, to_offset)
    params: tuple = field(compare=False, repr=False)  # cumulative arc length at each point

    @classmethod
    def of(cls, g: MetricGraph, loci: Sequence[Locus]) -> "Route":
        if not loci:
            raise GraphInputError("empty route")
        pts: list[Locus] = []
        for p in loci:
            p = g.check_locus(p)
            if pts and pts[-1] == p:
                continue
            pts.append(p)
        steps, params = [], [Fraction(0)]
        for p, q in zip(pts, pts[1:]):
            eid, a, b = _common_edge(g, p, q)
            steps.append((eid, a, b))
            params.append(params[-1] + abs(b - a))
        return cls(g, tuple(pts), tuple(steps), tuple(params))

    @classmethod
    def of_vertices(cls, g: MetricGraph, vertices: Sequence) -> "Route":
        return cls.of(g, [at(v) for v in vertices])

    @classmethod
    def trivial(cls, g: MetricGraph, p: Locus) -> "Route":
        return cls.of(g, [p])

    @property
    def length(self) -> Fraction:
        return self.params[-1]

    @property
    def start(self) -> Locus:
        return self.points[0]

    @property
    def end(self) -> Locus:
        return self.points[-1]

    def point_at(self, t: Any) -> Locus:
        t = as_rational(t)
        if t < 0 or t > self.length:
            raise GraphInputError(f"parameter {t} outside [0, {self.length}]")
        for i, (eid, a, b) in enumerate(self.steps):
            if t <= self.params[i + 1]:
                s = t - self.params[i]
                return self.g.point(eid, a + s if b >= a else a - s)
        return self.points[-1]

    def sub(self, t0: Any, t1: Any) -> "Route":
        """Subroute between parameters ``t0 <= t1``."""
        t0, t1 = as_rational(t0), as_rational(t1)
        if t0 > t1:
            return self.sub(t1, t0).reversed()
        pts = [self.point_at(t0)]
        for i, p in enumerate(self.points):
            if t0 < self.params[i] < t1:
                pts.append(p)
        pts.append(self.point_at(t1))
        return Route.of(self.g, pts)

    def reversed(self) -> "Route":
        return Route.of(self.g, list(reversed(self.points)))

    def concat(self, other: "Route") -> "Route":
        if self.end != other.start:
            raise GraphInputError(f"cannot join route ending at {self.end} to one starting at {other.start}")
        return Route.of(self.g, list(self.points) + list(other.points[1:]))

    def region(self) -> Region:
        segs = [(eid, a, b) for eid, a, b in self.steps]
        vs = [p.vertex for p in self.points if p.is_vertex]
        if not self.steps and not self.points[0].is_vertex:
            p = self.points[0]
            segs.append((p.edge, p.offset, p.offset))
        return Region.build(self.g, vs, segs)

    def param_of(self, p: Locus) -> Fraction | None:
        """First parameter at which the route passes through ``p``."""
        for i, q in enumerate(self.points):
            if q == p:
                return self.params[i]
            if i < len(self.steps):
                eid, a, b = self.steps[i]
                if not p.is_vertex and p.edge == eid and min(a, b) < p.offset < max(a, b):
                    return self.params[i] + abs(p.offset - a)
        return None

    def hits(self, region: Region) -> list[tuple[Fraction, Fraction]]:
        """Closed parameter intervals where the route lies in ``region`` (merged)."""
        out = []
        for i, p in enumerate(self.points):
            if region.contains(p):
                out.append((self.params[i], self.params[i]))
        segs = region.seg_map()
        for i, (eid, a, b) in enumerate(self.steps):
            lo, hi = min(a, b), max(a, b)
            for x, y in segs.get(eid, ()):
                s, t = max(lo, x), min(hi, y)
                if s > t:
                    continue
                if b >= a:
                    out.append((self.params[i] + s - a, self.params[i] + t - a))
                else:
                    out.append((self.params[i] + a - t, self.params[i] + a - s))
        return _merge(out)

    def is_simple(self) -> bool:
        if len(set(self.points)) != len(self.points):
            return False
        per: dict = {}
        for eid, a, b in self.steps:
            per.setdefault(eid, []).append((min(a, b), max(a, b)))
        for ivs in per.values():
            ivs.sort()
            for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
                if a2 < b1:
                    return False
        return True

    def vertex_sequence(self) -> list:
        return [p.vertex for p in self.points if p.is_vertex]

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"Route({list(self.points)!r}, length={self.length})"

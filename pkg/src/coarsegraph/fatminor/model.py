"""Pattern graphs, fat minor models and their verification."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ..metric.graph import INF, GraphInputError, MetricGraph, as_rational, vkey
from ..metric.ops import components, dijkstra
from ..metric.refine import Refinement
from ..metric.region import Region, Route


def _edge(u: Any, w: Any) -> tuple:
    return (u, w) if vkey(u) <= vkey(w) else (w, u)


@dataclass(frozen=True)
class Pattern:
    """A small simple graph Δ whose fat minors we look for."""

    vertices: tuple
    edges: tuple
    name: str = "H"

    @classmethod
    def of(cls, vertices, edges, name: str = "H") -> "Pattern":
        vs = tuple(sorted(set(vertices) | {x for e in edges for x in e}, key=vkey))
        es = set()
        for u, w in edges:
            if u == w:
                raise GraphInputError("pattern graphs are simple")
            es.add(_edge(u, w))
        return cls(vs, tuple(sorted(es, key=lambda e: (vkey(e[0]), vkey(e[1])))), name)

    @classmethod
    def complete(cls, n: int) -> "Pattern":
        return cls.of(range(1, n + 1), [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)], f"K_{n}")

    @classmethod
    def star(cls, m: int) -> "Pattern":
        """K_{1,m}: centre 0, leaves 1..m."""
        return cls.of(range(m + 1), [(0, i) for i in range(1, m + 1)], f"K_1,{m}")

    @classmethod
    def path(cls, n: int) -> "Pattern":
        """Path with n edges on vertices 0..n."""
        return cls.of(range(n + 1), [(i, i + 1) for i in range(n)], f"P_{n}")

    @classmethod
    def cycle(cls, n: int) -> "Pattern":
        return cls.of(range(n), [(i, (i + 1) % n) for i in range(n)], f"C_{n}")

    def degree(self, v: Any) -> int:
        return sum(v in e for e in self.edges)

    def neighbors(self, v: Any) -> list:
        return sorted((w for e in self.edges if v in e for w in e if w != v), key=vkey)

    def subdivide(self, e: tuple, new: Any) -> "Pattern":
        e = _edge(*e)
        if e not in self.edges:
            raise GraphInputError(f"{e!r} is not a pattern edge")
        if new in self.vertices:
            raise GraphInputError(f"{new!r} already a pattern vertex")
        es = [f for f in self.edges if f != e] + [(e[0], new), (new, e[1])]
        return Pattern.of(list(self.vertices) + [new], es, f"{self.name}'")

    def to_json(self) -> dict:
        return {"name": self.name, "vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}


@dataclass
class FatModel:
    pattern: Pattern
    branch_sets: dict  # pattern vertex -> Region
    branch_paths: dict  # pattern edge (canonical) -> Route
    level: Fraction = Fraction(0)

    def items(self) -> list[tuple[tuple, Region]]:
        out = [(("B", v), self.branch_sets[v]) for v in self.pattern.vertices]
        out += [(("P", e), self.branch_paths[e].region()) for e in self.pattern.edges]
        return out

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern.to_json(),
            "level": self.level,
            "branch_sets": [{"vertex": v, "region": self.branch_sets[v]} for v in self.pattern.vertices],
            "branch_paths": [{"edge": list(e), "route": self.branch_paths[e]} for e in self.pattern.edges],
        }


def exempt(a: tuple, b: tuple) -> bool:
    """Pairs not subject to the distance condition: identical items, or a set and an incident path."""
    if a == b:
        return True
    kinds = {a[0], b[0]}
    if kinds != {"B", "P"}:
        return False
    (_, v), (_, e) = (a, b) if a[0] == "B" else (b, a)
    return v in e


@dataclass
class FatVerdict:
    ok: bool
    structural_ok: bool
    fatness: Fraction | float
    k: Fraction
    failure: dict | None = None
    closest_pair: tuple | None = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "structural_ok": self.structural_ok,
            "fatness": self.fatness,
            "k": self.k,
            "failure": self.failure,
            "closest_pair": list(self.closest_pair) if self.closest_pair else None,
        }


def _name(item: tuple) -> str:
    kind, x = item
    return f"B[{x}]" if kind == "B" else f"P[{x[0]}-{x[1]}]"


def verify_fat_model(g: MetricGraph, model: FatModel, k: Any) -> FatVerdict:
    """Check both conditions of a K-fat minor; also report the exact fatness."""
    k = as_rational(k)
    pat = model.pattern

    def fail(kind: str, *names, **extra) -> FatVerdict:
        info = {"kind": kind, "items": [_name(n) for n in names], **extra}
        return FatVerdict(False, False, Fraction(0), k, info)

    for v in pat.vertices:
        b = model.branch_sets.get(v)
        if b is None or b.is_empty():
            return fail("missing-branch-set", ("B", v))
        if len(components(g, b)) != 1:
            return fail("disconnected-branch-set", ("B", v))
    for e in pat.edges:
        p = model.branch_paths.get(e)
        if p is None:
            return fail("missing-branch-path", ("P", e))
        if p.length == 0 or not p.is_simple():
            return fail("path-not-an-arc", ("P", e))

    items = model.items()
    ref = Refinement.around(g, *(r for _, r in items))
    disc = {name: ref.discretize(r) for name, r in items}

    for i, (a, _) in enumerate(items):
        for b, _ in items[i + 1:]:
            if a[0] == "B" and b[0] == "B" or a[0] == "P" and b[0] == "P":
                if disc[a][0] & disc[b][0]:
                    return fail("overlap", a, b)
    for e in pat.edges:
        pe = ("P", e)
        route = model.branch_paths[e]
        pv = disc[pe][0]
        s, t = ref.node(route.start), ref.node(route.end)
        for v in pat.vertices:
            common = pv & disc[("B", v)][0]
            if v in e:
                if not common <= {s, t} or not common:
                    return fail("path-meets-own-set-inside", pe, ("B", v))
            elif common:
                return fail("path-meets-third-set", pe, ("B", v))
        bu, bw = disc[("B", e[0])][0], disc[("B", e[1])][0]
        if not ((s in bu and t in bw) or (s in bw and t in bu)):
            return fail("path-endpoints", pe)
        if len(pv & (bu | bw)) != 2:
            return fail("path-endpoints", pe)

    best: Fraction | float = INF
    pair = None
    h = ref.h
    for i, (a, _) in enumerate(items):
        later = [b for b, _ in items[i + 1:] if not exempt(a, b)]
        if not later:
            continue
        dist = dijkstra(h, disc[a][0])
        for b in later:
            d = min((dist[x] for x in disc[b][0] if x in dist), default=INF)
            if d < best:
                best, pair = d, (_name(a), _name(b))
    if best != INF:
        best = Fraction(best)
    ok = best >= k
    failure = None if ok else {"kind": "too-close", "items": list(pair), "distance": best}
    return FatVerdict(ok, True, best, k, failure, pair)


def model_from_vertex_sets(g: MetricGraph, pattern: Pattern, sets: dict, paths: dict, level: Any = 0) -> FatModel:
    """Convenience constructor: vertex sets (induced) and vertex-sequence paths."""
    bs = {v: Region.induced(g, sets[v]) for v in pattern.vertices}
    ps = {}
    for e in pattern.edges:
        seq = paths.get(e, paths.get((e[1], e[0])))
        ps[e] = Route.of_vertices(g, seq)
    return FatModel(pattern, bs, ps, as_rational(level))

"""Exhaustive search for vertex-granular fat minors, and classical minor tests."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from ..metric.graph import GraphInputError, MetricGraph, as_rational, vkey
from ..metric.ops import dijkstra
from ..metric.region import Region, Route
from .model import FatModel, Pattern, verify_fat_model


class BudgetExhausted(RuntimeError):
    """The search ran out of steps before settling the question."""


@dataclass
class SearchResult:
    status: str  # "found" | "none" | "budget"
    model: FatModel | None = None
    steps: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"


class _Indexer:
    def __init__(self, g: MetricGraph):
        self.g = g
        self.order = g.vertices
        self.index = {v: i for i, v in enumerate(self.order)}
        self.nbr = [0] * len(self.order)
        for i, v in enumerate(self.order):
            for w in g.adjacency(v):
                self.nbr[i] |= 1 << self.index[w]

    def members(self, mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    def verts(self, mask: int) -> list:
        return [self.order[i] for i in self.members(mask)]


def iter_connected_sets(ix: _Indexer, max_size: int, allowed: int | None = None):
    """Connected vertex sets (bitmasks) up to ``max_size``, lazily in (size, ids) order."""
    full = (1 << len(ix.order)) - 1 if allowed is None else allowed
    level = {1 << i for i in ix.members(full)}
    size = 1
    while level and size <= max_size:
        yield from sorted(level, key=lambda m: ix.members(m))
        if size == max_size:
            break
        nxt = set()
        for m in level:
            frontier = 0
            for i in ix.members(m):
                frontier |= ix.nbr[i]
            frontier &= full & ~m
            for j in ix.members(frontier):
                nxt.add(m | (1 << j))
        level = nxt
        size += 1


def connected_sets(ix: _Indexer, max_size: int, allowed: int | None = None) -> list[int]:
    return list(iter_connected_sets(ix, max_size, allowed))


def _near_masks(ix: _Indexer, k: Fraction) -> list[int]:
    """Mask of vertices at distance < k from each vertex."""
    out = []
    for v in ix.order:
        m = 0
        if k > 0:
            for w, d in dijkstra(ix.g, [v], limit=k).items():
                if d < k:
                    m |= 1 << ix.index[w]
        out.append(m)
    return out


def _mask_diam_at_least(ix: _Indexer, mask: int, k: Fraction, near: list[int]) -> bool:
    """Some pair of members is at distance >= k."""
    if k <= 0:
        return True
    return any(mask & ~near[i] for i in ix.members(mask))


def search_fat_minor(g: MetricGraph, pattern: Pattern, k: Any, size_budget: int,
                     step_budget: int = 2_000_000) -> SearchResult:
    """Find a k-fat model with connected vertex branch sets and simple vertex paths.

    Branch sets are tried in (size, vertex ids) order per pattern vertex; paths
    are chordless and tried in depth-first order with sorted neighbours.
    Exhaustion over that space returns ``none``; running out of steps returns
    ``budget``.
    """
    k = as_rational(k)
    ix = _Indexer(g)
    near = _near_masks(ix, k)
    sets = connected_sets(ix, size_budget)
    need_diam = {v: pattern.degree(v) >= 2 for v in pattern.vertices}
    diam_ok = {m: _mask_diam_at_least(ix, m, k, near) for m in sets}
    zone_cache: dict[int, int] = {}

    def zone(mask: int) -> int:
        z = zone_cache.get(mask)
        if z is None:
            z = mask
            for i in ix.members(mask):
                z |= near[i]
            zone_cache[mask] = z
        return z

    # placement order: each vertex followed by its edges to earlier vertices
    plan: list[tuple] = []
    placed: list = []
    for v in pattern.vertices:
        plan.append(("B", v))
        for u in placed:
            e = (u, v) if (u, v) in pattern.edges else (v, u)
            if e in pattern.edges:
                plan.append(("P", e))
        placed.append(v)

    steps = 0
    chosen: dict[tuple, int] = {}

    def blocked(item: tuple) -> int:
        """Vertices the new item may not use (occupied or too close)."""
        forb = 0
        for other, m in chosen.items():
            if _is_exempt(item, other):
                continue
            forb |= zone(m)
        return forb

    def occupied() -> int:
        occ = 0
        for m in chosen.values():
            occ |= m
        return occ

    def paths(e: tuple):
        nonlocal steps
        bu, bw = chosen[("B", e[0])], chosen[("B", e[1])]
        item = ("P", e)
        forb = blocked(item)
        interior_forb = forb | occupied()
        starts = [i for i in ix.members(bu & ~forb)]
        targets = bw & ~forb
        for s in starts:
            def rec(cur: int, used: int, seq: list):
                nonlocal steps
                steps += 1
                if steps > step_budget:
                    raise BudgetExhausted
                nb = ix.nbr[cur]
                hit = nb & targets
                if hit:
                    for t in ix.members(hit):
                        if len(seq) > 1 and _has_chord(ix, seq, t):
                            continue
                        yield seq + [t], used | (1 << t)
                for w in ix.members(nb & ~interior_forb & ~used):
                    if _has_chord(ix, seq, w):
                        continue
                    seq.append(w)
                    yield from rec(w, used | (1 << w), seq)
                    seq.pop()

            yield from rec(s, 1 << s, [s])

    def room_left(pos: int) -> bool:
        """Every branch set still to be placed has some admissible candidate."""
        occ = occupied()
        for item in plan[pos:]:
            if item[0] != "B":
                continue
            forb = blocked(item) | occ
            v = item[1]
            if not any(not (m & forb) and (diam_ok[m] or not need_diam[v]) for m in sets):
                return False
        return True

    def dfs(pos: int):
        nonlocal steps
        if pos == len(plan):
            yield dict(chosen)
            return
        item = plan[pos]
        if item[0] == "B":
            forb = blocked(item) | occupied()
            for m in sets:
                if m & forb:
                    continue
                if need_diam[item[1]] and not diam_ok[m]:
                    continue
                steps += 1
                if steps > step_budget:
                    raise BudgetExhausted
                chosen[item] = m
                if not room_left(pos + 1):
                    del chosen[item]
                    continue
                yield from dfs(pos + 1)
                del chosen[item]
        else:
            for seq, m in paths(item[1]):
                chosen[item] = m
                seqs[item[1]] = list(seq)
                yield from dfs(pos + 1)
                del chosen[item]

    seqs: dict = {}
    try:
        for sol in dfs(0):
            sets_v = {v: ix.verts(sol[("B", v)]) for v in pattern.vertices}
            model = FatModel(
                pattern,
                {v: Region.induced(g, sets_v[v]) for v in pattern.vertices},
                {e: Route.of_vertices(g, [ix.order[i] for i in seqs[e]]) for e in pattern.edges},
                k,
            )
            verdict = verify_fat_model(g, model, k)
            if verdict.ok:
                return SearchResult("found", model, steps)
    except BudgetExhausted:
        return SearchResult("budget", None, steps)
    return SearchResult("none", None, steps)


def _is_exempt(a: tuple, b: tuple) -> bool:
    if a[0] == b[0]:
        return False
    (_, v), (_, e) = (a, b) if a[0] == "B" else (b, a)
    return v in e


def _has_chord(ix: _Indexer, seq: list, w: int) -> bool:
    """w adjacent to a path vertex other than the current last one."""
    mask = 0
    for i in seq[:-1]:
        mask |= 1 << i
    return bool(ix.nbr[w] & mask)


# -- classical minors -----------------------------------------------------------

def _star_minor_by_degree(g: MetricGraph) -> bool:
    return any(g.degree(v) >= 3 for v in g.vertices)


def minor_test(g: MetricGraph, pattern: Pattern, budget: int = 2_000_000, exhaustive: bool = False) -> bool:
    """Classical (0-fat) minor containment.

    K_{1,3} uses the fact that a graph without it has maximum degree ≤ 2
    (paths and cycles), unless ``exhaustive`` forces the generic search.
    """
    if pattern.name.startswith("K_1,") and not exhaustive:
        m = len(pattern.vertices) - 1
        if m <= 0:
            return len(g) >= 1
        if m == 1:
            return bool(g.edges)
        if m == 2:
            return any(g.degree(v) >= 2 for v in g.vertices)
        if m == 3:
            return _star_minor_by_degree(g)
        return _star_minor_search(g, m, budget)
    if len(pattern.vertices) > 8:
        raise BudgetExhausted("pattern too large for exhaustive minor search")
    return _generic_minor(g, pattern, budget)


def _star_minor_search(g: MetricGraph, m: int, budget: int) -> bool:
    return star_minor_model(g, m, budget) is not None


def star_minor_model(g: MetricGraph, m: int, budget: int = 2_000_000, leaf_ok=None) -> tuple[list, list] | None:
    """A K_{1,m} minor with single-vertex leaves: (centre set, leaves), or None.

    Such a minor exists iff some connected set has m neighbours outside it;
    ``leaf_ok`` optionally restricts which vertices may serve as leaves.
    """
    ix = _Indexer(g)
    ok_mask = 0
    for i, v in enumerate(ix.order):
        if leaf_ok is None or leaf_ok(v):
            ok_mask |= 1 << i
    steps = 0
    for mask in iter_connected_sets(ix, len(ix.order)):
        steps += 1
        if steps > budget:
            raise BudgetExhausted("star minor search")
        nb = 0
        for i in ix.members(mask):
            nb |= ix.nbr[i]
        leaves = ix.members(nb & ~mask & ok_mask)
        if len(leaves) >= m:
            return ix.verts(mask), [ix.order[i] for i in leaves[:m]]
    return None


def _generic_minor(g: MetricGraph, pattern: Pattern, budget: int) -> bool:
    ix = _Indexer(g)
    n = len(ix.order)
    sets = connected_sets(ix, max(1, n - len(pattern.vertices) + 1))
    nbhd = {}
    for m in sets:
        nb = 0
        for i in ix.members(m):
            nb |= ix.nbr[i]
        nbhd[m] = nb
    order = list(pattern.vertices)
    steps = 0

    def rec(pos: int, chosen: dict, used: int) -> bool:
        nonlocal steps
        if pos == len(order):
            return True
        v = order[pos]
        for m in sets:
            steps += 1
            if steps > budget:
                raise BudgetExhausted("minor search")
            if m & used:
                continue
            if all(nbhd[m] & chosen[u] for u in pattern.neighbors(v) if u in chosen):
                chosen[v] = m
                if rec(pos + 1, chosen, used | m):
                    return True
                del chosen[v]
        return False

    return rec(0, {}, 0)

"""Exhaustive search for n pairwise far A–Z paths (a small-instance oracle)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..metric.graph import GraphInputError, MetricGraph, as_rational, vkey


@dataclass
class FarPathsResult:
    status: str  # "found", "none" or "budget"
    paths: list = field(default_factory=list)
    steps: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"


class _Budget(Exception):
    pass


def far_paths_bruteforce(g: MetricGraph, a: Any, z: Any, n: int, r: Any, budget: int = 1_000_000) -> FarPathsResult:
    """n vertex paths from A to Z, pairwise at distance >= r, or a proof by exhaustion that none exist.

    Paths start at their last A vertex and end at their first Z vertex, which loses
    nothing: trimming a path never brings it closer to another.
    """
    r = as_rational(r)
    a, z = set(a), set(z)
    for v in a | z:
        if not g.has_vertex(v):
            raise GraphInputError(f"unknown vertex {v!r}")
    if n < 1:
        raise GraphInputError("n must be at least 1")
    dist = {v: g.distances_from(v) for v in g.vertices}
    steps = [0]

    def tick():
        steps[0] += 1
        if steps[0] > budget:
            raise _Budget

    def simple_paths(allowed: set):
        for s in sorted(a & allowed, key=vkey):
            if s in z:
                yield [s]
                continue
            stack = [(s, [s])]
            while stack:
                v, path = stack.pop()
                for w in sorted(g.neighbors(v), key=vkey, reverse=True):
                    tick()
                    if w not in allowed or w in path or w in a:
                        continue
                    if w in z:
                        yield path + [w]
                    else:
                        stack.append((w, path + [w]))

    def far_from(path: list, allowed: set) -> set:
        return {v for v in allowed if all(dist[u].get(v, float("inf")) >= r for u in path)}

    def search(chosen: list, allowed: set):
        if len(chosen) == n:
            return list(chosen)
        for p in simple_paths(allowed):
            found = search(chosen + [p], far_from(p, allowed))
            if found:
                return found
        return None

    try:
        res = search([], set(g.vertices))
    except _Budget:
        return FarPathsResult("budget", [], steps[0])
    if res is None:
        return FarPathsResult("none", [], steps[0])
    return FarPathsResult("found", res, steps[0])


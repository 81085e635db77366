"""Two-path coarse Menger: a small separator or two far-apart A–Z paths."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ..fatminor.constructions import InternalError
from ..metric.graph import GraphInputError, MetricGraph, as_rational
from ..metric.ops import as_region, ball, diameter, distance_regions, far_set, separates, shortest_route
from ..metric.region import Region, Route
from .assemble import aux_paths, colour_paths, reanchor, same_path_check
from .bridges import BaseGeodesic, build_cover, disjoint_spot_check, perfect_subsequence
from .meta import build_meta_bridges, check_meta

log = logging.getLogger(__name__)

MODES = ("primary", "aux")


@dataclass
class MengerOutcome:
    branch: str  # "separator" or "paths"
    k: Fraction
    a: Fraction  # distance the two paths are guaranteed to keep
    mode: str
    separator: Region | None = None
    center: Any = None
    paths: tuple | None = None
    path_distance: Fraction | None = None
    report: dict = field(default_factory=dict)
    repairs: list = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return bool(self.report.get("verified"))

    def to_json(self) -> dict:
        out: dict = {"branch": self.branch, "k": self.k, "a": self.a, "mode": self.mode,
                     "verified": self.verified, "repairs": list(self.repairs)}
        if self.separator is not None:
            out["separator"] = {"region": self.separator, "center": self.center,
                                "diameter": self.report.get("diameter")}
        if self.paths is not None:
            out["paths"] = list(self.paths)
            out["vertex_paths"] = [p.vertex_sequence() for p in self.paths]
            out["distance"] = self.path_distance
        out["report"] = {k: v for k, v in self.report.items() if k != "verified"}
        return out


def vertex_region(g: MetricGraph, x: Any) -> Region:
    """Region from a Region/Locus/Route or from a collection of vertex ids."""
    if isinstance(x, (list, tuple, set, frozenset)):
        missing = [v for v in x if not g.has_vertex(v)]
        if missing:
            raise GraphInputError(f"unknown vertices {missing}")
        return Region.of_vertices(g, x)
    return as_region(g, x)


def path_bound(k: Fraction, mode: str) -> Fraction:
    return k / 272 if mode == "primary" else k / 680


def verify_separator(g: MetricGraph, s: Region, a: Region, z: Region, k: Fraction) -> tuple[bool, Fraction]:
    d = diameter(g, s) if not s.is_empty() else Fraction(0)
    return separates(g, s, a, z) and d <= k, d


def verify_paths(g: MetricGraph, paths: tuple, a: Region, z: Region, bound: Fraction) -> tuple[bool, Fraction]:
    p1, p2 = paths
    d = distance_regions(g, p1, p2)
    ends_ok = all(a.contains(p.start) and z.contains(p.end) for p in paths)
    return ends_ok and d >= bound, d


def _separator_outcome(g, s: Region, center, a, z, k, mode, report, repairs=()) -> MengerOutcome:
    ok, d = verify_separator(g, s, a, z, k)
    if not ok:
        raise InternalError(f"separator failed verification (diameter {d})")
    report = dict(report, verified=True, diameter=d)
    return MengerOutcome("separator", k, path_bound(k, mode), mode, separator=s, center=center,
                         report=report, repairs=list(repairs))


def _paths_outcome(g, paths, a, z, k, mode, bound, report, repairs=()) -> MengerOutcome | None:
    ok, d = verify_paths(g, tuple(paths), a, z, bound)
    if not ok:
        return None
    return MengerOutcome("paths", k, bound, mode, paths=tuple(paths), path_distance=d,
                         report=dict(report, verified=True), repairs=list(repairs))


def menger2(g: MetricGraph, a: Any, z: Any, k: Any, mode: str = "aux") -> MengerOutcome:
    """Either a set of diameter <= k meeting every A–Z path, or two A–Z paths at distance >= k/272 (k/680 aux)."""
    if mode not in MODES:
        raise GraphInputError(f"unknown mode {mode!r}")
    k = as_rational(k)
    if k <= 0:
        raise GraphInputError("k must be positive")
    a, z = vertex_region(g, a), vertex_region(g, z)
    if a.is_empty() or z.is_empty():
        raise GraphInputError("A and Z must be non-empty")
    bound = path_bound(k, mode)
    shared = a.intersection(z)
    if not shared.is_empty():
        return _overlapping(g, a, z, shared, k, mode, bound)
    route = shortest_route(g, a, z)
    if route is None:
        return _separator_outcome(g, Region.empty(g), None, a, z, k, mode, {"reason": "disconnected"})
    base = BaseGeodesic(g, a, z, route)
    cover = build_cover(g, base, k)
    report = {"gamma_length": base.length, "bridges": len(cover.bridges)}
    if cover.separator is not None:
        sep = cover.separator
        return _separator_outcome(g, sep.region, sep.center, a, z, k, mode, dict(report, reason="ball"))
    seq = perfect_subsequence(cover.sequence, cover.pool, base.length, k)
    report.update(pool=len(cover.pool), chain=len(cover.sequence), perfect=len(seq),
                  disjoint_problems=disjoint_spot_check(g, cover.pool, k))
    if mode == "primary":
        meta = build_meta_bridges(g, base, seq.bridges, bound, k / 8)
        problems = check_meta(g, base, meta, k, k / 8)
        paths = colour_paths(base, meta.metas, k / 8).paths
        report["bc_problems"] = same_path_check(g, meta.metas, paths, k / 8)
    else:
        meta = build_meta_bridges(g, base, seq.bridges, bound, k / 20)
        problems = check_meta(g, base, meta, k, k / 8)
        paths = aux_paths(base, meta.metas, k / 20)
        if paths is None:
            paths = aux_paths(base, meta.metas, k / 20, shared_ends=True)
            seq.repairs.append("auxiliary flow needed shared terminal nodes")
        if paths is None:
            raise InternalError("auxiliary graph has no two disjoint A–Z paths")
    report.update(meta=len(meta.metas), joins=len(meta.joins), join_trees=[(t.rank, t.length) for t in meta.trees],
                  join_ledger=[(j.length, distance_regions(g, j.region(), base.route)) for _, j in meta.joins],
                  meta_problems=problems)
    out = _paths_outcome(g, paths, a, z, k, mode, bound, report, seq.repairs)
    if out is not None:
        return out
    _, d = verify_paths(g, tuple(paths), a, z, bound)
    fixed = reanchor(g, list(paths), a, z, bound)
    if fixed is not None:
        note = f"path ends re-anchored (assembled paths were {d} apart)"
        out = _paths_outcome(g, fixed, a, z, k, mode, bound, report, seq.repairs + [note])
        if out is not None:
            log.info("menger2: %s", note)
            return out
    raise InternalError(f"assembled paths failed verification (distance {d}, bound {bound})")


def _overlapping(g, a, z, shared, k, mode, bound) -> MengerOutcome:
    pts = shared.loci()
    p = pts[0]
    for q in pts[1:]:
        if distance_regions(g, Region.of_loci(g, [p]), Region.of_loci(g, [q])) >= bound:
            trivial = (Route.trivial(g, p), Route.trivial(g, q))
            return _paths_outcome(g, trivial, a, z, k, mode, bound, {"reason": "shared points far apart"})
    s = ball(g, p, k / 2)
    if separates(g, s, a, z):
        return _separator_outcome(g, s, p, a, z, k, mode, {"reason": "ball at a shared point"})
    far = shortest_route(g, a, z, allowed=far_set(g, p, k / 2))
    out = _paths_outcome(g, (Route.trivial(g, p), far), a, z, k, mode, bound, {"reason": "shared point and a far path"})
    if out is None:
        raise InternalError("overlapping ends: no verified outcome")
    return out

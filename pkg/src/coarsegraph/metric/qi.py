"""Quasi-isometry certificates, net graphs and star attachment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .graph import INF, GraphInputError, Locus, MetricGraph, as_rational
from .ops import dijkstra, vertex_distances
from .region import Region


class ContractError(ValueError):
    """A precondition on a certified input does not hold."""


@dataclass
class QICertificate:
    f: dict
    m: Fraction
    a: Fraction
    verdict: bool
    witness: dict | None = None
    checked_pairs: int = 0
    check_density: bool = True

    def summary(self) -> dict:
        return {
            "M": self.m,
            "A": self.a,
            "verdict": self.verdict,
            "checked_pairs": self.checked_pairs,
            "density_checked": self.check_density,
            "witness": self.witness,
        }


def distance_matrix(g: MetricGraph, order: list | None = None) -> tuple[list, dict, list[list]]:
    """All-pairs distances (exact; INF across components) in vertex order."""
    order = list(order) if order is not None else g.vertices
    index = {v: i for i, v in enumerate(order)}
    rows = []
    for v in order:
        d = dijkstra(g, [v])
        rows.append([d.get(w, INF) for w in order])
    return order, index, rows


def unit_distance_array(g: MetricGraph, order: list) -> np.ndarray:
    """Hop-count matrix (−1 for INF) via breadth-first search; exact integers."""
    index = {v: i for i, v in enumerate(order)}
    rows, cols = [], []
    for u, v in g.edges:
        rows += [index[u], index[v]]
        cols += [index[v], index[u]]
    n = len(order)
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    d = shortest_path(adj, unweighted=True, directed=False)
    out = np.full((n, n), -1, dtype=np.int64)
    fin = np.isfinite(d)
    out[fin] = d[fin].astype(np.int64)
    return out


def _matrix(g: MetricGraph) -> tuple[list, dict, np.ndarray, int, Any]:
    order = g.vertices
    index = {v: i for i, v in enumerate(order)}
    if g.is_unit and len(order):
        arr = unit_distance_array(g, order)
        return order, index, arr, 1, None
    _, _, rows = distance_matrix(g, order)
    arr, den = _scaled(rows)
    return order, index, arr, den, rows


def _lookup(arr: np.ndarray, den: int, i: int, j: int):
    x = int(arr[i, j])
    return INF if x < 0 else Fraction(x, den)


def _scaled(rows: list[list]) -> tuple[np.ndarray, int]:
    """Integer matrix (−1 for INF) and the common denominator used."""
    den = 1
    for row in rows:
        for x in row:
            if type(x) is not int and x != INF:
                den = math.lcm(den, Fraction(x).denominator)
    if den == 1:
        conv = [[-1 if x == INF else int(x) for x in row] for row in rows]
    else:
        conv = [[-1 if x == INF else int(Fraction(x) * den) for x in row] for row in rows]
    return np.array(conv, dtype=np.int64).reshape(len(rows), len(rows)), den


def verify_quasi_isometry(g: MetricGraph, h: MetricGraph, f: Mapping, m: Any, a: Any,
                          check_density: bool = True) -> QICertificate:
    """Exhaustive check of  d/M − A ≤ d'(f x, f y) ≤ M d + A  and A-density of the image."""
    m, a = as_rational(m), as_rational(a)
    if m < 1 or a < 0:
        raise GraphInputError("need M >= 1 and A >= 0")
    for v in g.vertices:
        if v not in f:
            raise GraphInputError(f"map undefined on {v!r}")
        if f[v] not in h:
            raise GraphInputError(f"image {f[v]!r} is not a vertex of the target")
    gv, _, dg, sg, _ = _matrix(g)
    hv, hidx, dh_full, sh, _ = _matrix(h)
    img = np.array([hidx[f[v]] for v in gv], dtype=np.int64)
    dh = dh_full[np.ix_(img, img)] if len(gv) else np.zeros((0, 0), dtype=np.int64)
    # with x = dg/sg, y = dh/sh, M = mn/md, A = an/ad
    mn, md, an, ad = m.numerator, m.denominator, a.numerator, a.denominator
    cert = QICertificate(dict(f), m, a, True, None, len(gv) * (len(gv) - 1) // 2, check_density)
    n = len(gv)
    if n:
        ginf, hinf = dg < 0, dh < 0
        # upper: y <= M x + A   <=>  md*ad*sg*dh <= mn*ad*sh*dg + an*md*sg*sh
        lhs_u = md * ad * sg * dh
        rhs_u = mn * ad * sh * dg + an * md * sg * sh
        up_bad = (~ginf & ~hinf & (lhs_u > rhs_u)) | (~ginf & hinf)
        # lower: x/M - A <= y  <=>  md*ad*sh*dg - an*mn*sg*sh <= mn*ad*sg*dh
        lhs_l = md * ad * sh * dg - an * mn * sg * sh
        rhs_l = mn * ad * sg * dh
        lo_bad = (~ginf & ~hinf & (lhs_l > rhs_l)) | (ginf & ~hinf)
        excess_u = np.where(up_bad, np.where(hinf, np.iinfo(np.int64).max, lhs_u - rhs_u), -1)
        excess_l = np.where(lo_bad, np.where(ginf, np.iinfo(np.int64).max, lhs_l - rhs_l), -1)
        worst = np.maximum(excess_u, excess_l)
        if worst.max() >= 0 and (up_bad.any() or lo_bad.any()):
            i, j = np.unravel_index(int(np.argmax(worst)), worst.shape)
            x, y = gv[i], gv[j]
            cert.verdict = False
            cert.witness = {
                "kind": "upper" if up_bad[i, j] else "lower",
                "pair": [x, y],
                "d_source": _lookup(dg, sg, i, j),
                "d_target": _lookup(dh_full, sh, hidx[f[x]], hidx[f[y]]),
            }
            return cert
    if check_density:
        for zi, z in enumerate(hv):
            row = dh_full[zi, img] if n else np.zeros(0, dtype=np.int64)
            ok = row[(row >= 0)]
            # d(z, f x) <= A  <=>  ad*dh <= an*sh
            if ok.size == 0 or (ad * ok.min()) > an * sh:
                cert.verdict = False
                best = Fraction(int(ok.min()), sh) if ok.size else INF
                cert.witness = {"kind": "density", "target_vertex": z, "distance_to_image": best}
                return cert
    return cert


def _farthest_gap(g: MetricGraph, points: list, eps: Fraction) -> tuple | None:
    """(distance, edge, offset) of a point of g farthest from ``points``, if that exceeds eps."""
    du = vertex_distances(g, Region.of_loci(g, points))
    inner: dict = {}
    for p in points:
        if not p.is_vertex:
            inner.setdefault(p.edge, []).append(p.offset)
    worst = None
    for e in g.edges:
        length = g.length(e)
        stops = [(Fraction(0), du[e[0]])] + [(t, Fraction(0)) for t in sorted(inner.get(e, ()))]
        stops.append((length, du[e[1]]))
        for (a, da), (b, db) in zip(stops, stops[1:]):
            peak = (da + db + b - a) / 2
            if peak > eps and (worst is None or peak > worst[0]):
                worst = (peak, e, a + (db + b - a - da) / 2)
    return worst


def _net_id(p: Locus) -> Any:
    return p.vertex if p.is_vertex else ("net", p.edge[0], p.edge[1], p.offset)


def net_graph(g: MetricGraph, eps: Any) -> tuple[MetricGraph, dict]:
    """eps-net joined at distance < 3·eps, plus nearest-point map on vertices.

    The net is greedy over vertices in order, then topped up with edge points
    wherever some point of an edge is still farther than eps from the net (long
    edges, or a midpoint between two far net points).  Added points are named
    ("net", u, w, offset).
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise GraphInputError("eps must be positive")
    net: list = []
    covered: dict = {}  # vertex -> distance to current net (only entries <= eps matter)
    for v in g.vertices:
        if v in covered and covered[v] <= eps:
            continue
        net.append(v)
        for w, d in dijkstra(g, [v], limit=eps).items():
            if d <= eps and (w not in covered or d < covered[w]):
                covered[w] = d
    points = [Locus(vertex=v) for v in net]
    while points and (gap := _farthest_gap(g, points, eps)) is not None:
        points.append(g.point(gap[1], gap[2]))
    full = [dijkstra(g, [p.vertex]) if p.is_vertex else vertex_distances(g, p) for p in points]

    def dist(i: int, q: Locus) -> Fraction | float:
        if q.is_vertex:
            return full[i].get(q.vertex, INF)
        (a, b), t = q.edge, q.offset
        best = min(full[i].get(a, INF) + t, full[i].get(b, INF) + g.length(q.edge) - t)
        p = points[i]
        if not p.is_vertex and p.edge == q.edge:
            best = min(best, abs(p.offset - t))
        return best

    ids = [_net_id(p) for p in points]
    edges = []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if dist(i, points[j]) < 3 * eps:
                edges.append((ids[i], ids[j]))
    h = MetricGraph(ids, edges)
    f = {}
    for v in g.vertices:
        best = None
        for i in range(len(points)):
            d = full[i].get(v, INF)
            if d != INF and (best is None or d < best[0]):
                best = (d, ids[i])
        f[v] = best[1]
    return h, f


def attach_stars(g: MetricGraph, h: MetricGraph, cert: QICertificate, x_size: int) -> tuple[MetricGraph, dict, QICertificate]:
    """Turn an (M, A) quasi-isometry into a map with multiplicative distortion M + 3⌈A⌉.

    Every target vertex z gets ``x_size`` rays of ⌈A⌉ unit edges; the i-th
    preimage of z (in vertex order) is sent to the tip of ray i.
    """
    if not cert.verdict:
        raise ContractError("input certificate does not verify")
    ca = math.ceil(cert.a)
    if ca == 0:
        return h, dict(cert.f), verify_quasi_isometry(g, h, cert.f, cert.m, 0, check_density=False)
    pre: dict = {}
    for v in g.vertices:
        pre.setdefault(cert.f[v], []).append(v)
    if any(len(p) > x_size for p in pre.values()):
        raise ContractError("x_size is smaller than some fibre of the map")
    edges = [(u, v, ln) for u, v, ln in h.iter_edges()]
    for z in h.vertices:
        for i in range(x_size):
            prev = z
            for j in range(1, ca + 1):
                node = ("star", z, i, j)
                edges.append((prev, node))
                prev = node
    h2 = MetricGraph(h.vertices, edges)
    f2 = {}
    for z, vs in pre.items():
        for i, v in enumerate(vs):
            f2[v] = ("star", z, i, ca)
    new = verify_quasi_isometry(g, h2, f2, cert.m + 3 * ca, 0, check_density=False)
    return h2, f2, new

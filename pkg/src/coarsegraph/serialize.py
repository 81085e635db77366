"""Lossless JSON encoding: rationals as "p/q", integers bare, tuples as lists."""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from typing import Any

import numpy as np

from .metric.graph import INF, CutPoint, GraphInputError, Locus, MetricGraph, as_rational, vkey
from .metric.io import parse_json_vertex
from .metric.region import Region, Route


def encode(x: Any) -> Any:
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        if x == INF:
            return "inf"
        raise TypeError("floats are not serialized")
    if isinstance(x, CutPoint):
        return {"edge": encode(x.edge), "offset": encode(x.offset)}
    if isinstance(x, Locus):
        if x.is_vertex:
            return {"v": encode(x.vertex)}
        return {"edge": encode(list(x.edge)), "offset": encode(x.offset)}
    if isinstance(x, Region):
        return {
            "vertices": [encode(v) for v in x.sorted_vertices()],
            "segments": [{"edge": encode(list(e)), "from": encode(a), "to": encode(b)} for e, a, b in x.iter_segments()],
        }
    if isinstance(x, Route):
        return {"loci": [encode(p) for p in x.points], "length": encode(x.length)}
    if isinstance(x, MetricGraph):
        from .metric.io import graph_to_json

        return graph_to_json(x)
    if isinstance(x, dict):
        return {_key(k): encode(v) for k, v in sorted(x.items(), key=lambda kv: vkey(kv[0]))}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x, key=vkey) if isinstance(x, (set, frozenset)) else x
        return [encode(v) for v in items]
    if hasattr(x, "to_json"):
        return encode(x.to_json())
    if dataclasses.is_dataclass(x):
        return {f.name: encode(getattr(x, f.name)) for f in dataclasses.fields(x) if f.name != "g"}
    raise TypeError(f"cannot encode {type(x).__name__}")


def _key(k: Any) -> str:
    if isinstance(k, str):
        return k
    return json.dumps(encode(k))


def dumps(x: Any) -> str:
    return json.dumps(encode(x), indent=2, sort_keys=False)


def decode_vertex(g: MetricGraph, v: Any) -> Any:
    v = parse_json_vertex(v)
    if v not in g and isinstance(v, str):
        try:
            iv = int(v)
        except ValueError:
            iv = None
        if iv is not None and iv in g:
            return iv
    if v not in g:
        raise GraphInputError(f"unknown vertex {v!r}")
    return v


def decode_locus(g: MetricGraph, d: Any) -> Locus:
    if isinstance(d, dict) and "edge" in d:
        u, w = (decode_vertex(g, x) for x in d["edge"])
        return g.point((u, w), as_rational(d["offset"]))
    if isinstance(d, dict) and "v" in d:
        return Locus(vertex=decode_vertex(g, d["v"]))
    return Locus(vertex=decode_vertex(g, d))


def decode_region(g: MetricGraph, d: Any) -> Region:
    if isinstance(d, list):
        return Region.of_vertices(g, [decode_vertex(g, v) for v in d])
    vs = [decode_vertex(g, v) for v in d.get("vertices", [])]
    segs = []
    for s in d.get("segments", []):
        u, w = (decode_vertex(g, x) for x in s["edge"])
        segs.append(((u, w), as_rational(s["from"]), as_rational(s["to"])))
    return Region.build(g, vs, segs)


def decode_route(g: MetricGraph, d: Any) -> Route:
    if isinstance(d, list):
        return Route.of(g, [decode_locus(g, p) for p in d])
    return Route.of(g, [decode_locus(g, p) for p in d["loci"]])


def decode_pattern(d: Any):
    from .fatminor.model import Pattern

    vs = [parse_json_vertex(v) for v in d.get("vertices", [])]
    es = [tuple(parse_json_vertex(x) for x in e) for e in d["edges"]]
    return Pattern.of(vs, es, d.get("name", "H"))


def decode_model(g: MetricGraph, d: Any):
    """Inverse of ``FatModel.to_json`` after :func:`encode`."""
    from .fatminor.model import FatModel, _edge

    try:
        pattern = decode_pattern(d["pattern"])
        sets = {parse_json_vertex(b["vertex"]): decode_region(g, b["region"]) for b in d["branch_sets"]}
        paths = {}
        for p in d["branch_paths"]:
            e = _edge(*(parse_json_vertex(x) for x in p["edge"]))
            paths[e] = decode_route(g, p["route"])
        level = as_rational(d.get("level", 0))
    except (KeyError, TypeError) as exc:
        raise GraphInputError(f"malformed model JSON: {exc}") from None
    missing = [v for v in pattern.vertices if v not in sets] + [e for e in pattern.edges if e not in paths]
    if missing:
        raise GraphInputError(f"model lacks items for {missing}")
    return FatModel(pattern, sets, paths, level)

"""Graph ingestion (edge list, JSON) and DOT export."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Iterable

from .graph import GraphInputError, MetricGraph, as_rational


def parse_vertex(tok: Any) -> Any:
    """Edge-list tokens: integers stay integers, everything else is a string."""
    if isinstance(tok, list):
        return tuple(parse_vertex(t) for t in tok)
    if isinstance(tok, str):
        try:
            return int(tok)
        except ValueError:
            return tok
    return tok


def parse_edge_list(text: str) -> MetricGraph:
    vertices, edges = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) == 1:
            vertices.append(parse_vertex(parts[0]))
        elif len(parts) in (2, 3):
            u, v = parse_vertex(parts[0]), parse_vertex(parts[1])
            try:
                length = Fraction(parts[2]) if len(parts) == 3 else Fraction(1)
            except (ValueError, ZeroDivisionError):
                raise GraphInputError(f"line {lineno}: bad length {parts[2]!r}") from None
            edges.append((u, v, length))
        else:
            raise GraphInputError(f"line {lineno}: expected 'u v [length]'")
    return MetricGraph(vertices, edges)


def graph_from_json(doc: dict) -> MetricGraph:
    try:
        vertices = [parse_json_vertex(v) for v in doc.get("vertices", [])]
        edges = []
        for e in doc["edges"]:
            length = e.get("len", e.get("length", 1))
            edges.append((parse_json_vertex(e["u"]), parse_json_vertex(e["v"]), as_rational(length)))
    except (KeyError, TypeError, AttributeError) as exc:
        raise GraphInputError(f"malformed graph JSON: {exc}") from None
    return MetricGraph(vertices, edges)


def parse_json_vertex(v: Any) -> Any:
    if isinstance(v, list):
        return tuple(parse_json_vertex(x) for x in v)
    return v


def load_graph(text: str) -> MetricGraph:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphInputError(f"invalid JSON: {exc}") from None
        return graph_from_json(doc)
    return parse_edge_list(text)


def _dot_id(v: Any) -> str:
    return json.dumps(str(v) if not isinstance(v, (int, str)) else v if isinstance(v, str) else str(v))


def to_dot(g: MetricGraph, name: str = "G", labels: dict | None = None) -> str:
    lines = [f"graph {name} {{"]
    for v in g.vertices:
        extra = f" [label={json.dumps(str(labels[v]))}]" if labels and v in labels else ""
        lines.append(f"  {_dot_id(v)}{extra};")
    for u, v, length in g.iter_edges():
        lines.append(f'  {_dot_id(u)} -- {_dot_id(v)} [label="{length}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_json(g: MetricGraph) -> dict:
    from ..serialize import encode

    return {
        "vertices": [encode(v) for v in g.vertices],
        "edges": [{"u": encode(u), "v": encode(v), "len": encode(length)} for u, v, length in g.iter_edges()],
    }


def edge_list(edges: Iterable[tuple]) -> str:
    return "".join(f"{u} {v}\n" if len(e) == 2 else f"{u} {v} {e[2]}\n" for e in edges for u, v in [e[:2]])

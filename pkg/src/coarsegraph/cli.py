"""Command-line front door: ``coarsegraph <command> GRAPH [options]``.

Exit codes: 0 when every verification passes, 1 when one fails (the report
carries the witness), 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .fatminor import (
    InternalError,
    Pattern,
    TooShort,
    fat_ray_prefix,
    fat_star_of_paths,
    minor_test,
    search_fat_minor,
    subdivision_transfer,
    verify_fat_model,
)
from .menger import far_paths_bruteforce, menger2, menger2_endpoints
from .metric import (
    ColoredCover,
    GraphInputError,
    MetricGraph,
    Region,
    as_rational,
    at,
    attach_stars,
    distance,
    geodesic,
    near_vertex_classes,
    net_graph,
    verify_cover,
    verify_quasi_isometry,
)
from .metric.io import load_graph, parse_vertex, to_dot
from .metric.qi import ContractError
from .quasitree import bottleneck_check, quasi_tree_pipeline
from .serialize import decode_model, decode_pattern, decode_region, decode_route, decode_vertex, encode
from .star import star_pipeline


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    parameters: dict
    outcome: str
    verification: dict
    payload: Any = None
    timing: float | None = None
    dot: str | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return all(bool(v) for v in self.verification.values())

    def to_json(self) -> dict:
        out = {"command": self.command, "parameters": self.parameters, "outcome": self.outcome,
               "verification": self.verification, "ok": self.ok, "payload": self.payload}
        if self.timing is not None:
            out["timing_seconds"] = f"{self.timing:.3f}"
        return out


# -- input helpers ----------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _json_file(path: str) -> Any:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from None


def _vertex(g: MetricGraph, tok: str) -> Any:
    tok = tok.strip()
    if tok.startswith("["):
        try:
            return decode_vertex(g, json.loads(tok))
        except json.JSONDecodeError:
            raise UsageError(f"bad vertex {tok!r}") from None
    return decode_vertex(g, parse_vertex(tok))


def _vertex_list(g: MetricGraph, text: str) -> list:
    """A JSON list, ``@file.json``, or comma-separated ids."""
    if text.startswith("@"):
        return [decode_vertex(g, v) for v in _json_file(text[1:])]
    if text.lstrip().startswith("["):
        try:
            return [decode_vertex(g, v) for v in json.loads(text)]
        except json.JSONDecodeError:
            raise UsageError(f"bad vertex list {text!r}") from None
    return [_vertex(g, t) for t in text.split(",") if t.strip()]


def _sets(g: MetricGraph, path: str) -> tuple[list, list, dict]:
    doc = _json_file(path)
    if not isinstance(doc, dict):
        raise UsageError("sets file must be a JSON object with A and Z")
    a = doc.get("A", doc.get("a"))
    z = doc.get("Z", doc.get("z"))
    if a is None or z is None:
        raise UsageError("sets file must name A and Z")
    return [decode_vertex(g, v) for v in a], [decode_vertex(g, v) for v in z], doc


def _pattern(text: str) -> Pattern:
    t = text.replace("_", "").replace(" ", "").upper()
    try:
        if t.startswith("K1,"):
            return Pattern.star(int(t[3:]))
        if t.startswith("K"):
            return Pattern.complete(int(t[1:]))
        if t.startswith("C"):
            return Pattern.cycle(int(t[1:]))
        if t.startswith("P"):
            return Pattern.path(int(t[1:]))
    except ValueError:
        pass
    if text.endswith(".json"):
        return decode_pattern(_json_file(text))
    raise UsageError(f"unknown pattern {text!r} (use K3, K1,3, C4, P2 or a JSON file)")


def _rational(text: str) -> Fraction:
    try:
        return as_rational(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad rational {text!r}") from None


def _model_labels(model) -> dict:
    labels: dict = {}
    for v in model.pattern.vertices:
        for x in model.branch_sets[v].sorted_vertices():
            labels.setdefault(x, f"B{v}")
    for e in model.pattern.edges:
        for x in model.branch_paths[e].vertex_sequence():
            labels.setdefault(x, f"P{e[0]}-{e[1]}")
    return labels


def _model_check(g: MetricGraph, model, k) -> tuple[dict, Any]:
    verdict = verify_fat_model(g, model, k)
    return {"model_verified": verdict.ok}, verdict


def _pairs(f: dict) -> list:
    return [[v, f[v]] for v in f]


# -- commands ---------------------------------------------------------------------

def cmd_dist(g, ns) -> RunReport:
    d = distance(g, at(_vertex(g, ns.u)), at(_vertex(g, ns.v)))
    return RunReport("dist", {"u": ns.u, "v": ns.v}, "distance", {}, d)


def cmd_near_components(g, ns) -> RunReport:
    vs = _vertex_list(g, ns.vertices) if ns.vertices else list(g.vertices)
    classes = near_vertex_classes(g, vs, _rational(ns.m))
    covered = sorted((repr(v) for c in classes for v in c))
    ok = covered == sorted(repr(v) for v in set(vs))
    return RunReport("near-components", {"m": ns.m, "size": len(vs)}, f"{len(classes)} classes",
                     {"partition": ok}, {"classes": classes})


def cmd_bottleneck(g, ns) -> RunReport:
    v = bottleneck_check(g, _rational(ns.delta), ns.pair_budget)
    return RunReport("bottleneck", {"delta": ns.delta, "pair_budget": ns.pair_budget},
                     "holds" if v.ok else "violated", {"bottleneck": v.ok}, v)


def cmd_quasi_tree(g, ns) -> RunReport:
    k = _rational(ns.k)
    root = _vertex(g, ns.root) if ns.root is not None else None
    res = quasi_tree_pipeline(g, k, root, ns.threads)
    params = {"k": k, "root": root if root is not None else g.vertices[0]}
    if res.branch == "tree":
        cert = verify_quasi_isometry(g, res.tree.tree, res.tree.f, 1, 10 * k)
        payload = dict(res.to_json(), tree=res.tree.tree, map=_pairs(res.tree.f))
        return RunReport("quasi-tree", params, "tree", {"certificate": cert.verdict}, payload,
                         dot=to_dot(res.tree.tree, "T"))
    check, _ = _model_check(g, res.model, k)
    return RunReport("quasi-tree", params, "witness", check, res.to_json(),
                     dot=to_dot(g, "G", _model_labels(res.model)))


def cmd_star(g, ns) -> RunReport:
    k = _rational(ns.k)
    res = star_pipeline(g, _vertex(g, ns.root), k, ns.m, ns.threads)
    params = {"k": k, "root": ns.root, "m": ns.m}
    if res.branch == "quotient":
        check = {"certificate": res.certificate.verdict,
                 "minor_free": not minor_test(res.quotient, Pattern.star(ns.m))}
        payload = dict(res.to_json(), quotient=res.quotient, map=_pairs(res.f))
        return RunReport("star", params, "quotient", check, payload, dot=to_dot(res.quotient, "Q"))
    if res.branch == "inconclusive":
        payload = dict(res.to_json(), quotient=res.quotient, map=_pairs(res.f))
        return RunReport("star", params, "inconclusive", {"certificate": res.certificate.verdict}, payload,
                         dot=to_dot(res.quotient, "Q"))
    check, _ = _model_check(g, res.model, k)
    return RunReport("star", params, "witness", check, res.to_json(),
                     dot=to_dot(g, "G", _model_labels(res.model)))


def cmd_fatcheck(g, ns) -> RunReport:
    model = decode_model(g, _json_file(ns.model))
    k = _rational(ns.k) if ns.k is not None else model.level
    v = verify_fat_model(g, model, k)
    return RunReport("fatcheck", {"k": k, "pattern": model.pattern.name},
                     "fat" if v.ok else "not fat", {"fat": v.ok}, v, dot=to_dot(g, "G", _model_labels(model)))


def cmd_fatsearch(g, ns) -> RunReport:
    pat = _pattern(ns.pattern)
    k = _rational(ns.k)
    res = search_fat_minor(g, pat, k, ns.size_budget, ns.step_budget)
    params = {"pattern": pat.name, "k": k, "size_budget": ns.size_budget, "step_budget": ns.step_budget}
    payload = {"status": res.status, "steps": res.steps, "model": res.model}
    if res.found:
        check, _ = _model_check(g, res.model, k)
        return RunReport("fatsearch", params, "found", check, payload, dot=to_dot(g, "G", _model_labels(res.model)))
    return RunReport("fatsearch", params, res.status, {}, payload)


def cmd_subdivide_transfer(g, ns) -> RunReport:
    model = decode_model(g, _json_file(ns.model))
    e = tuple(parse_vertex(t) for t in ns.edge.split(","))
    if len(e) != 2:
        raise UsageError("--edge takes two pattern vertices, e.g. 1,2")
    k = _rational(ns.k)
    new = parse_vertex(ns.new_vertex) if ns.new_vertex is not None else None
    out = subdivision_transfer(g, model, e, k, new)
    check, _ = _model_check(g, out, k)
    return RunReport("subdivide-transfer", {"edge": list(e), "k": k}, "model", check, out,
                     dot=to_dot(g, "G", _model_labels(out)))


def _route_arg(g, ns):
    if ns.path:
        from .metric import Route

        return Route.of_vertices(g, _vertex_list(g, ns.path))
    if ns.source is None or ns.target is None:
        raise UsageError("give --path or both --from and --to")
    return geodesic(g, at(_vertex(g, ns.source)), at(_vertex(g, ns.target)))


def cmd_fatray(g, ns) -> RunReport:
    r = _rational(ns.r)
    route = _route_arg(g, ns)
    out = fat_ray_prefix(g, route, r)
    if isinstance(out, TooShort):
        return RunReport("fatray", {"r": r}, "too-short", {}, out)
    check, _ = _model_check(g, out, r)
    return RunReport("fatray", {"r": r, "route_length": route.length}, "model", check, out,
                     dot=to_dot(g, "G", _model_labels(out)))


def cmd_fatstarpaths(g, ns) -> RunReport:
    doc = _json_file(ns.paths)
    routes = [decode_route(g, p) for p in doc]
    r, n = _rational(ns.r), _rational(ns.n)
    out = fat_star_of_paths(g, routes, r, n)
    check, _ = _model_check(g, out, r)
    return RunReport("fatstarpaths", {"r": r, "n": n, "paths": len(routes)}, "model", check, out,
                     dot=to_dot(g, "G", _model_labels(out)))


def _menger_dot(g, out) -> str:
    labels = {}
    if out.paths:
        for i, p in enumerate(out.paths, 1):
            for v in p.vertex_sequence():
                labels.setdefault(v, f"path{i}")
    if out.separator is not None:
        for v in out.separator.sorted_vertices():
            labels[v] = "S"
    return to_dot(g, "G", labels)


def cmd_menger2(g, ns) -> RunReport:
    a, z, _ = _sets(g, ns.sets)
    k = _rational(ns.k)
    out = menger2(g, a, z, k, ns.mode)
    return RunReport("menger2", {"k": k, "mode": ns.mode, "A": a, "Z": z}, out.branch,
                     {"outcome": out.verified}, out, dot=_menger_dot(g, out))


def cmd_menger2_endpoints(g, ns) -> RunReport:
    a, z, doc = _sets(g, ns.sets)
    x = _vertex(g, ns.x) if ns.x is not None else decode_vertex(g, doc.get("x"))
    z0 = _vertex(g, ns.z0) if ns.z0 is not None else decode_vertex(g, doc.get("z0"))
    k = _rational(ns.k)
    out = menger2_endpoints(g, a, z, k, x, z0, ns.mode)
    check = {"outcome": out.verified}
    if out.branch == "paths" and ns.mode == "primary":
        check["pinned"] = out.report.get("pinned")
    return RunReport("menger2-endpoints", {"k": k, "mode": ns.mode, "x": x, "z0": z0}, out.branch,
                     check, out, dot=_menger_dot(g, out))


def cmd_farpaths(g, ns) -> RunReport:
    a, z, _ = _sets(g, ns.sets)
    res = far_paths_bruteforce(g, a, z, ns.n, _rational(ns.r), ns.budget)
    return RunReport("farpaths", {"n": ns.n, "r": ns.r, "budget": ns.budget}, res.status, {}, res)


def cmd_cover_check(g, ns) -> RunReport:
    doc = _json_file(ns.cover)
    try:
        items = [(decode_region(g, it["region"]), it["color"]) for it in doc["regions"]]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed cover JSON: {exc}") from None
    target = decode_region(g, doc["target"]) if "target" in doc else Region.whole(g)
    v = verify_cover(g, target, ColoredCover.of(items), ns.n, _rational(ns.s), _rational(ns.d_bound))
    return RunReport("cover-check", {"n": ns.n, "s": ns.s, "d_bound": ns.d_bound, "regions": len(items)},
                     "valid" if v.ok else "invalid", {"cover": v.ok}, v)


def _net(g, eps):
    h, f = net_graph(g, eps)
    cert = verify_quasi_isometry(g, h, f, 3 * eps, 3 * eps)
    return h, f, cert


def cmd_net(g, ns) -> RunReport:
    eps = _rational(ns.eps)
    h, f, cert = _net(g, eps)
    payload = {"net": h, "map": _pairs(f), "certificate": cert.summary()}
    return RunReport("net", {"eps": eps}, f"{len(h)} net points", {"certificate": cert.verdict}, payload,
                     dot=to_dot(h, "N"))


def cmd_attach_stars(g, ns) -> RunReport:
    if ns.target:
        h = load_graph(_read(ns.target))
        f = {decode_vertex(g, v): decode_vertex(h, w) for v, w in _json_file(ns.map)}
        cert = verify_quasi_isometry(g, h, f, _rational(ns.m), _rational(ns.a))
    elif ns.eps:
        h, f, cert = _net(g, _rational(ns.eps))
    else:
        raise UsageError("give --eps, or --target with --map, --m and --a")
    h2, f2, new = attach_stars(g, h, cert, ns.x_size)
    payload = {"graph": h2, "map": _pairs(f2), "certificate": new.summary()}
    return RunReport("attach-stars", {"x_size": ns.x_size, "M": cert.m, "A": cert.a}, "graph",
                     {"input_certificate": cert.verdict, "certificate": new.verdict}, payload, dot=to_dot(h2, "H"))


# -- argument parsing -------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coarsegraph", description="Coarse graph theory on exact metric graphs.")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="add wall-clock time (breaks byte-identical output)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.add_argument("graph", help="edge list or JSON graph; '-' reads standard input")
        sp.set_defaults(fn=fn)
        return sp

    sp = cmd("dist", cmd_dist, "distance between two vertices")
    sp.add_argument("u")
    sp.add_argument("v")
    sp = cmd("near-components", cmd_near_components, "m-near-components of a vertex set")
    sp.add_argument("--m", required=True)
    sp.add_argument("--vertices")
    sp = cmd("bottleneck", cmd_bottleneck, "bottleneck property check")
    sp.add_argument("--delta", required=True)
    sp.add_argument("--pair-budget", type=int, default=5000)
    sp = cmd("quasi-tree", cmd_quasi_tree, "tree approximation or fat K3 witness")
    sp.add_argument("--root")
    sp.add_argument("--k", required=True)
    sp = cmd("star", cmd_star, "K_{1,m}-minor-free quotient or fat star witness")
    sp.add_argument("--root", required=True)
    sp.add_argument("--k", required=True)
    sp.add_argument("--m", type=int, default=3)
    sp = cmd("fatcheck", cmd_fatcheck, "verify a fat minor model")
    sp.add_argument("model")
    sp.add_argument("--k")
    sp = cmd("fatsearch", cmd_fatsearch, "bounded search for a fat minor")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--k", required=True)
    sp.add_argument("--size-budget", type=int, default=6)
    sp.add_argument("--step-budget", type=int, default=2_000_000)
    sp = cmd("subdivide-transfer", cmd_subdivide_transfer, "3k-fat model to k-fat model of a subdivision")
    sp.add_argument("model")
    sp.add_argument("--edge", required=True)
    sp.add_argument("--k", required=True)
    sp.add_argument("--new-vertex")
    sp = cmd("fatray", cmd_fatray, "fat path model along a geodesic")
    sp.add_argument("--r", required=True)
    sp.add_argument("--path")
    sp.add_argument("--from", dest="source")
    sp.add_argument("--to", dest="target")
    sp = cmd("fatstarpaths", cmd_fatstarpaths, "fat star of paths from rooted geodesics")
    sp.add_argument("--paths", required=True)
    sp.add_argument("--r", required=True)
    sp.add_argument("--n", required=True)
    for name, fn in (("menger2", cmd_menger2), ("menger2-endpoints", cmd_menger2_endpoints)):
        sp = cmd(name, fn, "coarse Menger for two paths")
        sp.add_argument("--sets", required=True)
        sp.add_argument("--k", required=True)
        sp.add_argument("--mode", choices=("primary", "aux"), default="aux")
        if name == "menger2-endpoints":
            sp.add_argument("--x")
            sp.add_argument("--z0")
    sp = cmd("farpaths", cmd_farpaths, "exhaustive search for n far-apart A-Z paths")
    sp.add_argument("--sets", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", required=True)
    sp.add_argument("--budget", type=int, default=1_000_000)
    sp = cmd("cover-check", cmd_cover_check, "verify a coloured cover")
    sp.add_argument("cover")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", required=True)
    sp.add_argument("--d-bound", required=True)
    sp = cmd("net", cmd_net, "eps-net graph with its quasi-isometry certificate")
    sp.add_argument("--eps", required=True)
    sp = cmd("attach-stars", cmd_attach_stars, "purely multiplicative quasi-isometry by attaching stars")
    sp.add_argument("--x-size", type=int, required=True)
    sp.add_argument("--eps")
    sp.add_argument("--target")
    sp.add_argument("--map")
    sp.add_argument("--m")
    sp.add_argument("--a")
    return p


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, stream=err)
    if ns.threads < 1:
        print("error: --threads must be positive", file=err)
        return 2
    t0 = time.perf_counter()
    try:
        g = load_graph(_read(ns.graph))
        report = ns.fn(g, ns)
    except (UsageError, GraphInputError, ContractError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    except InternalError as exc:
        print(json.dumps({"command": ns.command, "ok": False, "error": str(exc)}, indent=2), file=out)
        return 1
    if ns.timing:
        report.timing = time.perf_counter() - t0
    if ns.format == "dot" and report.dot is not None:
        text = report.dot
    elif ns.command == "dist":
        text = json.dumps(encode(report.payload)) + "\n"
    else:
        text = json.dumps(encode(report.to_json()), indent=2) + "\n"
    try:
        out.write(text)
        out.flush()
    except BrokenPipeError:
        pass
    return 0 if report.ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

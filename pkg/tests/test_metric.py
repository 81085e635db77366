from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsegraph.metric import (
    INF,
    GraphInputError,
    MetricGraph,
    Region,
    Route,
    at,
    ball,
    components,
    cycle_graph,
    diameter,
    distance,
    distance_regions,
    far_set,
    geodesic,
    is_geodesic,
    near_components,
    near_vertex_classes,
    neighborhood,
    path_graph,
    separates,
)
from coarsegraph.metric.io import graph_to_json, load_graph, to_dot
from coarsegraph.serialize import decode_region, decode_route, encode

from conftest import bfs, connected_graphs, floyd


def arc(g, lo, hi, n):
    """Induced arc lo..hi (inclusive, wrapping) of C_n."""
    vs = [(lo + i) % n for i in range((hi - lo) % n + 1)]
    return Region.induced(g, vs)


# -- distance --------------------------------------------------------------------

def test_distance_on_a_path():
    g = path_graph(2)
    assert distance(g, at(0), at(2)) == 2
    assert distance(g, at(1), at(1)) == 0


def test_cycle_distance_matches_bfs():
    g = cycle_graph(30)
    assert distance(g, at(20), at(9)) == 11 == bfs(g, 20)[9]


def test_distance_to_an_interior_point():
    g = path_graph(4)
    p = g.point((1, 2), Fraction(1, 3))
    assert distance(g, at(0), p) == Fraction(4, 3)
    assert distance(g, p, at(4)) == Fraction(8, 3)


def test_region_distances():
    g = cycle_graph(30)
    assert distance_regions(g, arc(g, 0, 5, 30), arc(g, 10, 15, 30)) == 5
    assert distance_regions(g, arc(g, 0, 5, 30), arc(g, 5, 8, 30)) == 0


def test_disconnected_is_infinite():
    g = MetricGraph([0, 1, 2, 3], [(0, 1), (2, 3)])
    assert distance(g, at(0), at(3)) == INF
    assert distance_regions(g, Region.of_vertices(g, [0, 1]), Region.of_vertices(g, [2])) == INF


@given(connected_graphs(max_n=10, weighted=True))
def test_distances_agree_with_floyd(g):
    d = floyd(g)
    for u in g.vertices:
        for v in g.vertices:
            assert distance(g, at(u), at(v)) == d[u][v]


@given(connected_graphs(max_n=10, weighted=True), st.data())
def test_triangle_inequality_through_edge_points(g, data):
    e = data.draw(st.sampled_from(list(g.edges)))
    t = data.draw(st.fractions(0, 1)) * g.length(e)
    p = g.point(e, t)
    u, v = data.draw(st.sampled_from(g.vertices)), data.draw(st.sampled_from(g.vertices))
    assert distance(g, at(u), at(v)) <= distance(g, at(u), p) + distance(g, p, at(v))


# -- balls, neighbourhoods and far sets -------------------------------------------

def test_ball_radius_zero_is_the_centre():
    g = cycle_graph(8)
    assert ball(g, at(3), 0).sorted_vertices() == [3]
    assert not list(ball(g, at(3), 0).iter_segments())


def test_ball_with_half_an_edge():
    g = path_graph(3)
    b = ball(g, at(1), Fraction(3, 2))
    assert b.sorted_vertices() == [0, 1, 2]
    assert ((2, 3), Fraction(0), Fraction(1, 2)) in list(b.iter_segments())
    assert not b.contains(g.point((2, 3), Fraction(3, 4)))


def test_ball_covering_the_cycle():
    g = cycle_graph(30)
    assert Region.whole(g).subset_of(ball(g, at(0), 15))


def test_far_set_is_closed():
    g = path_graph(10)
    f = far_set(g, at(0), 4)
    assert f.contains(at(4)) and not f.contains(at(3))


@given(connected_graphs(max_n=9), st.data())
def test_neighbourhood_and_far_set_cover_everything(g, data):
    v = data.draw(st.sampled_from(g.vertices))
    r = data.draw(st.fractions(0, 4, max_denominator=4))
    nb, far = neighborhood(g, at(v), r), far_set(g, at(v), r)
    for u in g.vertices:
        d = distance(g, at(v), at(u))
        assert nb.contains(at(u)) == (d <= r)
        assert far.contains(at(u)) == (d >= r)


# -- geodesics -------------------------------------------------------------------

def test_geodesic_examples():
    g = path_graph(5)
    r = geodesic(g, at(0), at(5))
    assert r.length == 5 and r.vertex_sequence() == list(range(6))
    c = cycle_graph(30)
    r = geodesic(c, at(0), at(14))
    assert r.length == 14 and is_geodesic(c, r)
    a = Region.of_vertices(c, [3])
    assert geodesic(c, a, a).length == 0


@given(connected_graphs(max_n=10, weighted=True), st.data())
def test_geodesic_length_is_distance(g, data):
    u, v = data.draw(st.sampled_from(g.vertices)), data.draw(st.sampled_from(g.vertices))
    r = geodesic(g, at(u), at(v))
    assert r.length == distance(g, at(u), at(v))
    assert r.start == at(u) and r.end == at(v)


def test_route_sub_and_reverse():
    g = path_graph(6)
    r = Route.of_vertices(g, range(7))
    s = r.sub(Fraction(3, 2), 4)
    assert s.length == Fraction(5, 2)
    assert r.sub(4, Fraction(3, 2)).reversed().points == s.points
    assert r.param_of(at(5)) == 5


# -- separation and components --------------------------------------------------

def test_separation_examples():
    g = path_graph(10)
    assert separates(g, Region.of_vertices(g, [5]), Region.of_vertices(g, [0]), Region.of_vertices(g, [10]))
    a = Region.of_vertices(g, [0])
    assert separates(g, a, a, Region.of_vertices(g, [10]))
    c = cycle_graph(30)
    assert not separates(c, Region.of_vertices(c, [5]), Region.of_vertices(c, [0]), Region.of_vertices(c, [15]))


def test_components_of_a_split_path():
    g = path_graph(6)
    assert len(components(g, Region.of_vertices(g, [0, 1, 2, 4, 5]))) == 5  # bare vertices
    comps = components(g, Region.induced(g, [0, 1, 2, 4, 5]))
    assert sorted(c.sorted_vertices() for c in comps) == [[0, 1, 2], [4, 5]]


def test_near_components_examples():
    g = cycle_graph(100)
    assert len(near_components(g, Region.of_vertices(g, [10, 90]), 5)) == 2
    assert len(near_components(g, Region.of_vertices(g, [2, 98]), 5)) == 1
    assert len(near_components(g, Region.of_vertices(g, [7]), 5)) == 1
    assert near_vertex_classes(g, [0, 1, 5, 6, 50], 2) == [[0, 1], [5, 6], [50]]


@given(connected_graphs(max_n=10), st.integers(1, 4), st.data())
def test_near_classes_match_single_linkage(g, m, data):
    vs = data.draw(st.sets(st.sampled_from(g.vertices), min_size=1))
    classes = near_vertex_classes(g, vs, m)
    where = {v: i for i, c in enumerate(classes) for v in c}
    assert set(where) == vs
    d = {v: bfs(g, v) for v in vs}
    for u in vs:
        for v in vs:
            if d[u][v] <= m:
                assert where[u] == where[v]


def test_diameter_of_an_arc_with_a_half_edge():
    g = cycle_graph(12)
    r = Region.build(g, [0, 1, 2], [((0, 1), 0, 1), ((1, 2), 0, 1), ((2, 3), 0, Fraction(1, 2))])
    assert diameter(g, r) == Fraction(5, 2)
    assert diameter(g, Region.whole(g)) == 6


# -- input and output -----------------------------------------------------------

def test_edge_list_parsing():
    g = load_graph("0 1\n1 2 3/2\n# comment\nlone\n")
    assert g.length(g.edge(1, 2)) == Fraction(3, 2)
    assert g.has_vertex("lone")
    with pytest.raises(GraphInputError):
        load_graph("0 1 x\n")


def test_json_graph_round_trip():
    g = load_graph('{"vertices": [0, 1, 2], "edges": [{"u": 0, "v": 1, "len": "1/3"}, {"u": 1, "v": 2}]}')
    h = load_graph(json.dumps(graph_to_json(g)))
    assert list(h.iter_edges()) == list(g.iter_edges())
    assert 'label="1/3"' in to_dot(g)


@given(connected_graphs(max_n=8, weighted=True), st.data())
def test_region_and_route_encoding_round_trips(g, data):
    u, v = data.draw(st.sampled_from(g.vertices)), data.draw(st.sampled_from(g.vertices))
    r = geodesic(g, at(u), at(v))
    back = decode_route(g, encode(r))
    assert back.points == r.points
    reg = neighborhood(g, at(u), Fraction(3, 2))
    assert decode_region(g, encode(reg)).subset_of(reg)
    assert reg.subset_of(decode_region(g, encode(reg)))


def test_rationals_serialize_as_strings():
    assert encode(Fraction(3, 4)) == "3/4"
    assert encode(Fraction(4, 2)) == 2
    assert encode(INF) == "inf"


def test_bad_graph_input():
    with pytest.raises(GraphInputError):
        MetricGraph([0, 1], [(0, 1, -1)])
    with pytest.raises(GraphInputError):
        distance(path_graph(2), at(7), at(0))


def test_random_graph_helper_is_connected():
    from conftest import random_connected

    g = random_connected(random.Random(5), 20, 10)
    assert len(bfs(g, 0)) == 20

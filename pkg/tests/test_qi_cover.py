from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsegraph.metric import (
    ColoredCover,
    ContractError,
    MetricGraph,
    Region,
    at,
    attach_stars,
    ball,
    cycle_graph,
    distance,
    distance_regions,
    grid_graph,
    net_graph,
    path_graph,
    separates,
    verify_cover,
    verify_quasi_isometry,
)

from conftest import brick_cover, connected_graphs, floyd, perturb


def point_graph():
    return MetricGraph(["p"], [])


# -- quasi-isometries -----------------------------------------------------------

def test_identity_is_an_isometry():
    g = cycle_graph(9)
    assert verify_quasi_isometry(g, g, {v: v for v in g.vertices}, 1, 0).verdict


def test_constant_map_needs_the_diameter():
    g = path_graph(10)
    f = {v: "p" for v in g.vertices}
    assert verify_quasi_isometry(g, point_graph(), f, 1, 10).verdict
    cert = verify_quasi_isometry(g, point_graph(), f, 1, Fraction(19, 2))
    assert not cert.verdict and cert.witness is not None


def test_net_of_a_path():
    g = path_graph(10)
    h, f = net_graph(g, 1)
    assert h.vertices == [0, 2, 4, 6, 8, 10]
    assert [(u, v) for u, v, _ in h.iter_edges()] == [(0, 2), (2, 4), (4, 6), (6, 8), (8, 10)]
    assert f[7] == 6 and f[10] == 10


def test_net_with_huge_eps_is_a_point():
    h, _ = net_graph(cycle_graph(12), 50)
    assert len(h) == 1


@given(connected_graphs(max_n=14), st.sampled_from([1, Fraction(3, 2), 2, 3]))
def test_net_is_a_quasi_isometry(g, eps):
    h, f = net_graph(g, eps)
    assert verify_quasi_isometry(g, h, f, 3 * eps, 3 * eps).verdict


@given(connected_graphs(max_n=10, weighted=True), st.sampled_from([Fraction(1, 2), 1, 2]))
def test_weighted_net_is_a_quasi_isometry(g, eps):
    h, f = net_graph(g, eps)
    assert verify_quasi_isometry(g, h, f, 3 * eps, 3 * eps).verdict


def test_net_tops_up_uncovered_edge_midpoints():
    # net {0, 2, 4}: the midpoint of edge 1-3 is 3/2 from the net
    g = MetricGraph(range(5), [(0, 1), (1, 3), (3, 2), (2, 4)])
    h, f = net_graph(g, 1)
    assert ("net", 1, 3, Fraction(1, 2)) in h.vertices
    assert verify_quasi_isometry(g, h, f, 3, 3).verdict


def test_attach_stars_path_to_point():
    g = path_graph(10)
    cert = verify_quasi_isometry(g, point_graph(), {v: "p" for v in g.vertices}, 1, 10)
    h2, f2, new = attach_stars(g, point_graph(), cert, 11)
    assert (new.m, new.a) == (31, 0) and new.verdict
    assert len(h2) == 1 + 11 * 10


def test_attach_stars_small_target():
    g = path_graph(2)
    cert = verify_quasi_isometry(g, point_graph(), {v: "p" for v in g.vertices}, 1, 2)
    h2, _, _ = attach_stars(g, point_graph(), cert, 3)
    assert len(h2) == 1 + 3 * 2
    assert sorted(h2.degree(v) for v in h2.vertices)[-1] == 3


def test_attach_stars_with_exact_map_changes_nothing():
    g = cycle_graph(6)
    cert = verify_quasi_isometry(g, g, {v: v for v in g.vertices}, 1, 0)
    h2, f2, new = attach_stars(g, g, cert, 1)
    assert len(h2) == len(g) and f2 == cert.f and new.verdict


def test_attach_stars_rejects_small_fibres():
    g = path_graph(4)
    cert = verify_quasi_isometry(g, point_graph(), {v: "p" for v in g.vertices}, 1, 4)
    with pytest.raises(ContractError):
        attach_stars(g, point_graph(), cert, 2)


# -- metric-core properties that need several primitives ---------------------------

@given(connected_graphs(max_n=10), st.data())
def test_ball_monotone(g, data):
    v = data.draw(st.sampled_from(g.vertices))
    r1 = data.draw(st.fractions(0, 3, max_denominator=3))
    r2 = r1 + data.draw(st.fractions(0, 3, max_denominator=3))
    assert ball(g, at(v), r1).subset_of(ball(g, at(v), r2))


@given(connected_graphs(max_n=10), st.data())
def test_separation_by_balls_is_monotone(g, data):
    x, a, z = (data.draw(st.sampled_from(g.vertices)) for _ in range(3))
    ra, rz = Region.of_vertices(g, [a]), Region.of_vertices(g, [z])
    seen = False
    for r in range(0, 8):
        s = separates(g, ball(g, at(x), r), ra, rz)
        assert s or not seen
        seen = seen or s


@given(connected_graphs(max_n=10, weighted=True), st.data())
def test_distance_is_a_metric(g, data):
    d = floyd(g)
    u, v, w = (data.draw(st.sampled_from(g.vertices)) for _ in range(3))
    assert distance(g, at(u), at(v)) == distance(g, at(v), at(u)) == d[u][v]
    assert distance(g, at(u), at(w)) <= distance(g, at(u), at(v)) + distance(g, at(v), at(w))


# -- cover verification ---------------------------------------------------------

def vertices(g):
    return Region.of_vertices(g, g.vertices)


def interval_cover(g, colours):
    items = []
    for i in range(0, 21, 5):
        items.append((Region.induced(g, range(i, min(i + 5, 21))), colours[(i // 5) % len(colours)]))
    return ColoredCover.of(items)


def test_single_region_cover():
    g = cycle_graph(8)
    cover = ColoredCover.of([(Region.whole(g), 1)])
    assert verify_cover(g, Region.whole(g), cover, 0, 1, 5).ok
    assert not verify_cover(g, Region.whole(g), cover, 0, 1, 4).ok


def test_alternating_intervals_on_a_path():
    g = path_graph(20)
    cover = interval_cover(g, [1, 2])
    assert verify_cover(g, vertices(g), cover, 1, 1, 5).ok
    # same-coloured intervals [0..4] and [10..14] are 6 apart
    assert verify_cover(g, vertices(g), cover, 1, 6, 5).ok
    v = verify_cover(g, vertices(g), cover, 1, 7, 5)
    assert not v.ok
    assert v.witness["kind"] == "disjointness" and v.witness["distance"] == 6
    i, j = v.witness["regions"]
    assert distance_regions(g, cover.items[i][0], cover.items[j][0]) == 6


def test_one_colour_intervals_touch():
    g = path_graph(20)
    v = verify_cover(g, vertices(g), interval_cover(g, [1]), 1, 2, 5)
    assert not v.ok and v.witness["distance"] == 1


def test_cover_must_cover_and_respect_colours():
    g = path_graph(20)
    partial = ColoredCover.of([(Region.induced(g, range(5)), 1)])
    v = verify_cover(g, vertices(g), partial, 1, 1, 5)
    assert not v.ok and v.witness["kind"] == "coverage"
    too_many = interval_cover(g, [1, 2, 3])
    assert verify_cover(g, vertices(g), too_many, 1, 1, 5).witness["kind"] == "color"


def test_three_colour_grid_bricks():
    g = grid_graph(20, 20)
    cover = brick_cover(20, 20, 3)
    assert verify_cover(g, vertices(g), cover, 2, 4, 20).ok
    bad, (i, j) = perturb(cover)
    v = verify_cover(g, vertices(g), bad, 2, 4, 20)
    assert not v.ok and v.witness["kind"] == "disjointness"
    assert set(v.witness["regions"]) & {i, j}

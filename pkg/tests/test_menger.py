from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsegraph.menger import (
    base_geodesic,
    build_cover,
    far_paths_bruteforce,
    find_bridge,
    menger2,
    menger2_endpoints,
    menger2_to_boundary,
    perfect_subsequence,
    stabilization,
)
from coarsegraph.menger.bridges import Separator, bridge_defects, is_perfect, surrounds
from coarsegraph.metric import (
    GraphInputError,
    MetricGraph,
    Region,
    at,
    cycle_graph,
    diameter,
    distance_regions,
    path_graph,
    separates,
    theta_graph,
)

from conftest import bfs, random_connected, random_ring

N = 200
A200 = [i % N for i in range(180, 221)]
Z200 = list(range(80, 121))


def regions(g, a, z):
    return Region.of_vertices(g, a), Region.of_vertices(g, z)


def c200_base():
    g = cycle_graph(N)
    return g, base_geodesic(g, *regions(g, A200, Z200))


def rails(length: int = 100, gap: int = 40) -> tuple[MetricGraph, list]:
    """Two rails of ``length`` leaving the ends of a ``gap``-long rung; the rung is the source set."""
    edges = [(("L", i), ("L", i + 1)) for i in range(length)] + [(("R", i), ("R", i + 1)) for i in range(length)]
    rung = [("L", 0)] + [("r", j) for j in range(1, gap)] + [("R", 0)]
    return MetricGraph([], edges + list(zip(rung, rung[1:]))), rung


# -- base geodesic, bridges and covers ------------------------------------------------

def test_base_geodesic_joins_the_arc_ends():
    g, base = c200_base()
    assert base.length == 60
    assert {base.route.start, base.route.end} == {at(20), at(80)}


def test_bridge_on_a_path_is_a_separator():
    g = path_graph(20)
    base = base_geodesic(g, *regions(g, [0], [20]))
    sep = find_bridge(g, base, 10, 4)
    assert isinstance(sep, Separator)
    assert separates(g, sep.region, *regions(g, [0], [20])) and diameter(g, sep.region) <= 4


def test_bridge_through_the_far_arc():
    g, base = c200_base()
    br = find_bridge(g, base, 30, 16)
    assert not isinstance(br, Separator)
    assert bridge_defects(g, base, br, Fraction(16)) == []
    assert surrounds(br.b0, br.b1, Fraction(30), Fraction(6), base.length)
    assert br.anchored_a and br.anchored_z


def test_theta_bridges_use_an_outer_path():
    # a singleton source would be its own separator, so start ten steps in
    g = theta_graph(3, 100)
    base = base_geodesic(g, *regions(g, [(i, 10) for i in range(3)], [(i, 90) for i in range(3)]))
    assert base.length == 80
    br = find_bridge(g, base, 40, 16)
    assert not isinstance(br, Separator)
    assert distance_regions(g, br.spine, base.route) >= 2
    cover = build_cover(g, base, 16)
    assert cover.separator is None and len(cover.sequence) >= 1


def test_cover_of_c200_is_a_perfect_chain():
    g, base = c200_base()
    cover = build_cover(g, base, 16)
    seq = perfect_subsequence(cover.sequence, cover.pool, base.length, Fraction(16))
    assert seq.perfect and is_perfect(seq.bridges, Fraction(2))
    for br in cover.bridges:
        assert bridge_defects(g, base, br, Fraction(16)) == []


# -- the dichotomy -------------------------------------------------------------------

@pytest.mark.parametrize("mode,a", [("primary", Fraction(1, 17)), ("aux", Fraction(2, 85))])
def test_c200_gives_the_two_arcs(mode, a):
    g = cycle_graph(N)
    out = menger2(g, A200, Z200, 16, mode)
    assert out.branch == "paths" and out.verified and out.a == a
    assert out.path_distance == 40
    p, q = out.paths
    assert distance_regions(g, p.region(), q.region()) == 40
    assert out.report["meta_problems"] == []


def test_path_gives_a_ball_separator():
    g = path_graph(10)
    out = menger2(g, [0], [10], 4)
    assert out.branch == "separator" and out.verified
    assert out.report["diameter"] <= 4
    assert separates(g, out.separator, *regions(g, [0], [10]))


def test_overlapping_sets():
    g = cycle_graph(30)
    out = menger2(g, [0, 15], [0, 15], 4)
    assert out.branch == "paths" and out.path_distance == 15


def test_disconnected_sets_are_separated_by_nothing():
    g = MetricGraph([0, 1, 2, 3], [(0, 1), (2, 3)])
    out = menger2(g, [0], [3], 2)
    assert out.branch == "separator" and out.separator.is_empty()


def test_bad_menger_input():
    with pytest.raises(GraphInputError):
        menger2(path_graph(3), [0], [3], 0)
    with pytest.raises(GraphInputError):
        menger2(path_graph(3), [0], [3], 4, mode="fast")
    with pytest.raises(GraphInputError):
        menger2(path_graph(3), [], [3], 4)


# -- variants -----------------------------------------------------------------------

@pytest.mark.parametrize("mode", ["primary", "aux"])
def test_endpoints_are_pinned(mode):
    g = cycle_graph(120)
    a = [i % 120 for i in range(-10, 11)]
    z = list(range(50, 71))
    out = menger2_endpoints(g, a, z, 16, 0, 60, mode)
    assert out.branch == "paths" and out.report["pinned"]
    ends = {p.start for p in out.paths} | {p.end for p in out.paths}
    assert {at(0), at(60)} <= ends
    assert distance_regions(g, out.paths[0].region(), out.paths[1].region()) >= out.a


def test_endpoints_on_a_path_project_the_separator():
    g = path_graph(30)
    out = menger2_endpoints(g, [0, 1, 2], [28, 29, 30], 4, 0, 30)
    assert out.branch == "separator"
    assert all(g.has_vertex(v) for v in out.separator.vertices)
    assert separates(g, out.separator, *regions(g, [0, 1, 2], [28, 29, 30]))


def test_endpoints_need_x_in_a():
    with pytest.raises(GraphInputError):
        menger2_endpoints(path_graph(5), [0], [5], 2, 1, 5)


def test_rails_give_paths_at_every_radius():
    g, rung = rails()
    runs = menger2_to_boundary(g, rung, 16, [10, 30, 60])
    assert [r.outcome.branch for r in runs] == ["paths"] * 3
    assert all(r.outcome.path_distance == 40 for r in runs)
    assert stabilization(runs)["stable_from"] == "10"


def test_long_path_separates_at_every_radius():
    runs = menger2_to_boundary(path_graph(50), [0], 4, [5, 20, 40])
    assert {r.outcome.branch for r in runs} == {"separator"}


def test_boundary_radius_zero_and_out_of_range():
    g, rung = rails()
    (run,) = menger2_to_boundary(g, rung, 16, [0])
    assert run.radius == 0 and run.outcome.verified
    with pytest.raises(GraphInputError):
        menger2_to_boundary(g, rung, 16, [500])


# -- brute-force far paths -------------------------------------------------------

def test_farpaths_single_path_iff_connected():
    assert far_paths_bruteforce(path_graph(5), [0], [5], 1, 100).found
    assert far_paths_bruteforce(MetricGraph([0, 1], []), [0], [1], 1, 1).status == "none"


def test_farpaths_on_c200():
    g = cycle_graph(N)
    res = far_paths_bruteforce(g, A200, Z200, 2, 30)
    assert res.found
    d = bfs(g, res.paths[0][0])
    assert len(res.paths) == 2 and all(d[v] >= 0 for v in res.paths[1])


def test_farpaths_on_a_theta_graph():
    g = theta_graph(3, 20)
    res = far_paths_bruteforce(g, [(i, 5) for i in range(3)], [(i, 15) for i in range(3)], 3, 5)
    assert res.found and len(res.paths) == 3
    assert far_paths_bruteforce(g, [(i, 5) for i in range(3)], [(i, 15) for i in range(3)], 3, 11).status == "none"


def test_farpaths_budget():
    g = random_connected(random.Random(1), 14, 14)
    assert far_paths_bruteforce(g, [0], [13], 2, 1, budget=3).status == "budget"


# -- properties ----------------------------------------------------------------------

def random_instance(seed: int, max_n: int):
    rng = random.Random(seed)
    n = rng.randrange(4, max_n + 1)
    g = random_ring(rng, n, rng.randrange(3)) if seed % 2 else random_connected(rng, n, rng.randrange(n))
    return rng, g, rng.sample(range(n), rng.randint(1, 3)), rng.sample(range(n), rng.randint(1, 3))


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4, 8]), st.sampled_from(["primary", "aux"]))
def test_outcomes_reverify(seed, k, mode):
    _, g, a, z = random_instance(seed, 40)
    out = menger2(g, a, z, k, mode)
    ra, rz = regions(g, a, z)
    if out.branch == "separator":
        assert separates(g, out.separator, ra, rz)
        assert out.separator.is_empty() or diameter(g, out.separator) <= k
    else:
        p, q = out.paths
        assert distance_regions(g, p.region(), q.region()) >= out.a
        for r in (p, q):
            assert ra.contains(r.start) and rz.contains(r.end)
    assert not out.report.get("meta_problems")


@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2, 3]))
def test_separator_rules_out_far_paths(seed, k):
    _, g, a, z = random_instance(seed, 12)
    if menger2(g, a, z, k).branch == "separator":
        assert far_paths_bruteforce(g, a, z, 2, k + 1).status == "none"

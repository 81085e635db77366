from __future__ import annotations

import random
from collections import deque
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from coarsegraph.metric import MetricGraph

settings.register_profile(
    "default", max_examples=30, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def random_connected(rng: random.Random, n: int, extra: int, lengths=(1,)) -> MetricGraph:
    order = list(range(n))
    rng.shuffle(order)
    edges = {}
    for i in range(1, n):
        u, v = order[i], order[rng.randrange(i)]
        edges[frozenset((u, v))] = (u, v, Fraction(rng.choice(lengths)))
    for _ in range(extra):
        u, v = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if u != v:
            edges.setdefault(frozenset((u, v)), (u, v, Fraction(rng.choice(lengths))))
    return MetricGraph(range(n), list(edges.values()))


@st.composite
def connected_graphs(draw, max_n: int = 12, weighted: bool = False):
    n = draw(st.integers(2, max_n))
    extra = draw(st.integers(0, n))
    seed = draw(st.integers(0, 2**32 - 1))
    lengths = (1, 2, Fraction(1, 2), Fraction(3, 2)) if weighted else (1,)
    return random_connected(random.Random(seed), n, extra, lengths)


def bfs(g: MetricGraph, s) -> dict:
    """Hop distances; an oracle independent of the library's Dijkstra."""
    dist = {s: 0}
    q = deque([s])
    while q:
        v = q.popleft()
        for w in g.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                q.append(w)
    return dist


def floyd(g: MetricGraph) -> dict:
    """All-pairs exact distances by Floyd-Warshall."""
    inf = float("inf")
    vs = list(g.vertices)
    d = {u: {v: (Fraction(0) if u == v else inf) for v in vs} for u in vs}
    for u, v, w in g.iter_edges():
        if w < d[u][v]:
            d[u][v] = d[v][u] = w
    for m in vs:
        for u in vs:
            dum = d[u][m]
            if dum == inf:
                continue
            for v in vs:
                if dum + d[m][v] < d[u][v]:
                    d[u][v] = dum + d[m][v]
    return d


def brick_cover(w: int, h: int, colours: int, bw: int = 8, bh: int = 4):
    """Running-bond bricks of bw x bh over the w x h grid, rows offset by half a brick.

    With three colours, brick j of row i gets colour (j - i % 2) mod 3 + 1, so no
    two touching bricks share a colour.  With two colours the bricks alternate
    along each row, which cannot keep touching bricks of adjacent rows apart.
    """
    from coarsegraph.metric import ColoredCover, Region, grid_graph

    g = grid_graph(w, h)
    items = []
    for i in range((h + bh - 1) // bh):
        shift = (bw // 2) * (i % 2)
        for j in range(-1, w // bw + 1):
            x0 = j * bw + shift
            cells = [(x, y) for x in range(max(x0, 0), min(x0 + bw, w)) for y in range(i * bh, min((i + 1) * bh, h))]
            if not cells:
                continue
            c = (j - i % 2) % 3 + 1 if colours == 3 else (j + i) % 2 + 1
            items.append((Region.of_vertices(g, cells), c))
    return ColoredCover.of(items)


def perturb(cover):
    """Give one brick the colour of a brick it touches; returns the new cover and both indices."""
    from coarsegraph.metric import ColoredCover

    items = list(cover.items)
    i = len(items) // 2
    region, _ = items[i]
    for j, (other, c) in enumerate(items):
        if j != i and _touching(region, other):
            items[i] = (region, c)
            return ColoredCover.of(items), (i, j)
    raise AssertionError("no touching brick")


def _touching(a, b) -> bool:
    return any(abs(x - u) + abs(y - v) == 1 for x, y in a.vertices for u, v in b.vertices)


def random_model(rng: random.Random, g: MetricGraph, pattern, tries: int = 50):
    """A structurally valid vertex-granular model of ``pattern`` in ``g``, or None.

    Branch sets grow randomly from distinct seeds; each branch path is a
    shortest path through vertices no other item uses.
    """
    from coarsegraph.fatminor import model_from_vertex_sets

    for _ in range(tries):
        used: set = set()
        sets = {}
        for v in pattern.vertices:
            free = [x for x in g.vertices if x not in used]
            if not free:
                break
            s = {rng.choice(free)}
            for _ in range(rng.randrange(3)):
                grow = [w for x in s for w in g.neighbors(x) if w not in used and w not in s]
                if grow:
                    s.add(rng.choice(sorted(grow)))
            sets[v] = s
            used |= s
        if len(sets) < len(pattern.vertices):
            continue
        paths = {}
        on_paths: set = set()
        for a, b in pattern.edges:
            blocked = (used - sets[a] - sets[b]) | on_paths
            p = _bfs_path(g, sets[a] - on_paths, sets[b] - on_paths, blocked)
            if p is None:
                break
            paths[(a, b)] = p
            used |= set(p)
            on_paths |= set(p)
        else:
            return model_from_vertex_sets(g, pattern, sets, paths)
    return None


def _bfs_path(g: MetricGraph, src: set, dst: set, blocked: set):
    prev = {s: None for s in sorted(src)}
    q = deque(sorted(src))
    while q:
        v = q.popleft()
        for w in g.neighbors(v):
            if w in prev or w in blocked:
                continue
            prev[w] = v
            if w in dst:
                path = [w]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            q.append(w)
    return None


def oracle_fatness(g: MetricGraph, model) -> Fraction | float:
    """Minimum non-exempt pair distance by all-pairs BFS over item vertex sets."""
    items = [(("B", v), set(model.branch_sets[v].vertices)) for v in model.pattern.vertices]
    items += [(("P", e), set(model.branch_paths[e].vertex_sequence())) for e in model.pattern.edges]
    d = {v: bfs(g, v) for v in g.vertices}
    best = float("inf")
    for i, (a, xs) in enumerate(items):
        for b, ys in items[i + 1:]:
            if a[0] != b[0] and (a[1] in b[1] if a[0] == "B" else b[1] in a[1]):
                continue
            best = min([best] + [d[x][y] for x in xs for y in ys if y in d[x]])
    return best


def subdivided_tree(rng: random.Random, nodes: int, max_sub: int) -> MetricGraph:
    """Random tree on ``nodes`` branch vertices with each edge subdivided 0..max_sub times."""
    edges = []
    for i in range(1, nodes):
        parent = rng.randrange(i)
        steps = rng.randint(0, max_sub)
        chain = [parent] + [("s", i, j) for j in range(steps)] + [i]
        edges += list(zip(chain, chain[1:]))
    return MetricGraph(range(nodes), edges)


def random_ring(rng: random.Random, n: int, chords: int) -> MetricGraph:
    """C_n plus a few random chords; long cycles give the path branch of Menger a chance."""
    edges = {frozenset((i, (i + 1) % n)): (i, (i + 1) % n) for i in range(n)}
    for _ in range(chords):
        u, v = rng.sample(range(n), 2)
        edges.setdefault(frozenset((u, v)), (u, v))
    return MetricGraph(range(n), list(edges.values()))


# acceptance results, printed as one line per criterion at the end of the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])

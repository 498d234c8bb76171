import json
from collections import deque

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdim.errors import InputError
from mdim.graph import (
    Graph,
    LatticeSpec,
    ball,
    ball_sites,
    build_box,
    build_honeycomb_patch,
    is_isomorphic,
    neighbors,
    site_parity,
    torus_graph,
    wl_hash,
)


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, edges)


def test_box_path():
    g = build_box(1, [3], False)
    assert g.n == 3 and g.num_edges == 2


def test_box_torus_regular():
    g = build_box(2, [4, 4], True)
    assert g.n == 16 and g.num_edges == 32
    assert all(g.degree(v) == 4 for v in range(g.n))


def test_box_2x3():
    g = build_box(2, [2, 3], False)
    assert (g.n, g.num_edges) == (6, 7)


def test_box_rejects_short_periodic_side():
    with pytest.raises(InputError):
        build_box(2, [2, 4], True)


def test_single_hexagon_is_c6():
    g = build_honeycomb_patch(1, 1)
    assert (g.n, g.num_edges) == (6, 6)
    assert all(g.degree(v) == 2 for v in range(6))


def test_periodic_honeycomb_is_cubic():
    g = build_honeycomb_patch(4, 4, True)
    assert all(g.degree(v) == 3 for v in range(g.n))


def _glued_cells(rows, cols):
    # independent oracle: pointy-top hexagons in offset rows, glued on shared corners
    offsets = [(0, 2), (1, 1), (1, -1), (0, -2), (-1, -1), (-1, 1)]
    corners = {}
    edges = set()
    for r in range(rows):
        for c in range(cols):
            cx, cy = 2 * c + (r % 2), 3 * r
            ids = [corners.setdefault((cx + dx, cy + dy), len(corners)) for dx, dy in offsets]
            for i in range(6):
                a, b = ids[i], ids[(i + 1) % 6]
                edges.add((min(a, b), max(a, b)))
    return len(corners), len(edges)


def test_open_2x2_patch_counts():
    g = build_honeycomb_patch(2, 2)
    assert (g.n, g.num_edges) == _glued_cells(2, 2)
    assert max(g.degree(v) for v in range(g.n)) == 3


def test_neighbors_examples():
    assert set(neighbors(LatticeSpec.parse("z2"), (0, 0))) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert sorted(neighbors(LatticeSpec.parse("bethe:4"), ())) == [(0,), (1,), (2,), (3,)]
    hexl = LatticeSpec.parse("hex")
    s = next(x for x in ball_sites(hexl, 3) if site_parity(x) == 0)
    nb = neighbors(hexl, s)
    assert len(nb) == 3 and all(site_parity(x) == 1 for x in nb)


@pytest.mark.parametrize("name", ["z2", "z3", "z4", "hex", "bethe:3", "bethe:5"])
def test_neighbor_rule_symmetric_and_regular(name):
    spec = LatticeSpec.parse(name)
    for s in ball_sites(spec, 3):
        nb = neighbors(spec, s)
        assert len(set(nb)) == spec.coordination
        assert all(s in neighbors(spec, t) for t in nb)


def test_ball_examples():
    g = ball(LatticeSpec.parse("z2"), 1)
    assert g.n == 5 and g.num_edges == 4
    t = ball(LatticeSpec.parse("bethe:3"), 2)
    assert t.n == 10 and t.num_edges == 9


def _bfs_ball(g, root, r):
    dist = {root: 0}
    q = deque([root])
    while q:
        x = q.popleft()
        if dist[x] == r:
            continue
        for y in g.adjacency[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    keep = sorted(dist)
    idx = {v: i for i, v in enumerate(keep)}
    return Graph.from_edges(len(keep), [(idx[u], idx[v]) for u, v in g.edges if u in idx and v in idx])


@pytest.mark.parametrize("r", [1, 2, 3])
def test_hex_ball_matches_patch(r):
    patch = build_honeycomb_patch(12, 12, True)
    ref = _bfs_ball(patch, 0, r)
    assert is_isomorphic(ball(LatticeSpec.parse("hex"), r), ref)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_z2_ball_matches_torus(r):
    ref = _bfs_ball(torus_graph(12, 12), 0, r)
    assert is_isomorphic(ball(LatticeSpec.parse("z2"), r), ref)


def test_torus_vertex_transitive():
    g = torus_graph(4, 5)
    hashes = {wl_hash(g.delete_vertex(v)) for v in range(g.n)}
    assert len(hashes) == 1
    assert is_isomorphic(g.delete_vertex(0), g.delete_vertex(13))


def test_json_format():
    g = Graph.from_edges(3, [(2, 1), (0, 1)])
    obj = json.loads(g.to_json())
    assert obj == {"n": 3, "edges": [[0, 1], [1, 2]]}
    assert Graph.from_json(g.to_json()) == g


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 1), (1, 0)], [(0, 5)]])
def test_rejects_bad_edges(edges):
    with pytest.raises(InputError):
        Graph.from_edges(3, edges)


@given(graphs())
def test_handshake_and_adjacency(g):
    assert sum(g.degree(v) for v in range(g.n)) == 2 * g.num_edges
    for u, v in g.edges:
        assert v in g.adjacency[u] and u in g.adjacency[v]
    assert all(list(a) == sorted(a) for a in g.adjacency)


@given(graphs(), st.data())
def test_deletions_are_new_graphs(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    h = g.delete_vertex(v)
    assert h.n == g.n - 1 and h.num_edges == g.num_edges - g.degree(v)
    assert g.n == len(g.adjacency)  # original untouched


@given(graphs())
def test_wl_hash_relabel_invariant(g):
    perm = list(range(g.n))[::-1]
    h = Graph.from_edges(g.n, [(perm[u], perm[v]) for u, v in g.edges])
    assert wl_hash(g) == wl_hash(h)

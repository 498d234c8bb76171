from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdim.corpus import corpus, petersen, pyramid
from mdim.errors import ResourceLimitError
from mdim.graph import Graph, LatticeSpec, ball, complete_graph, cycle_graph, neighbors, path_graph, torus_graph
from mdim.matching import finite_moments, matching_counts
from mdim.reference import HEX_EVEN_MOMENTS
from mdim.saw import (
    MomentSequence,
    adjacency_power_counts,
    average_finite_moments,
    build_saw_tree,
    closed_walk_counts,
    count_self_avoiding_walks,
    lattice_moments,
    walk_bound,
)

# frozen walk-tree node lists of the pyramid, vertices numbered 1..5 with 1 the apex
FIG_TREE_AT_1 = (
    "1 12 123 1234 12345 125 1254 12543 13 132 1325 13254 134 1345 13452 14 143 1432 14325 "
    "145 1452 14523 15 152 1523 15234 154 1543 15432"
).split()
FIG_TREE_AT_2 = (
    "2 21 213 2134 21345 214 2143 2145 215 2154 21543 23 231 2314 23145 2315 23154 234 2341 "
    "23415 2345 23451 25 251 2513 25134 2514 25143 254 2541 25413 2543 25431"
).split()


@st.composite
def graphs(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, edges)


def _saw_brute(lattice, n):
    counts = [0] * (n + 1)

    def rec(walk, seen):
        counts[len(walk) - 1] += 1
        if len(walk) - 1 == n:
            return
        for t in neighbors(lattice, walk[-1]):
            if t not in seen:
                seen.add(t)
                rec(walk + [t], seen)
                seen.remove(t)

    o = lattice.origin()
    rec([o], {o})
    return counts


# ------------------------------------------------------------------ examples


def test_bethe4_examples():
    a = closed_walk_counts(LatticeSpec.parse("bethe:4"), 6).a
    assert (a[2], a[4], a[6]) == (4, 28, 232)
    assert adjacency_power_counts(ball(LatticeSpec.parse("bethe:4"), 3), 0, 6)[6] == 232


def test_honeycomb_a6():
    assert closed_walk_counts(LatticeSpec.parse("hex"), 6).a[6] == 87


def test_pyramid_apex_a4():
    assert closed_walk_counts(pyramid(), 4, 0).a[4] == 24


def test_hex_k12():
    assert lattice_moments(LatticeSpec.parse("hex"), 12).mu == (1, 0, 3, 0, 15, 0, 87, 0, 543, 0, 3543, 0, 23817)


def test_z2_mu2():
    assert lattice_moments(LatticeSpec.parse("z2"), 2).mu[2] == 4


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_bethe_matches_ball_adjacency(d):
    K = 14
    ref = adjacency_power_counts(ball(LatticeSpec.parse(f"bethe:{d}"), K // 2), 0, K)
    assert list(lattice_moments(LatticeSpec.parse(f"bethe:{d}"), K).mu) == ref


def test_average_examples():
    assert average_finite_moments(pyramid(), 2).mu[2] == Fraction(16, 5)
    assert average_finite_moments(path_graph(3), 4).mu[4] == Fraction(8, 3)
    for g in (cycle_graph(6), petersen()):
        assert average_finite_moments(g, 10).mu == closed_walk_counts(g, 10, 0).a


def test_saw_tree_examples():
    t = build_saw_tree(complete_graph(2), 0, 5)
    assert t.n == 2 and t.num_edges == 1
    c5 = build_saw_tree(cycle_graph(5), 0)
    assert c5.n == 9 and c5.degree(0) == 2 and c5.max_degree == 2


@pytest.mark.parametrize("root,expected", [(0, FIG_TREE_AT_1), (1, FIG_TREE_AT_2)])
def test_pyramid_trees_match_frozen_lists(root, expected):
    t = build_saw_tree(pyramid(), root)
    assert sorted("".join(str(x + 1) for x in lab) for lab in t.labels) == sorted(expected)


def test_pyramid_tree_shape():
    t = build_saw_tree(pyramid(), 0)
    assert t.n == 29 and t.degree(0) == 4
    leaf_depths = {len(lab) - 1 for i, lab in enumerate(t.labels) if i and t.degree(i) == 1}
    assert leaf_depths == {4}


# --------------------------------------------------------------- properties


@given(graphs(), st.data())
def test_series_equals_tree_adjacency_powers(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    K = 10
    tree = build_saw_tree(g, v, K // 2)
    assert list(closed_walk_counts(g, K, v).a) == adjacency_power_counts(tree, 0, K)


@given(graphs())
def test_average_equals_newton(g):
    assert average_finite_moments(g, 8).mu == finite_moments(matching_counts(g), 8).mu


@pytest.mark.parametrize("name", ["z2", "z3", "hex", "bethe:3"])
def test_walk_table_invariants(name):
    spec = LatticeSpec.parse(name)
    D = spec.coordination
    a = closed_walk_counts(spec, 16).a
    assert a[0] == 1 and all(x == 0 for x in a[1::2]) and a[2] == D
    # support bound (4(D-1))^(k/2); the hex sequence exceeds D (D-1)^(k-1) already at k = 8
    assert all(a[k] <= walk_bound(D, k // 2) for k in range(2, 17, 2))
    assert all(a[k + 2] >= a[k] for k in range(0, 15, 2))


def test_naive_walk_bound_fails_for_hex():
    a = closed_walk_counts(LatticeSpec.parse("hex"), 8).a
    assert a[8] == 543 > 3 * 2**7


def test_hex_vs_bethe3_first_divergence():
    # the walk tree of the honeycomb loses branches only at depth 6 (closing a hexagon)
    h = lattice_moments(LatticeSpec.parse("hex"), 14).mu
    b = lattice_moments(LatticeSpec.parse("bethe:3"), 14).mu
    assert h[:11] == b[:11]
    assert h[12] == 23817 < b[12] == 23823


@pytest.mark.parametrize("n", [4, 5, 6])
def test_torus_locality(n):
    K = 2 * (n - 2)  # largest K with n > K/2 + 1
    mu = average_finite_moments(torus_graph(n, n), K).mu
    assert mu == lattice_moments(LatticeSpec.parse("z2"), K).mu


def _hankel_psd(mu, m):
    H = np.array([[float(mu[i + j]) for j in range(m + 1)] for i in range(m + 1)])
    H /= np.sqrt(np.outer(np.diag(H), np.diag(H)))
    return np.linalg.eigvalsh(H).min() > -1e-9


@pytest.mark.parametrize("name", ["z2", "z3", "hex", "bethe:4"])
def test_hankel_positivity_lattices(name):
    mu = lattice_moments(LatticeSpec.parse(name), 16).mu
    assert _hankel_psd(mu, 8)
    R2 = 4 * (LatticeSpec.parse(name).coordination - 1)
    assert all(mu[2 * k] <= R2**k for k in range(9))


@pytest.mark.parametrize("name", ["pyramid", "petersen", "cube", "grid3x3"])
def test_hankel_positivity_finite(name):
    assert _hankel_psd(average_finite_moments(corpus()[name], 8).mu, 4)


def test_reference_list_reproduced():
    mu = lattice_moments(LatticeSpec.parse("hex"), 28).mu
    assert mu[0::2] == HEX_EVEN_MOMENTS[:15]


def test_saw_counts_against_brute_force():
    for name, n in (("z2", 8), ("hex", 8), ("z3", 5)):
        assert count_self_avoiding_walks(LatticeSpec.parse(name), n) == _saw_brute(LatticeSpec.parse(name), n)


def test_node_budget():
    with pytest.raises(ResourceLimitError):
        closed_walk_counts(LatticeSpec.parse("z2"), 20, node_budget=50)


def test_options_do_not_change_results():
    spec = LatticeSpec.parse("z3")
    ref = closed_walk_counts(spec, 14).a
    assert closed_walk_counts(spec, 14, use_symmetry=False).a == ref
    assert closed_walk_counts(spec, 14, threads=3).a == ref
    assert closed_walk_counts(spec, 14, split_depth=1).a == ref
    assert closed_walk_counts(spec, 14, split_depth=4).a == ref


def test_moment_json_roundtrip():
    mu = average_finite_moments(pyramid(), 6)
    back = MomentSequence.from_json_obj(mu.to_json_obj())
    assert back.mu == mu.mu and back.D == mu.D

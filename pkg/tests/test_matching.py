import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_matching_counts, brute_matchings_by_subsets, poly_eval
from mdim import roots as rp
from mdim.corpus import circulant_corpus, corpus, pyramid
from mdim.errors import InputError, ResourceLimitError
from mdim.graph import Graph, complete_graph, cycle_graph, cylinder_graph, path_graph, torus_graph
from mdim.matching import (
    MatchingPolynomial,
    _EdgeRecursion,
    finite_moments,
    godsil_ratio_check,
    heilmann_lieb_check,
    isolate_roots,
    matching_counts,
    root_multiplicity,
    strip_matching_counts,
    torus_matching_counts,
)

CORPUS = corpus()


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, edges)


# ----------------------------------------------------------- matching counts


def test_small_examples():
    assert matching_counts(complete_graph(2)).m == (1, 1)
    assert matching_counts(path_graph(3)).m == (1, 2)


def test_pyramid_counts_against_subset_oracle():
    g = pyramid()
    assert matching_counts(g).m == (1, 8, 10)
    assert brute_matchings_by_subsets(g.n, g.edges) == (1, 8, 10)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_counts_against_enumeration(name):
    g = CORPUS[name]
    assert matching_counts(g).m == brute_matching_counts(g.n, g.edges)


def test_edge_recursion_route_on_larger_graph():
    # above the subset-recursion cutoff the isomorphism-memoised edge recursion runs
    g = cylinder_graph(5, 4)
    assert g.n > 18
    assert matching_counts(g) == strip_matching_counts(5, 4)


def test_memo_budget_enforced():
    with pytest.raises(ResourceLimitError):
        matching_counts(torus_graph(4, 5), memo_limit=10)


@given(graphs())
def test_counts_property(g):
    p = matching_counts(g)
    assert p.m == brute_matching_counts(g.n, g.edges)
    assert p.m[0] == 1 and (len(p.m) == 1 or p.m[1] == g.num_edges)
    assert all(x > 0 for x in p.m) and p.nu <= g.n // 2


def test_matching_polynomial_validation():
    with pytest.raises(InputError):
        MatchingPolynomial(2, (2, 1))
    with pytest.raises(InputError):
        MatchingPolynomial(2, (1, 1, 1))


# ------------------------------------------------------------ transfer matrix


def test_strip_examples():
    assert strip_matching_counts(4, 1).m == (1, 4, 2)
    assert strip_matching_counts(3, 1).m == (1, 3)
    p = strip_matching_counts(10, 2)
    assert p.n == 20 and p.m[1] == 30


@pytest.mark.parametrize("m", [3, 4, 5, 6])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_strip_equals_recursion(m, n):
    assert strip_matching_counts(m, n) == matching_counts(cylinder_graph(m, n))


@pytest.mark.parametrize("m,n", [(3, 3), (3, 4), (4, 4), (4, 3), (3, 5)])
def test_torus_transfer_equals_recursion(m, n):
    g = torus_graph(m, n)
    assert torus_matching_counts(m, n).m == tuple(_EdgeRecursion(10**7).count(frozenset(g.edges)))


def test_strip_width_limit():
    with pytest.raises(ResourceLimitError):
        strip_matching_counts(17, 2)
    with pytest.raises(InputError):
        strip_matching_counts(2, 2)


# ------------------------------------------------------------------- roots


def _contains_sqrt(lo, hi, s):
    # lo <= sqrt(s) <= hi for lo, hi >= 0
    return lo * lo <= s <= hi * hi


def test_roots_k2():
    rm = isolate_roots(matching_counts(complete_graph(2)))
    assert len(rm.roots) == 2
    assert rm.roots[0][0] <= -1 <= rm.roots[0][1] and rm.roots[1][0] <= 1 <= rm.roots[1][1]


def test_roots_p3_width():
    rm = isolate_roots(matching_counts(path_graph(3)), Fraction(1, 10**6))
    assert len(rm.roots) == 3
    (a, b, _), (c, d, k0), (e, f, _) = rm.roots
    assert c == d == 0 and k0 == 1
    assert _contains_sqrt(e, f, 2) and f - e <= Fraction(1, 10**6)
    assert (a, b) == (-f, -e)


def test_roots_pyramid():
    rm = isolate_roots(matching_counts(pyramid()))
    assert len(rm.roots) == 5 and all(k == 1 for *_, k in rm.roots)
    mids = rm.midpoints()
    assert np.allclose(mids, -mids[::-1])
    # against the explicit roots of x^5 - 8x^3 + 10x
    expect = sorted([0.0] + [s * math.sqrt(4 + d * math.sqrt(6)) for s in (1, -1) for d in (1, -1)])
    assert np.allclose(mids, expect, atol=1e-6)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_roots(name):
    g = CORPUS[name]
    p = matching_counts(g)
    rm = isolate_roots(p)
    assert sum(k for *_, k in rm.roots) == g.n
    for (lo1, hi1, _), (lo2, hi2, _) in zip(rm.roots, rm.roots[1:]):
        assert hi1 < lo2
    assert heilmann_lieb_check(p, g.max_degree)
    # each interval really contains a root: sign change or exact zero
    X = p.x_coefficients()
    for lo, hi, k in rm.roots:
        if lo == hi:
            assert poly_eval(X, lo) == 0
        elif k % 2:
            assert poly_eval(X, lo) * poly_eval(X, hi) < 0


def test_sturm_route_agrees_with_fast_route():
    p = strip_matching_counts(4, 3)
    P = p.y_polynomial()
    for factor, _ in rp.squarefree_decomposition(P):
        fast = rp.isolate_positive_fast(factor)
        slow = rp.isolate_positive(factor)
        assert fast is not None and len(fast) == len(slow) == rp.degree(factor)
        for (a, b), (c, d) in zip(sorted(fast), sorted(slow)):
            assert max(a, c) <= min(b, d)  # same root in both


def test_multiple_roots_reported():
    # K_{1,3}: mu = x^4 - 3x^2, root 0 of multiplicity 2
    p = matching_counts(Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)]))
    rm = isolate_roots(p)
    assert (Fraction(0), Fraction(0), 2) in rm.roots
    assert root_multiplicity(p, 0) == 2


def test_heilmann_lieb_check_boundary():
    # the star K_{1,4} has mu = x^5 - 4x^3: roots 0, +-2
    p = matching_counts(Graph.from_edges(5, [(0, i) for i in range(1, 5)]))
    assert heilmann_lieb_check(p, 4)
    assert heilmann_lieb_check(p, 2)  # +-2 sits exactly on the bound 2 sqrt(1)
    assert not heilmann_lieb_check(p, 1)


# ----------------------------------------------------------------- moments


def test_finite_moments_examples():
    mu = finite_moments(matching_counts(pyramid()), 4).mu
    assert mu[2] == Fraction(16, 5)
    assert finite_moments(matching_counts(complete_graph(2)), 6).mu == (1, 0, 1, 0, 1, 0, 1)
    assert finite_moments(matching_counts(path_graph(3)), 4).mu[4] == Fraction(8, 3)


@given(graphs())
def test_mu2_is_average_degree(g):
    mu = finite_moments(matching_counts(g), 3).mu
    assert mu[0] == 1 and mu[1] == 0 and mu[3] == 0
    assert mu[2] == Fraction(2 * g.num_edges, g.n)


@pytest.mark.parametrize("name", ["pyramid", "petersen", "cube", "K3,3"] + sorted(k for k in CORPUS if k.startswith("random"))[:3])
def test_finite_moments_match_roots(name):
    g = CORPUS[name]
    p = matching_counts(g)
    roots = isolate_roots(p, Fraction(1, 10**12)).expanded()
    mu = finite_moments(p, 10).mu
    for k in range(11):
        assert float(mu[k]) == pytest.approx(np.mean(roots**k), rel=1e-9, abs=1e-9)


# ------------------------------------------------------------ identities


def _poly_derivative(c):
    return [k * x for k, x in enumerate(c)][1:]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_derivative_identity(name):
    # mu'(G, x) = sum_v mu(G - v, x)
    g = CORPUS[name]
    if g.n == 0:
        return
    lhs = _poly_derivative(matching_counts(g).x_coefficients())
    rhs = [0] * max(g.n, 1)
    for v in range(g.n):
        for i, c in enumerate(matching_counts(g.delete_vertex(v)).x_coefficients()):
            rhs[i] += c
    assert lhs == rhs[: len(lhs)] and not any(rhs[len(lhs):])


def test_godsil_examples():
    assert all(godsil_ratio_check(complete_graph(2), v, 6) for v in (0, 1))
    assert godsil_ratio_check(pyramid(), 1, 10)
    assert all(godsil_ratio_check(cycle_graph(5), v, 10) for v in range(5))


@given(graphs(max_n=7), st.data())
def test_godsil_property(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    assert godsil_ratio_check(g, v, 10)


@pytest.mark.parametrize("name,g", sorted(circulant_corpus(12).items()))
def test_circulants_have_distinct_roots(name, g):
    p = matching_counts(g)
    assert rp.is_squarefree(p.x_coefficients())


def test_root_multiplicity_exact():
    p = matching_counts(path_graph(3))
    assert root_multiplicity(p, 0) == 1
    assert root_multiplicity(p, 1) == 0
    assert root_multiplicity(matching_counts(complete_graph(2)), -1) == 1

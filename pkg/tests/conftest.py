import itertools
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def brute_matching_counts(n, edges):
    """m_k by listing every matching (edges taken in increasing index order)."""
    edges = sorted(edges)
    counts = [0] * (n // 2 + 1)

    def rec(start, used, k):
        counts[k] += 1
        for i in range(start, len(edges)):
            u, v = edges[i]
            if not used >> u & 1 and not used >> v & 1:
                rec(i + 1, used | 1 << u | 1 << v, k + 1)

    rec(0, 0, 0)
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    return tuple(counts)


def brute_matchings_by_subsets(n, edges):
    """m_k straight from the definition: edge subsets with distinct endpoints."""
    counts = [0] * (n // 2 + 1)
    for k in range(len(counts)):
        for sub in itertools.combinations(edges, k):
            ends = [x for e in sub for x in e]
            if len(set(ends)) == 2 * k:
                counts[k] += 1
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    return tuple(counts)


def poly_eval(coeffs, x):
    """Ascending-coefficient polynomial at an exact rational."""
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@pytest.fixture(scope="session")
def z2_moments_32():
    from mdim.graph import LatticeSpec
    from mdim.saw import lattice_moments

    return lattice_moments(LatticeSpec.parse("z2"), 32, threads=4)


@pytest.fixture(scope="session")
def z3_moments_24():
    from mdim.graph import LatticeSpec
    from mdim.saw import lattice_moments

    return lattice_moments(LatticeSpec.parse("z3"), 24, threads=4)


@pytest.fixture(scope="session")
def hex_reference():
    from mdim.reference import reference_moments

    return reference_moments("hex")

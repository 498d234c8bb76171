import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdim.corpus import corpus, pyramid
from mdim.errors import InputError, OutOfRangeError
from mdim.graph import Graph, LatticeSpec, complete_graph, cycle_graph, path_graph
from mdim.matching import matching_counts, strip_matching_counts, torus_matching_counts
from mdim.saw import lattice_moments
from mdim.thermo import (
    F,
    ThermoContext,
    darroch_bounds_check,
    free_energy,
    invert_pressure,
    lambda_at_pstar,
    lambda_of_p,
    log_partition_density,
    mayer_to_moments,
    moments_to_mayer,
    pressure,
)

CORPUS = corpus()
K2 = ThermoContext.finite(complete_graph(2))
C4 = ThermoContext.finite(cycle_graph(4))


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), min_size=1, unique=True))
    return Graph.from_edges(n, edges)


# ---------------------------------------------------------- finite graphs


def test_k2_closed_forms():
    # M = 1 + t, p = t / (1 + t)
    assert pressure(K2, 1).exact == Fraction(1, 2)
    assert log_partition_density(K2, 1).contains(math.log(2) / 2)
    assert invert_pressure(K2, Fraction(1, 2)).t == 1
    assert invert_pressure(K2, Fraction(2, 3)).t == 2
    assert lambda_of_p(K2, Fraction(1, 2)).contains(Fraction(math.log(2) / 2))
    assert lambda_of_p(K2, 1).exact == 0


def test_c4_values():
    # m = (1, 4, 2)
    assert free_energy(C4).contains(math.log(7) / 4)
    assert abs(lambda_at_pstar(C4).value - math.log(2) / 4) <= 1e-15
    assert lambda_of_p(C4, Fraction(3, 2)).exact == 0


def test_certified_logs_are_tight():
    fe = free_energy(ThermoContext.finite(pyramid()))
    assert fe.eps <= 1e-15 and abs(fe.value - math.log(19) / 5) <= 1e-15


def test_empty_graph():
    ctx = ThermoContext.finite(Graph.from_edges(3, []))
    assert free_energy(ctx).exact == 0 and pressure(ctx, 5).exact == 0
    assert lambda_at_pstar(ctx).exact == 0


def test_out_of_range():
    with pytest.raises(OutOfRangeError):
        invert_pressure(K2, 1)
    with pytest.raises(OutOfRangeError):
        invert_pressure(K2, Fraction(-1, 2))
    with pytest.raises(InputError):
        pressure(K2, -1)
    with pytest.raises(InputError):
        ThermoContext()


def test_path_pstar():
    # P3 has nu = 1, so p* = 2/3
    ctx = ThermoContext.finite(path_graph(3))
    assert ctx.pstar == Fraction(2, 3)
    with pytest.raises(OutOfRangeError):
        invert_pressure(ctx, Fraction(2, 3))


@given(graphs(), st.fractions(Fraction(1, 20), 20))
def test_pressure_inverse_roundtrip(g, t):
    ctx = ThermoContext.finite(g)
    p = pressure(ctx, t).exact
    inv = invert_pressure(ctx, p)
    assert inv.lo <= t <= inv.hi and inv.hi - inv.lo <= Fraction(1, 10**10)


@given(graphs())
def test_pressure_monotone(g):
    ctx = ThermoContext.finite(g)
    ts = [Fraction(k, 4) for k in range(0, 40)]
    ps = [pressure(ctx, t).exact for t in ts]
    assert all(a < b for a, b in zip(ps, ps[1:]))
    assert ps[-1] < ctx.pstar


@pytest.mark.parametrize("g", [complete_graph(2), cycle_graph(4), cycle_graph(6), pyramid()], ids=["K2", "C4", "C6", "pyramid"])
@pytest.mark.parametrize("t", [Fraction(1, 2), Fraction(1), Fraction(3)])
def test_lambda_derivative(g, t):
    # d lambda / dp = -ln t(p) / 2
    ctx = ThermoContext.finite(g)
    p = pressure(ctx, t).exact
    h = Fraction(1, 10**4)
    d = (lambda_of_p(ctx, p + h).value - lambda_of_p(ctx, p - h).value) / (2 * float(h))
    assert abs(d + math.log(t) / 2) <= 1e-4


@given(graphs())
def test_lambda_concave(g):
    ctx = ThermoContext.finite(g)
    ps = [ctx.pstar * Fraction(k, 8) for k in range(1, 8)]
    lam = [lambda_of_p(ctx, p).value for p in ps]
    assert all(lam[i - 1] + lam[i + 1] - 2 * lam[i] <= 1e-12 for i in range(1, len(lam) - 1))


@pytest.mark.parametrize("a", [1, 2, 3])
@pytest.mark.parametrize("b", [1, 2, 3])
def test_disjoint_union_weighted(a, b):
    # ln M / n is the vertex-weighted mean over components
    ga, gb = path_graph(a + 1), cycle_graph(b + 2)
    u = ga.disjoint_union(gb)
    for t in (Fraction(1, 3), Fraction(1), Fraction(7, 2)):
        lhs = log_partition_density(ThermoContext.finite(u), t).value
        rhs = (ga.n * log_partition_density(ThermoContext.finite(ga), t).value
               + gb.n * log_partition_density(ThermoContext.finite(gb), t).value) / u.n
        assert lhs == pytest.approx(rhs, abs=1e-14)
        pu = pressure(ThermoContext.finite(u), t).exact
        pa = pressure(ThermoContext.finite(ga), t).exact
        pb = pressure(ThermoContext.finite(gb), t).exact
        assert pu * u.n == pa * ga.n + pb * gb.n


def test_F_at_one_is_free_energy():
    ctx = ThermoContext.finite(cycle_graph(6))
    assert F(ctx, 1).value == pytest.approx(free_energy(ctx).value, abs=1e-15)


# ------------------------------------------------------------------ mayer


def test_mayer_examples():
    assert mayer_to_moments([4], 4).mu[2] == 4
    assert mayer_to_moments([2], 4, halved=True).mu[2] == 4
    assert mayer_to_moments([4, -28], 4).mu[4] == 28


def test_mayer_sign_violation():
    with pytest.raises(InputError):
        mayer_to_moments([4, 28], 4)


def test_mayer_roundtrip():
    mu = lattice_moments(LatticeSpec.parse("z2"), 12)
    back = mayer_to_moments(moments_to_mayer(mu), 4)
    assert back.mu == mu.mu


# ---------------------------------------------------------------- darroch


def test_darroch_examples():
    assert darroch_bounds_check(complete_graph(2), 1)
    assert darroch_bounds_check(pyramid(), 2)
    assert darroch_bounds_check(strip_matching_counts(10, 4), 10)


@pytest.mark.parametrize("name", sorted(n for n, g in CORPUS.items() if g.num_edges))
def test_darroch_corpus(name):
    p = matching_counts(CORPUS[name])
    assert all(darroch_bounds_check(p, k) for k in range(1, p.nu + 1))


def test_darroch_rejects_bad_k():
    with pytest.raises(InputError):
        darroch_bounds_check(complete_graph(2), 2)


# ---------------------------------------------------------------- lattices


def test_lattice_intervals_shrink(z2_moments_32):
    prev_f = prev_p = math.inf
    for K in (16, 24, 32):
        ctx = ThermoContext.lattice(z2_moments_32.truncate(K))
        f, p = free_energy(ctx), pressure(ctx, 1)
        assert f.eps < prev_f and p.eps < prev_p
        prev_f, prev_p = f.eps, p.eps


def test_tori_approach_square_lattice(z2_moments_32):
    ctx = ThermoContext.lattice(z2_moments_32.truncate(24))
    f, p = free_energy(ctx), pressure(ctx, 1)
    gaps = []
    for n in (4, 6, 8):
        tctx = ThermoContext.finite(torus_matching_counts(n, n))
        gaps.append(abs(free_energy(tctx).value - f.value))
    assert gaps[0] > gaps[1] > gaps[2]
    t8 = ThermoContext.finite(torus_matching_counts(8, 8))
    assert f.contains(Fraction(free_energy(t8).value))
    assert p.contains(pressure(t8, 1).exact)


def test_lattice_lambda_half(z2_moments_32):
    ctx = ThermoContext.lattice(z2_moments_32.truncate(24))
    lam = lambda_of_p(ctx, Fraction(1, 2))
    assert lam.eps <= 1e-4
    # t(1/2) on Z^2 sits near 0.434; 8x8 torus gives an independent estimate
    t8 = ThermoContext.finite(torus_matching_counts(8, 8))
    assert abs(lambda_of_p(t8, Fraction(1, 2)).value - lam.value) <= 1e-4 + lam.eps


def test_lattice_lambda_limit_is_upper_estimate():
    ctx = ThermoContext.lattice(lattice_moments(LatticeSpec.parse("z2"), 16))
    cv = lambda_at_pstar(ctx)
    assert cv.eps == math.inf and 0 < cv.value < free_energy(ctx).hi


def test_F_edge_activities():
    assert F(C4, 0).exact == 0
    with pytest.raises(InputError):
        F(C4, -1)

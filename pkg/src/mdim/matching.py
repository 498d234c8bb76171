"""Matching polynomials of finite graphs and their root measures."""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import roots as rp
from .errors import InconsistencyError, InputError, ResourceLimitError
from .graph import Graph, is_isomorphic, wl_hash
from .saw import MomentSequence, closed_walk_counts

log = logging.getLogger(__name__)

DEFAULT_MEMO_LIMIT = 2_000_000


@dataclass(frozen=True)
class MatchingPolynomial:
    """Matching counts ``m[k]`` (k-matchings) of a graph on ``n`` vertices."""

    n: int
    m: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.m or self.m[0] != 1:
            raise InputError("m_0 must be 1")
        if 2 * (len(self.m) - 1) > self.n:
            raise InputError("more dimers than the vertex count allows")

    @property
    def nu(self) -> int:
        """Matching number."""
        return len(self.m) - 1

    def x_coefficients(self) -> list[int]:
        """Coefficients of mu(G, x) = sum (-1)^k m_k x^(n-2k), ascending powers."""
        c = [0] * (self.n + 1)
        for k, mk in enumerate(self.m):
            c[self.n - 2 * k] = (-1) ** k * mk
        return c

    def y_polynomial(self) -> list[int]:
        """P(y) with mu(G, x) = x^(n - 2 nu) P(x^2); ascending powers of y."""
        nu = self.nu
        return [(-1) ** (nu - j) * self.m[nu - j] for j in range(nu + 1)]

    def partition_function(self, t) -> Fraction:
        """M(G, t) = sum m_k t^k, exact for rational t."""
        t = Fraction(t)
        return sum((mk * t**k for k, mk in enumerate(self.m)), Fraction(0))

    def partition_derivative(self, t) -> Fraction:
        t = Fraction(t)
        return sum((k * mk * t ** (k - 1) for k, mk in enumerate(self.m) if k), Fraction(0))

    def to_json_obj(self) -> dict:
        return {"n": self.n, "m": [str(x) for x in self.m]}


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_add_shift(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """a(t) + t * b(t)."""
    out = list(a) + [0] * max(0, len(b) + 1 - len(a))
    for j, y in enumerate(b):
        out[j + 1] += y
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


class _EdgeRecursion:
    """M(G) = M(G - e) + t M(G - u - v), memoised on graphs up to isomorphism."""

    def __init__(self, memo_limit: int):
        self.memo_limit = memo_limit
        self.exact: dict[frozenset, tuple[int, ...]] = {}
        self.buckets: dict[str, list[tuple[Graph, tuple[int, ...]]]] = {}
        self.size = 0

    def _store(self, edges: frozenset, g: Graph | None, key: str | None, value: tuple[int, ...]) -> None:
        self.exact[edges] = value
        if key is not None:
            self.buckets.setdefault(key, []).append((g, value))
        self.size += 1
        if self.size > self.memo_limit:
            raise ResourceLimitError(f"matching memo exceeded {self.memo_limit} entries")

    def count(self, edges: frozenset) -> tuple[int, ...]:
        if not edges:
            return (1,)
        if len(edges) == 1:
            return (1, 1)
        hit = self.exact.get(edges)
        if hit is not None:
            return hit
        adj: dict[int, set[int]] = {}
        for u, v in edges:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        comps = _components(adj)
        if len(comps) > 1:
            result: list[int] = [1]
            for comp in comps:
                sub = frozenset(e for e in edges if e[0] in comp)
                result = _poly_mul(result, self.count(sub))
            value = tuple(result)
            self._store(edges, None, None, value)
            return value
        verts = sorted(adj)
        index = {v: i for i, v in enumerate(verts)}
        g = Graph.from_edges(len(verts), [(index[u], index[v]) for u, v in edges])
        key = None
        if len(verts) >= 6:
            key = wl_hash(g)
            for h, value in self.buckets.get(key, ()):
                if is_isomorphic(g, h):
                    self.exact[edges] = value
                    return value
        # edge at a maximum-degree vertex, towards its highest-degree neighbor
        u = max(verts, key=lambda x: (len(adj[x]), -x))
        v = max(adj[u], key=lambda x: (len(adj[x]), -x))
        e = (min(u, v), max(u, v))
        without_e = self.count(edges - {e})
        without_uv = self.count(frozenset(f for f in edges if u not in f and v not in f))
        value = tuple(_poly_add_shift(without_e, without_uv))
        self._store(edges, g, key, value)
        return value


def _components(adj: dict[int, set[int]]) -> list[set[int]]:
    seen: set[int] = set()
    comps = []
    for s in adj:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        comps.append(comp)
    return comps


SUBSET_DP_MAX_N = 18


def _subset_counts(g: Graph) -> tuple[int, ...]:
    """M(S) = M(S - v) + t sum_{u ~ v} M(S - v - u), v the lowest vertex of S.

    Polynomials in t are packed into one integer with ``bits`` per coefficient.
    """
    n = g.n
    bits = n * max(1, n.bit_length()) + 1
    nbr = [0] * n
    for u, v in g.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    memo = {0: 1}

    def rec(S: int) -> int:
        hit = memo.get(S)
        if hit is not None:
            return hit
        low = S & -S
        v = low.bit_length() - 1
        rest = S ^ low
        total = rec(rest)
        cand = nbr[v] & rest
        acc = 0
        while cand:
            b = cand & -cand
            acc += rec(rest ^ b)
            cand ^= b
        total += acc << bits
        memo[S] = total
        return total

    packed = rec((1 << n) - 1)
    return _unpack(packed, bits)


def matching_counts(g: Graph, *, memo_limit: int = DEFAULT_MEMO_LIMIT) -> MatchingPolynomial:
    """Exact k-matching counts of ``g``.

    Small graphs use a subset recursion; larger ones the edge recursion
    memoised on isomorphism classes.
    """
    if g.n <= SUBSET_DP_MAX_N:
        return MatchingPolynomial(g.n, _subset_counts(g))
    engine = _EdgeRecursion(memo_limit)
    m = engine.count(frozenset(g.edges))
    return MatchingPolynomial(g.n, tuple(m))


# ------------------------------------------------------- transfer matrices


def _profile_sweep(m: int, layers: int, periodic: bool, start: int, bits: int) -> dict[int, int]:
    """Broken-profile sweep over C_m x (P or C)_layers from a fixed start profile.

    State bits 0..m-1 mark vertices already matched (by a rung from the
    previous layer for positions not yet processed, or towards the next
    layer for processed ones). Bit m records that position 0 of the current
    layer was left free, so the wrap-around edge (m-1, 0) may still take it.

    Polynomials in t are packed into one integer, ``bits`` bits per
    coefficient (Kronecker substitution), so multiplying by t is a shift.
    """
    wbit = 1 << m
    vec: dict[int, int] = {start: 1}
    for j in range(layers):
        rungs = periodic or j + 1 < layers
        for i in range(m):
            bit = 1 << i
            nbit = bit << 1
            last = i == m - 1
            keep = ~wbit if last else -1
            new: dict[int, int] = defaultdict(int)
            for s, val in vec.items():
                if s & bit:
                    new[(s & ~bit) & keep] += val
                    continue
                new[(s | wbit if i == 0 else s) & keep] += val
                tv = val << bits
                if rungs:
                    new[(s | bit) & keep] += tv
                if not last and not s & nbit:
                    new[s | nbit] += tv
                if last and s & wbit:
                    new[s & ~wbit] += tv
            vec = new
    return vec


def _unpack(packed: int, bits: int) -> tuple[int, ...]:
    mask = (1 << bits) - 1
    out = []
    while packed:
        out.append(packed & mask)
        packed >>= bits
    return tuple(out) or (0,)


def strip_matching_counts(width: int, length: int) -> MatchingPolynomial:
    """Matching counts of the cylinder C_width x P_length by transfer matrix."""
    if width < 3 or length < 1:
        raise InputError("strip needs width >= 3 and length >= 1")
    if width > 16:
        raise ResourceLimitError("strip width limited to 16 (2^17 states)")
    bits = 2 * width * length + 1  # any count is below 2^|E|
    vec = _profile_sweep(width, length, periodic=False, start=0, bits=bits)
    return MatchingPolynomial(width * length, _unpack(vec[0], bits))


def _dihedral_orbits(m: int) -> dict[int, int]:
    """Representatives of m-bit profiles under rotation and reflection, with orbit sizes."""
    full = (1 << m) - 1
    reps: dict[int, int] = {}
    seen: set[int] = set()
    for s in range(1 << m):
        if s in seen:
            continue
        orbit = set()
        for r in range(m):
            rot = ((s << r) | (s >> (m - r))) & full
            orbit.add(rot)
            orbit.add(int(format(rot, f"0{m}b")[::-1], 2))
        seen |= orbit
        reps[s] = len(orbit)
    return reps


def torus_matching_counts(width: int, length: int) -> MatchingPolynomial:
    """Matching counts of the torus C_width x C_length.

    Trace of the layer transfer matrix: fix the set of layer-0 vertices
    matched across the seam, sweep all layers, and require the same set at
    the end. Start profiles related by a symmetry of the cycle contribute
    equally, so only one per dihedral orbit is swept.
    """
    if width < 3 or length < 3:
        raise InputError("torus needs both sides >= 3")
    if width > 12:
        raise ResourceLimitError("torus width limited to 12")
    bits = 2 * width * length + 1
    total = 0
    for s, size in _dihedral_orbits(width).items():
        vec = _profile_sweep(width, length, periodic=True, start=s, bits=bits)
        total += size * vec.get(s, 0)
    return MatchingPolynomial(width * length, _unpack(total, bits))


# --------------------------------------------------------- roots and moments


@dataclass(frozen=True)
class RootMeasure:
    """Uniform measure on the roots of a matching polynomial.

    ``roots`` lists ``(lo, hi, multiplicity)`` with rational endpoints; each
    closed interval holds exactly one distinct root.
    """

    roots: tuple[tuple[Fraction, Fraction, int], ...]
    n: int
    precision: Fraction

    def midpoints(self) -> np.ndarray:
        return np.array([float((lo + hi) / 2) for lo, hi, _ in self.roots])

    def multiplicities(self) -> np.ndarray:
        return np.array([k for _, _, k in self.roots])

    def expanded(self) -> np.ndarray:
        """Root midpoints repeated by multiplicity (``n`` values)."""
        return np.repeat(self.midpoints(), self.multiplicities())

    def to_json_obj(self) -> list:
        return [[str(lo), str(hi), k] for lo, hi, k in self.roots]


def _squarefree(P: list[int]) -> list[tuple[list[int], int]]:
    import flint

    _, factors = flint.fmpz_poly(P).factor_squarefree()
    return [([int(c) for c in f.coeffs()], k) for f, k in factors]


def isolate_roots(p: MatchingPolynomial, precision=Fraction(1, 10**6)) -> RootMeasure:
    """Isolate every root of mu(G, x) with its multiplicity.

    Works on P(y), mu(x) = x^(n - 2 nu) P(x^2), whose roots are the positive
    squares of the nonzero roots. Each squarefree factor is isolated (Arb
    balls certified by exact sign changes, or Sturm sequences when that
    certificate fails) and refined by bisection in exact rational arithmetic.
    """
    precision = Fraction(precision)
    bits = max(8, precision.denominator.bit_length() - precision.numerator.bit_length() + 8)
    out: list[tuple[Fraction, Fraction, int]] = []
    zero_mult = p.n - 2 * p.nu
    if zero_mult:
        out.append((Fraction(0), Fraction(0), zero_mult))
    P = p.y_polynomial()
    if len(P) > 1:
        for factor, mult in _squarefree(P):
            ivals = rp.isolate_positive_fast(factor)
            if ivals is None:
                log.debug("falling back to Sturm isolation for degree %d", rp.degree(factor))
                ivals = rp.isolate_positive(factor)
            if len(ivals) != rp.degree(factor):
                raise InconsistencyError(
                    f"factor of degree {rp.degree(factor)} has {len(ivals)} positive real roots"
                )
            for lo, hi in ivals:
                while True:
                    a, b = rp.sqrt_bounds(lo, hi, bits)
                    if b - a <= precision:
                        break
                    lo, hi = rp.refine(factor, lo, hi, (hi - lo) / 4)
                out.append((a, b, mult))
                out.append((-b, -a, mult))
    out.sort(key=lambda r: r[0])
    total = sum(k for _, _, k in out)
    if total != p.n:
        raise InconsistencyError(f"accounted for {total} of {p.n} roots")
    return RootMeasure(tuple(out), p.n, precision)


def finite_moments(p: MatchingPolynomial, K: int, D: int | None = None) -> MomentSequence:
    """Power sums of the roots over n, via Newton's identities (no root finding)."""
    if K < 0:
        raise InputError("K must be >= 0")
    n = p.n
    if n == 0:
        raise InputError("empty graph has no matching measure")
    # mu(x) = x^n + c_1 x^(n-1) + ... ; c_i for i = 1..n
    c = [0] * (n + 1)
    for k, mk in enumerate(p.m):
        c[2 * k] = (-1) ** k * mk
    psum = [n] + [0] * K
    for k in range(1, K + 1):
        s = 0
        for i in range(1, min(k - 1, n) + 1):
            s += c[i] * psum[k - i]
        if k <= n:
            s += k * c[k]
        psum[k] = -s
    mu = tuple(Fraction(x, n) for x in psum)
    mu = tuple(m.numerator if m.denominator == 1 else m for m in mu)
    return MomentSequence(mu, D if D is not None else 0, "finite:newton")


def _series_divide(num: Sequence[int], den: Sequence[int], order: int) -> list[int]:
    """Power series num/den to ``order`` terms; ``den[0]`` must be +-1."""
    if abs(den[0]) != 1:
        raise InconsistencyError("series denominator must start with a unit")
    out = []
    for j in range(order):
        s = num[j] if j < len(num) else 0
        for i in range(1, min(j, len(den) - 1) + 1):
            s -= den[i] * out[j - i]
        out.append(s * den[0])
    return out


def godsil_ratio_check(g: Graph, v: int, K: int) -> bool:
    """Compare x mu(G-v)/mu(G) in 1/x with the walk-tree returning-walk series at ``v``.

    With y = 1/x^2 both sides are power series in y; the left one is
    ``sum (-1)^k m_k(G-v) y^k / sum (-1)^k m_k(G) y^k``.
    """
    if not 0 <= v < g.n:
        raise InputError(f"vertex {v} not in graph")
    H = K // 2
    full = matching_counts(g).m
    minus = matching_counts(g.delete_vertex(v)).m
    num = [(-1) ** k * x for k, x in enumerate(minus)]
    den = [(-1) ** k * x for k, x in enumerate(full)]
    lhs = _series_divide(num, den, H + 1)
    rhs = list(closed_walk_counts(g, K, v).a[0::2])
    return lhs == rhs


def root_bound_squared(D: int) -> int:
    """Square of the root bound: 4(D - 1) for D >= 2; a graph with D = 1 has roots +-1."""
    return 4 * (D - 1) if D >= 2 else D


def heilmann_lieb_check(p: MatchingPolynomial, D: int) -> bool:
    """Exact test that every root satisfies x^2 <= root_bound_squared(D).

    P(y) is real-rooted, so Descartes' rule of signs on P(y + B^2) counts
    its roots above B^2 exactly.
    """
    P = p.y_polynomial()
    if len(P) == 1:
        return True
    return rp.sign_variations(rp.taylor_shift(P, root_bound_squared(D))) == 0


def root_multiplicity(p: MatchingPolynomial, x) -> int:
    """Exact multiplicity of the rational ``x`` as a root of mu(G, x)."""
    x = Fraction(x)
    coeffs = p.x_coefficients()
    mult = 0
    while coeffs and rp.sign_at(coeffs, x) == 0:
        # synthetic division by (z - x), kept exact with Fractions
        q = [Fraction(0)] * (len(coeffs) - 1)
        acc = Fraction(0)
        for i in range(len(coeffs) - 1, 0, -1):
            acc = acc * x + coeffs[i]
            q[i - 1] = acc
        den = 1
        for f in q:
            den = den * f.denominator // math.gcd(den, f.denominator)
        coeffs = rp.strip([int(f * den) for f in q])
        mult += 1
    return mult

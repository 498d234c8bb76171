"""Exact integer-polynomial arithmetic and Sturm-sequence root isolation.

Polynomials are lists of Python ints in ascending order (``p[i]`` is the
coefficient of ``x**i``), always stripped of trailing zeros. The zero
polynomial is ``[]``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

from .errors import InconsistencyError


def strip(p: list[int]) -> list[int]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: list[int]) -> int:
    return len(p) - 1


def derivative(p: list[int]) -> list[int]:
    return strip([i * c for i, c in enumerate(p)][1:])


def content(p: list[int]) -> int:
    return reduce(math.gcd, p, 0)


def primitive(p: list[int]) -> list[int]:
    """Divide out the content and make the leading coefficient positive."""
    p = strip(p)
    if not p:
        return p
    c = content(p)
    if p[-1] < 0:
        c = -c
    return [x // c for x in p]


def pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    """lc(b)**(deg a - deg b + 1) * a  mod  b, over the integers."""
    a, b = strip(a), strip(b)
    db, lb = degree(b), b[-1]
    r = list(a)
    e = degree(a) - db + 1
    while r and degree(r) >= db:
        shift, lr = degree(r) - db, r[-1]
        r = [lb * c for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= lr * c
        r = strip(r)
        e -= 1
    if e > 0:
        r = [c * lb**e for c in r]
    return r


def gcd(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd of two integer polynomials."""
    a, b = primitive(a), primitive(b)
    if degree(a) < degree(b):
        a, b = b, a
    while b:
        a, b = b, primitive(pseudo_rem(a, b))
    return primitive(a)


def exact_div(a: list[int], b: list[int]) -> list[int]:
    """Quotient of ``a`` by ``b`` when it divides exactly over Q; returned primitive."""
    a, b = strip(a), strip(b)
    q = [Fraction(0)] * max(0, degree(a) - degree(b) + 1)
    r = [Fraction(c) for c in a]
    while r and len(r) >= len(b):
        shift = len(r) - len(b)
        coef = r[-1] / b[-1]
        q[shift] = coef
        for i, c in enumerate(b):
            r[i + shift] -= coef * c
        while r and r[-1] == 0:
            r.pop()
    if any(r):
        raise InconsistencyError("polynomial division is not exact")
    den = reduce(lambda x, y: x * y // math.gcd(x, y), (c.denominator for c in q), 1)
    return primitive([int(c * den) for c in q])


def squarefree_decomposition(p: list[int]) -> list[tuple[list[int], int]]:
    """``p ~ prod f_i**i`` with squarefree, pairwise coprime, primitive ``f_i``."""
    p = primitive(p)
    out: list[tuple[list[int], int]] = []
    if degree(p) <= 0:
        return out
    c = gcd(p, derivative(p))
    w = exact_div(p, c)
    i = 1
    while degree(w) > 0:
        y = gcd(w, c)
        z = exact_div(w, y)
        if degree(z) > 0:
            out.append((z, i))
        w = y
        c = exact_div(c, y)
        i += 1
    return out


def taylor_shift(p: list[int], a: int) -> list[int]:
    """Coefficients of p(a + w) in w."""
    p = list(p)
    n = len(p) - 1
    for k in range(n):
        for j in range(n - 1, k - 1, -1):
            p[j] += a * p[j + 1]
    return p


def sign_variations(p: list[int]) -> int:
    signs = [c > 0 for c in p if c]
    return sum(a != b for a, b in zip(signs, signs[1:]))


def is_squarefree(p: list[int]) -> bool:
    return degree(gcd(p, derivative(p))) == 0


# ---------------------------------------------------------------- sturm


def sturm_sequence(p: list[int]) -> list[list[int]]:
    seq = [primitive(p), primitive(derivative(p))]
    while seq[-1] and degree(seq[-1]) > 0:
        a, b = seq[-2], seq[-1]
        r = pseudo_rem(a, b)
        e = degree(a) - degree(b) + 1
        if b[-1] < 0 and e % 2 == 1:
            r = [-c for c in r]
        r = strip([-c for c in r])
        if not r:
            break
        c = content(r)
        seq.append([x // c for x in r])
    return seq


def sign_at(p: list[int], x: Fraction) -> int:
    """Sign of p(x) using integer Horner on the homogenised form."""
    if not p:
        return 0
    num, den = x.numerator, x.denominator
    acc = p[-1]
    dpow = 1
    for c in reversed(p[:-1]):
        dpow *= den
        acc = acc * num + c * dpow
    return (acc > 0) - (acc < 0)


def variations(seq: list[list[int]], x: Fraction) -> int:
    signs = [s for s in (sign_at(p, x) for p in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def cauchy_bound(p: list[int]) -> Fraction:
    """Every root has absolute value strictly below this bound."""
    lead = abs(p[-1])
    return 1 + Fraction(max(abs(c) for c in p[:-1]), lead) if len(p) > 1 else Fraction(1)


def isolate_positive(p: list[int]) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals ``(lo, hi]`` for the distinct positive roots of ``p``."""
    p = primitive(p)
    while p and p[0] == 0:
        p = p[1:]
    if degree(p) <= 0:
        return []
    seq = sturm_sequence(p)
    hi = cauchy_bound(p)
    lo = 1 / cauchy_bound(list(reversed(p)))
    lo = lo / 2
    out = []
    stack = [(lo, hi, variations(seq, lo), variations(seq, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        m = (a + b) / 2
        vm = variations(seq, m)
        stack.append((a, m, va, vm))
        stack.append((m, b, vm, vb))
    return sorted(out)


def refine(p: list[int], lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink ``(lo, hi]`` holding exactly one simple root of squarefree ``p``."""
    if sign_at(p, hi) == 0:
        return hi, hi
    s_hi = sign_at(p, hi)
    while hi - lo > width:
        m = (lo + hi) / 2
        s = sign_at(p, m)
        if s == 0:
            return m, m
        if s == s_hi:
            hi = m
        else:
            lo = m
    return lo, hi


def sqrt_bounds(lo: Fraction, hi: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Dyadic bounds ``a <= sqrt(lo)`` and ``b >= sqrt(hi)``."""
    scale = 1 << (2 * bits)
    a = math.isqrt((lo * scale).__floor__())
    b = math.isqrt((hi * scale).__ceil__())
    if b * b < hi * scale:
        b += 1
    return Fraction(a, 1 << bits), Fraction(b, 1 << bits)


# ------------------------------------------------------------- fast path


def _arb_bounds(x, bits: int | None) -> tuple[Fraction, Fraction]:
    """Rational bounds of an arb ball, rounded outwards to ``bits`` fractional bits."""
    man, exp = x.mid().man_exp()
    rman, rexp = x.rad().man_exp()
    mid = Fraction(int(man)) * Fraction(2) ** int(exp)
    rad = Fraction(int(rman)) * Fraction(2) ** int(rexp)
    if bits is None:
        return mid - rad, mid + rad
    scale = 1 << bits
    return Fraction(math.floor((mid - rad) * scale), scale), Fraction(math.ceil((mid + rad) * scale), scale)


def _certify(p: list[int], ivals: list[tuple[Fraction, Fraction]]) -> bool:
    if len(ivals) != degree(p) or ivals[0][0] <= 0:
        return False
    if any(h1 >= l2 for (_, h1), (l2, _) in zip(ivals, ivals[1:])):
        return False
    return all(sign_at(p, lo) * sign_at(p, hi) < 0 for lo, hi in ivals)


def isolate_positive_fast(p: list[int]) -> list[tuple[Fraction, Fraction]] | None:
    """Like :func:`isolate_positive` for a squarefree ``p`` expected to be real-rooted.

    Approximate root balls come from FLINT/Arb; the result is then certified
    here with exact integer sign evaluations: every interval shows a sign
    change and there are ``deg p`` pairwise disjoint intervals, so each holds
    exactly one root. Returns None when the certificate cannot be produced
    (non-real roots, touching intervals, ...), so the caller can fall back
    to Sturm sequences.
    """
    import flint

    p = primitive(p)
    if degree(p) <= 0:
        return []
    if p[0] == 0:
        return None
    balls = flint.fmpz_poly(p).complex_roots()
    if any(mult != 1 or not z.imag.is_zero() for z, mult in balls):
        return None
    reals = sorted((z.real for z, _ in balls), key=lambda r: float(r.mid()))
    # coarse grids first: short endpoints make the exact sign checks cheap
    for bits in (64, 128, None):
        ivals = [_arb_bounds(r, bits) for r in reals]
        if _certify(p, ivals):
            return ivals
    return None

"""Monomer-dimer thermodynamics: p(t), ln M / n, F(t), t(p) and lambda(p).

Finite graphs go through the exact matching counts (rational arithmetic,
interval arithmetic for logarithms). Lattices go through their matching
measure: every quantity is an integral of an even function against the
measure, evaluated as sum c_k mu_k for a certified polynomial fit.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .approx import DEFAULT_PREC, PolyApprox, as_fraction, integrate_against_moments, minimax_fit, radius_squared
from .certified import CertifiedValue, round_up
from .errors import InputError, OutOfRangeError, ResourceLimitError
from .graph import Graph
from .matching import MatchingPolynomial, matching_counts
from .saw import MomentSequence

log = logging.getLogger(__name__)

DEFAULT_TOL = Fraction(1, 10**10)
MAX_DOUBLINGS = 60
SIDE_STEPS = 12


@dataclass(frozen=True)
class ThermoContext:
    """Either a finite graph (its matching counts) or a lattice (its moments)."""

    poly: MatchingPolynomial | None = None
    moments: MomentSequence | None = None
    degree: int | None = None
    prec_bits: int = DEFAULT_PREC

    def __post_init__(self) -> None:
        if (self.poly is None) == (self.moments is None):
            raise InputError("a context needs exactly one of a matching polynomial or a moment sequence")
        if self.moments is not None and self.moments.D < 1:
            raise InputError("moment sequence needs a degree bound D >= 1")

    @classmethod
    def finite(cls, source: Graph | MatchingPolynomial, prec_bits: int = DEFAULT_PREC) -> "ThermoContext":
        p = matching_counts(source) if isinstance(source, Graph) else source
        return cls(poly=p, prec_bits=prec_bits)

    @classmethod
    def lattice(cls, mu: MomentSequence, degree: int | None = None, prec_bits: int = DEFAULT_PREC) -> "ThermoContext":
        return cls(moments=mu, degree=degree, prec_bits=prec_bits)

    @property
    def is_finite(self) -> bool:
        return self.poly is not None

    @property
    def pstar(self) -> Fraction:
        """Supremum of p(t); taken to be 1 for lattices (they have perfect matchings)."""
        if self.poly is not None:
            return Fraction(2 * self.poly.nu, self.poly.n) if self.poly.n else Fraction(0)
        return Fraction(1)

    @property
    def N(self) -> int:
        """Degree of the polynomial fits (lattice case)."""
        K = self.moments.K
        N = K if self.degree is None else min(self.degree, K)
        return N - N % 2

    @property
    def R2(self) -> Fraction:
        return radius_squared(self.moments.D)

    def fit(self, target: str, t, certify: bool = True) -> PolyApprox:
        return minimax_fit(target, t, self.N, R2=self.R2, prec_bits=self.prec_bits, certify=certify)


# ------------------------------------------------------------- intervals


def _raw(m) -> Fraction:
    sign, man, exp, _ = m
    if not man:
        return Fraction(0)
    v = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -v if sign else v


def _iv(x: Fraction):
    x = Fraction(x)
    return mpmath.iv.mpf(x.numerator) / mpmath.iv.mpf(x.denominator)


def _enclose(fn, prec_bits: int) -> tuple[Fraction, Fraction]:
    """Run ``fn`` under interval arithmetic; return exact rational endpoints."""
    iv = mpmath.iv
    old = iv.prec
    iv.prec = prec_bits
    try:
        r = fn(iv)
    finally:
        iv.prec = old
    lo, hi = r._mpi_
    return _raw(lo), _raw(hi)


def _from_enclosure(lo: Fraction, hi: Fraction, provenance: str) -> CertifiedValue:
    v = float((lo + hi) / 2)
    fv = Fraction(v)
    return CertifiedValue(v, round_up(max(hi - fv, fv - lo)), provenance)


# --------------------------------------------------------------- finite


def _finite_pressure(p: MatchingPolynomial, t: Fraction) -> Fraction:
    if p.n == 0:
        return Fraction(0)
    return 2 * t * p.partition_derivative(t) / (p.n * p.partition_function(t))


def _finite_F(p: MatchingPolynomial, t: Fraction, pval: Fraction, prec_bits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of ln M(t)/n - pval/2 ln t (pval = p(t) gives F(t))."""
    M = p.partition_function(t)
    if t == 0:
        return Fraction(0), Fraction(0)

    def fn(iv):
        return iv.log(_iv(M)) / p.n - _iv(pval) / 2 * iv.log(_iv(t))

    return _enclose(fn, prec_bits)


# ------------------------------------------------------------ operations


def pressure(ctx: ThermoContext, t) -> CertifiedValue:
    """p(t) = 2 t M'(t) / (n M(t)), or the integral of t z^2 / (1 + t z^2) for a lattice."""
    t = as_fraction(t)
    if t < 0:
        raise InputError("activity t must be >= 0")
    if ctx.is_finite:
        return CertifiedValue.exactly(_finite_pressure(ctx.poly, t), "exact rational 2tM'/(nM)")
    if t == 0:
        return CertifiedValue.exactly(Fraction(0), "p(0) = 0")
    return integrate_against_moments(ctx.fit("pressure", t), ctx.moments)


def log_partition_density(ctx: ThermoContext, t) -> CertifiedValue:
    """ln M(t) / n, or the integral of ln(1 + t z^2) / 2 for a lattice."""
    t = as_fraction(t)
    if t < 0:
        raise InputError("activity t must be >= 0")
    if ctx.is_finite:
        p = ctx.poly
        M = p.partition_function(t)
        if M == 1 or p.n == 0:
            return CertifiedValue.exactly(Fraction(0), "M = 1")
        lo, hi = _enclose(lambda iv: iv.log(_iv(M)) / p.n, ctx.prec_bits)
        return _from_enclosure(lo, hi, f"interval ln M / n at {ctx.prec_bits} bits")
    if t == 0:
        return CertifiedValue.exactly(Fraction(0), "ln M(0) = 0")
    return integrate_against_moments(ctx.fit("halflog", t), ctx.moments)


def free_energy(ctx: ThermoContext) -> CertifiedValue:
    """The monomer-dimer free energy F(1) = ln M(1) / n."""
    return log_partition_density(ctx, 1)


def F(ctx: ThermoContext, t) -> CertifiedValue:
    """F(t) = ln M(t)/n - p(t)/2 ln t."""
    t = as_fraction(t)
    if t < 0:
        raise InputError("activity t must be >= 0")
    if t == 0:
        return CertifiedValue.exactly(Fraction(0), "F(0) = 0")
    if ctx.is_finite:
        lo, hi = _finite_F(ctx.poly, t, _finite_pressure(ctx.poly, t), ctx.prec_bits)
        return _from_enclosure(lo, hi, "interval arithmetic on exact counts")
    L = log_partition_density(ctx, t)
    if t == 1:
        return L
    P = pressure(ctx, t)
    lt = math.log(t)
    value = L.value - P.value * lt / 2
    slack = 4 * math.ulp(abs(L.value) + abs(P.value * lt) + 1)
    return CertifiedValue(value, round_up(L.eps + abs(lt) / 2 * P.eps + slack), L.provenance + " and pressure fit")


@dataclass(frozen=True)
class PressureInverse:
    """t with p(t) ~ target; the true t(p) lies in the certified bracket [lo, hi]."""

    t: Fraction
    lo: Fraction
    hi: Fraction

    def __float__(self) -> float:
        return float(self.t)


def _check_target(ctx: ThermoContext, target: Fraction) -> None:
    if target < 0:
        raise OutOfRangeError("p must be >= 0")
    if target >= ctx.pstar:
        raise OutOfRangeError(f"p = {target} is not below p* = {ctx.pstar}")


def invert_pressure(ctx: ThermoContext, p_target, tol=DEFAULT_TOL) -> PressureInverse:
    """Monotone bisection for t(p)."""
    target = as_fraction(p_target)
    _check_target(ctx, target)
    tol = Fraction(tol)
    if target == 0:
        return PressureInverse(Fraction(0), Fraction(0), Fraction(0))
    if ctx.is_finite:
        return _invert_finite(ctx.poly, target, tol)
    return _invert_lattice(ctx, target, tol)


def _invert_finite(p: MatchingPolynomial, target: Fraction, tol: Fraction) -> PressureInverse:
    lo, hi = Fraction(0), Fraction(1)
    for _ in range(MAX_DOUBLINGS * 4):
        v = _finite_pressure(p, hi)
        if v == target:
            return PressureInverse(hi, hi, hi)
        if v > target:
            break
        lo, hi = hi, hi * 2
    else:
        raise ResourceLimitError("could not bracket t(p)")
    while hi - lo > tol or lo == 0:
        mid = (lo + hi) / 2
        v = _finite_pressure(p, mid)
        if v == target:
            return PressureInverse(mid, mid, mid)
        if v < target:
            lo = mid
        else:
            hi = mid
    return PressureInverse((lo + hi) / 2, lo, hi)


def _invert_lattice(ctx: ThermoContext, target: Fraction, tol: Fraction) -> PressureInverse:
    # certified bracket: p(cl) < target < p(ch) proved with the fit bounds
    cl, ch = Fraction(0), None
    t = Fraction(1)
    for _ in range(MAX_DOUBLINGS):
        cv = pressure(ctx, t)
        if cv.lo > target:
            ch = t
            break
        if cv.hi < target:
            cl = t
        t *= 2
    if ch is None:
        raise ResourceLimitError("could not certify an upper bracket for t(p)")
    undecided = None
    while ch - cl > tol:
        mid = (cl + ch) / 2
        cv = pressure(ctx, mid)
        if cv.hi < target:
            cl = mid
        elif cv.lo > target:
            ch = mid
        else:
            undecided = mid
            break
    if undecided is not None:
        # the fit cannot separate p(mid) from the target; tighten each end
        # towards mid separately, a bounded number of steps
        a, b = cl, undecided
        for _ in range(SIDE_STEPS):
            x = (a + b) / 2
            if pressure(ctx, x).hi < target:
                a = cl = x
            else:
                b = x
        a, b = undecided, ch
        for _ in range(SIDE_STEPS):
            x = (a + b) / 2
            if pressure(ctx, x).lo > target:
                b = ch = x
            else:
                a = x
    # refine the estimate inside the bracket with the fitted values alone
    a, b = cl, ch
    while b - a > tol:
        mid = (a + b) / 2
        v = integrate_against_moments(ctx.fit("pressure", mid, certify=False), ctx.moments).value
        if v < target:
            a = mid
        else:
            b = mid
    return PressureInverse((a + b) / 2, cl, ch)


def lambda_of_p(ctx: ThermoContext, p, tol=DEFAULT_TOL) -> CertifiedValue:
    """lambda(p) = F(t(p)); 0 above p*, the limit value at p*.

    The error from solving for t only approximately is controlled through
    g(t) = ln M(t)/n - p/2 ln t, which has g'(t) = (p(t) - p) / (2t) and so is
    stationary at t(p): over a bracket [lo, hi] of t(p),
    |g(t) - g(t(p))| <= (hi - lo) (p(hi) - p(lo)) / (2 lo).
    """
    target = as_fraction(p)
    if target < 0:
        raise OutOfRangeError("p must be >= 0")
    pstar = ctx.pstar
    if target > pstar:
        return CertifiedValue.exactly(Fraction(0), "zero above p*")
    if target == pstar:
        return lambda_at_pstar(ctx)
    if target == 0:
        return CertifiedValue.exactly(Fraction(0), "lambda(0) = 0")
    inv = invert_pressure(ctx, target, tol)
    t, lo, hi = inv.t, inv.lo, inv.hi
    if ctx.is_finite:
        poly = ctx.poly
        glo, ghi = _finite_F(poly, t, target, ctx.prec_bits)
        spread = (hi - lo) * (_finite_pressure(poly, hi) - _finite_pressure(poly, lo)) / (2 * lo) if hi > lo else 0
        return _from_enclosure(glo - spread, ghi, "interval F at bisected t(p), stationarity bound")
    L = log_partition_density(ctx, t)
    lt = math.log(t)
    value = L.value - float(target) * lt / 2
    if lo == 0:
        return CertifiedValue(value, math.inf, "estimate only: t(p) bracket touches 0")
    spread = (hi - lo) * Fraction(pressure(ctx, hi).hi - pressure(ctx, lo).lo) / (2 * lo)
    slack = 4 * math.ulp(abs(L.value) + abs(lt) + 1)
    return CertifiedValue(value, round_up(Fraction(L.eps) + spread + Fraction(slack)),
                          f"moment fit at t={float(t):.12g}, certified t-bracket [{float(lo):.6g}, {float(hi):.6g}]")


def lambda_at_pstar(ctx: ThermoContext) -> CertifiedValue:
    """lambda(p*): ln m_nu / n for a finite graph; a one-sided estimate for a lattice."""
    if ctx.is_finite:
        p = ctx.poly
        if p.n == 0:
            return CertifiedValue.exactly(Fraction(0), "empty graph")
        mnu = p.m[-1]
        if mnu == 1:
            return CertifiedValue.exactly(Fraction(0), "ln m_nu / n with m_nu = 1")
        lo, hi = _enclose(lambda iv: iv.log(_iv(mnu)) / p.n, ctx.prec_bits)
        return _from_enclosure(lo, hi, "ln m_nu / n")
    return lambda_limit(ctx)


def lambda_limit(ctx: ThermoContext, steps: int = 8, factor: int = 2) -> CertifiedValue:
    """Upper estimate of lambda(p*) from F at geometrically growing t.

    lambda decreases for p > p(1), so every F(t) with t >= 1 bounds the
    limit from above; the result keeps the smallest such bound. No rate is
    known, hence eps = inf (one-sided).
    """
    best = math.inf
    at = None
    t = Fraction(1)
    for _ in range(steps):
        cv = F(ctx, t)
        if cv.hi < best:
            best, at = cv.hi, t
        t *= factor
    return CertifiedValue(best, math.inf, f"one-sided upper bound: min over t = {factor}^j of F(t) (best at t={at})")


# ------------------------------------------------------------------ mayer


def mayer_to_moments(a, D: int, *, halved: bool = False, source: str = "mayer") -> MomentSequence:
    """Moments from Mayer coefficients a_1..a_N: mu_{2n} = (-1)^(n+1) a_n.

    With ``halved`` the input is d_n = a_n / 2.
    """
    mu: list = [1]
    for n, an in enumerate(a, start=1):
        an = Fraction(an) * (2 if halved else 1)
        m2n = an if n % 2 == 1 else -an
        if m2n <= 0:
            raise InputError(f"Mayer coefficient a_{n} = {an} gives a non-positive moment")
        m2n = m2n.numerator if m2n.denominator == 1 else m2n
        mu.extend([0, m2n])
    return MomentSequence(tuple(mu), D, source)


def moments_to_mayer(mu: MomentSequence) -> list:
    """Mayer coefficients a_1..a_{K/2}."""
    return [(-1) ** (n + 1) * mu.mu[2 * n] for n in range(1, mu.K // 2 + 1)]


# ---------------------------------------------------------------- darroch


def darroch_bounds_check(G: Graph | MatchingPolynomial, k: int) -> bool:
    """Check |lambda(2k/n) - ln m_k / n| <= ln n / n with rigorous enclosures."""
    p = matching_counts(G) if isinstance(G, Graph) else G
    if not 1 <= k <= p.nu:
        raise InputError(f"k must be in 1..{p.nu}")
    ctx = ThermoContext.finite(p)
    lam = lambda_of_p(ctx, Fraction(2 * k, p.n))
    lmk_lo, lmk_hi = _enclose(lambda iv: iv.log(_iv(p.m[k])) / p.n, ctx.prec_bits)
    bnd_lo, _ = _enclose(lambda iv: iv.log(_iv(p.n)) / p.n, ctx.prec_bits)
    lam_lo = Fraction(lam.value) - Fraction(lam.eps)
    lam_hi = Fraction(lam.value) + Fraction(lam.eps)
    worst = max(lam_hi - lmk_lo, lmk_hi - lam_lo)
    return worst <= bnd_lo

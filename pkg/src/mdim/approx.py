"""Near-minimax polynomial approximation with certified sup-norm error.

The two integrands of the monomer-dimer calculus are even in z, so the fit
is done in u = z**2 on [0, U] with U = R**2 = 4(D - 1):

    halflog(t):   1/2 ln(1 + t u)
    pressure(t):  t u / (1 + t u)

Both are analytic on [0, U] with their only singularity at u = -1/t.

The fitted polynomial is rounded to exact decimal coefficients, and the
error bound is proved for that rounded polynomial, so it does not depend on
how well the Remez exchange converged. The interval is cut into cells; on a
cell with centre c and half-width d both the polynomial (an exact Taylor
shift) and the target (closed-form Taylor coefficients in t / (1 + t c))
are expanded around c, so

    |q - f| <= |q(c) - f(c)| + sum_j |q_j - f_j| d^j + (tail of f beyond deg q)

with every term a rational number except f(c) for halflog, which is
enclosed with interval arithmetic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial import chebyshev as cheb

from .certified import CertifiedValue, round_up
from .errors import InputError, MdimError
from .roots import taylor_shift
from .saw import MomentSequence

log = logging.getLogger(__name__)

TARGETS = ("halflog", "pressure")
REMEZ_DEFECT = 1e-3
REMEZ_MAX_ITER = 40
DEFAULT_PREC = 256
COEFF_DIGITS = 40
CELLS_PER_DEGREE = 32


def as_fraction(x) -> Fraction:
    """Exact rational from int, Fraction, decimal string or float (binary value)."""
    if isinstance(x, bool):
        raise InputError("expected a number")
    if isinstance(x, (int, Fraction, float)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise InputError(f"not a number: {x!r}") from exc
    raise InputError(f"not a number: {x!r}")


def _mpf_fraction(x: mpmath.mpf) -> Fraction:
    man, exp = x.man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def fraction_to_decimal(x: Fraction) -> str:
    """Exact decimal string of a rational whose denominator is 2^a 5^b."""
    den, k2, k5 = x.denominator, 0, 0
    while den % 2 == 0:
        den, k2 = den // 2, k2 + 1
    while den % 5 == 0:
        den, k5 = den // 5, k5 + 1
    if den != 1:
        raise ValueError(f"{x} has no finite decimal expansion")
    k = max(k2, k5)
    num = x.numerator * (10 ** k // x.denominator)
    sign = "-" if num < 0 else ""
    digits = str(abs(num)).rjust(k + 1, "0")
    return sign + digits if k == 0 else f"{sign}{digits[:-k]}.{digits[-k:]}"


def target_float(target: str, t: float, u):
    """Vectorisable float evaluation (numpy arrays welcome), for sampling tests."""
    import numpy as np

    if target == "halflog":
        return 0.5 * np.log1p(t * u)
    return t * u / (1 + t * u)


@dataclass(frozen=True)
class PolyApprox:
    """q(z) = sum c_k z^k on [-R, R] with sup |f - q| <= eps.

    ``R2`` is R**2 kept exact (4(D - 1) in the lattice setting). For the fitted
    targets only even coefficients are nonzero.
    """

    target: str
    t: Fraction | None
    R2: Fraction
    c: tuple[Fraction, ...]
    eps: float
    residual: float = math.nan
    method: str = "given"

    @property
    def N(self) -> int:
        return len(self.c) - 1

    @property
    def R(self) -> float:
        return math.sqrt(self.R2)

    @property
    def u_coefficients(self) -> tuple[Fraction, ...]:
        if any(self.c[1::2]):
            raise MdimError("polynomial is not even")
        return self.c[0::2]

    def __call__(self, z):
        """Float evaluation (Horner); accepts numpy arrays."""
        acc = 0.0
        for ck in reversed(self.c):
            acc = acc * z + float(ck)
        return acc

    def evaluate(self, z):
        """q at float input(s), computed exactly and rounded once.

        Float Horner in the monomial basis loses many digits at high degree;
        this is the evaluator to use when comparing against eps.
        """
        import numpy as np

        L = math.lcm(*(x.denominator for x in self.c))
        C = [int(x * L) for x in self.c]
        n = len(C) - 1

        def one(x: float) -> float:
            num, den = float(x).as_integer_ratio()
            acc, dp = C[n], 1
            for ck in reversed(C[:n]):
                dp *= den
                acc = acc * num + ck * dp
            return float(Fraction(acc, L * den ** n))

        arr = np.asarray(z, dtype=float)
        if arr.ndim == 0:
            return one(float(arr))
        return np.array([one(x) for x in arr.ravel()]).reshape(arr.shape)

    def exact(self, z: Fraction) -> Fraction:
        acc = Fraction(0)
        for ck in reversed(self.c):
            acc = acc * z + ck
        return acc

    def to_json_obj(self) -> dict:
        return {
            "target": self.target,
            "t": None if self.t is None else str(self.t),
            "R2": str(self.R2),
            "degree": self.N,
            "coefficients": [fraction_to_decimal(x) if _terminates(x) else str(x) for x in self.c],
            "eps": repr(self.eps),
            "residual": repr(self.residual),
            "method": self.method,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PolyApprox":
        try:
            return cls(
                target=obj["target"],
                t=None if obj.get("t") is None else Fraction(obj["t"]),
                R2=Fraction(obj["R2"]),
                c=tuple(Fraction(x) for x in obj["coefficients"]),
                eps=float(obj["eps"]),
                residual=float(obj.get("residual", "nan")),
                method=obj.get("method", "given"),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"malformed PolyApprox JSON: {exc}") from exc

    @classmethod
    def from_coefficients(cls, c, R2, eps=0.0, target: str = "custom") -> "PolyApprox":
        return cls(target, None, as_fraction(R2), tuple(as_fraction(x) for x in c), float(eps))


def _terminates(x: Fraction) -> bool:
    d = x.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def radius_squared(D: int) -> Fraction:
    """(2 sqrt(D - 1))**2 for degree bound D."""
    if D < 1:
        raise InputError("degree bound must be >= 1")
    return Fraction(4 * (D - 1))


# ---------------------------------------------------------------- remez
#
# The exchange runs in float64: it only has to find a good polynomial, the
# certificate below is what makes the error bound rigorous.


def _golden_max(g, lo: float, hi: float, iters: int = 40) -> float:
    """Argmax of g on [lo, hi] assuming a single hump."""
    phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    x1, x2 = b - phi * (b - a), a + phi * (b - a)
    g1, g2 = g(x1), g(x2)
    for _ in range(iters):
        if g1 < g2:
            a, x1, g1 = x1, x2, g2
            x2 = a + phi * (b - a)
            g2 = g(x2)
        else:
            b, x2, g2 = x2, x1, g1
            x1 = b - phi * (b - a)
            g1 = g(x1)
    return x1 if g1 >= g2 else x2


def _remez(f, n: int):
    """Best approximation of f on [-1, 1] by a Chebyshev series of degree n.

    ``f`` must accept numpy arrays. Returns (coefficients, levelled error, converged).
    """
    ref = -np.cos(np.pi * np.arange(n + 2) / (n + 1))
    M = 64 * (n + 2)
    grid = -np.cos(np.pi * np.arange(M + 1) / M)
    fgrid = f(grid)
    signs = (-1.0) ** np.arange(n + 2)
    b, E = np.zeros(n + 1), 0.0
    for it in range(REMEZ_MAX_ITER):
        A = np.column_stack([cheb.chebvander(ref, n), signs])
        sol = np.linalg.solve(A, f(ref))
        b, E = sol[:-1], abs(sol[-1])

        def err(x, b=b):
            return abs(float(f(np.array([x]))[0] - cheb.chebval(x, b)))

        e = fgrid - cheb.chebval(grid, b)
        pos = e >= 0
        starts = np.flatnonzero(np.r_[True, pos[1:] != pos[:-1]])
        ends = np.r_[starts[1:], M + 1]
        ext = [s0 + int(np.argmax(np.abs(e[s0:s1]))) for s0, s1 in zip(starts, ends)]
        if len(ext) < n + 2:
            return b, E, False
        while len(ext) > n + 2:
            ext.pop(0 if abs(e[ext[0]]) < abs(e[ext[-1]]) else -1)
        new_ref = np.array([
            grid[k] if k in (0, M) else _golden_max(err, grid[k - 1], grid[k + 1]) for k in ext
        ])
        peak = max(max(err(x) for x in new_ref), float(np.abs(e).max()))
        if peak == 0:
            return b, E, True
        defect = (peak - E) / peak
        log.debug("remez n=%d it=%d E=%.3e defect=%.2e", n, it, E, defect)
        if defect < REMEZ_DEFECT:
            return b, E, True
        ref = np.sort(new_ref)
    return b, E, False


def _chebyshev_interpolant(f, n: int) -> np.ndarray:
    return cheb.chebinterpolate(f, n)


def _chebyshev_to_u_monomial(b, U) -> list:
    """Coefficients in u of sum b_j T_j(2u/U - 1)."""
    n = len(b) - 1
    a = 2 * mpmath.mpf(U.denominator) / U.numerator
    T_prev, T_cur = [mpmath.mpf(1)], [mpmath.mpf(-1), a]
    out = [mpmath.mpf(0)] * (n + 1)
    out[0] += b[0]
    if n >= 1:
        out[0] += b[1] * T_cur[0]
        out[1] += b[1] * T_cur[1]
    for j in range(2, n + 1):
        # T_j = 2 s T_{j-1} - T_{j-2}, s = a u - 1
        nxt = [mpmath.mpf(0)] * (j + 1)
        for k, ck in enumerate(T_cur):
            nxt[k + 1] += 2 * a * ck
            nxt[k] -= 2 * ck
        for k, ck in enumerate(T_prev):
            nxt[k] -= ck
        T_prev, T_cur = T_cur, nxt
        for k, ck in enumerate(T_cur):
            out[k] += b[j] * ck
    return out


def _round_decimal(x) -> Fraction:
    return Fraction(mpmath.nstr(x, COEFF_DIGITS, strip_zeros=False, min_fixed=1, max_fixed=0)) if x else Fraction(0)


def minimax_fit(target: str, t, N: int, *, D: int | None = None, R2=None, R=None,
                prec_bits: int = DEFAULT_PREC, certify: bool = True) -> PolyApprox:
    """Near-minimax even polynomial of degree <= N for ``target`` on [-R, R].

    Exactly one of D (so R = 2 sqrt(D - 1)), R2 or R fixes the interval.
    """
    if target not in TARGETS:
        raise InputError(f"unknown target {target!r}; expected one of {TARGETS}")
    t = as_fraction(t)
    if t < 0:
        raise InputError("activity t must be >= 0")
    if N < 0:
        raise InputError("degree must be >= 0")
    given = [x is not None for x in (D, R2, R)]
    if sum(given) != 1:
        raise InputError("give exactly one of D, R2, R")
    U = radius_squared(D) if D is not None else as_fraction(R2) if R2 is not None else as_fraction(R) ** 2
    if U <= 0:
        raise InputError("interval radius must be positive")
    return _fit_cached(target, t, N - N % 2, U, prec_bits, certify)


@lru_cache(maxsize=256)
def _fit_cached(target: str, t: Fraction, N: int, U: Fraction, prec_bits: int, certify: bool) -> PolyApprox:
    n = N // 2
    if t == 0:
        return PolyApprox(target, t, U, (Fraction(0),), 0.0, 0.0, "exact")
    tf, Uf = float(t), float(U)

    def f(x):
        return target_float(target, tf, (x + 1) * Uf / 2)

    b, E, ok = _remez(f, n)
    method = "remez"
    if not ok:
        log.warning("Remez exchange did not converge (n=%d); using Chebyshev interpolation", n)
        b, E, method = _chebyshev_interpolant(f, n), math.nan, "chebyshev"
    with mpmath.workprec(prec_bits):
        cu = [_round_decimal(x) for x in _chebyshev_to_u_monomial([mpmath.mpf(float(x)) for x in b], U)]
    c = [Fraction(0)] * (2 * n + 1)
    c[0::2] = cu
    pa = PolyApprox(target, t, U, tuple(c), math.inf, float(E), method)
    if certify:
        pa = PolyApprox(target, t, U, pa.c, certify_error(pa, prec_bits=prec_bits), float(E), method)
    return pa


# --------------------------------------------------------- certification


def _cells(U: Fraction, M: int) -> tuple[list[int], int]:
    """Chebyshev-spaced breakpoints 0 = x_0 < ... < x_M = U, as integers over a common denominator S."""
    S = U.denominator << max(16, 60 - int(U).bit_length())
    top = U.numerator * (S // U.denominator)
    pts = [0]
    Uf = float(U)
    for i in range(1, M):
        x = round(Uf * (1 - math.cos(math.pi * i / M)) / 2 * S)
        if pts[-1] < x < top:
            pts.append(x)
    pts.append(top)
    return pts, S


def _raw_fraction(m) -> Fraction:
    """Exact value of a raw mpf tuple (sign, mantissa, exponent, bitcount)."""
    sign, man, exp, _ = m
    if not man:
        return Fraction(0)
    v = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -v if sign else v


def _halflog_gap(q0: Fraction, t: Fraction, c: Fraction, prec_bits: int) -> Fraction:
    """Upper bound on |q0 - ln(1 + t c)/2| via interval arithmetic."""
    iv = mpmath.iv
    old = iv.prec
    iv.prec = prec_bits
    try:
        arg = 1 + t * c
        x = iv.mpf(arg.numerator) / iv.mpf(arg.denominator)
        q = iv.mpf(q0.numerator) / iv.mpf(q0.denominator)
        d = q - iv.log(x) / 2
    finally:
        iv.prec = old
    lo, hi = d._mpi_
    return max(abs(_raw_fraction(lo)), abs(_raw_fraction(hi)))


def certify_error(pa: PolyApprox, *, prec_bits: int = DEFAULT_PREC, cells: int | None = None) -> float:
    """Rigorous upper bound on sup over [-R, R] of |target - q| (a float, rounded up)."""
    if pa.target not in TARGETS:
        raise InputError(f"cannot certify target {pa.target!r}")
    t, U = pa.t, pa.R2
    cu = list(pa.u_coefficients)
    n = len(cu) - 1
    if t == 0:
        return round_up(sum(abs(x) * U ** k for k, x in enumerate(cu)))
    L = math.lcm(*(x.denominator for x in cu))
    C = [int(x * L) for x in cu]
    M = cells or max(64, CELLS_PER_DEGREE * 2 * n)
    pts, S = _cells(U, M)
    tn, td = t.numerator, t.denominator
    halflog = pa.target == "halflog"
    lam = 2 * math.lcm(*range(1, n + 1)) if n else 2
    # the cell centre is a / (2S), the half-width e / (2S)
    P0 = [Ck * (2 * S) ** (n - k) for k, Ck in enumerate(C)]
    den_q = L * (2 * S) ** n
    worst = Fraction(0)
    for lo, hi in zip(pts, pts[1:]):
        a, e = lo + hi, hi - lo
        P = taylor_shift(P0, a)
        # q_j d^j = P_j e^j / den_q; with 1 + t c = B / (2 S td) the target's
        # Taylor terms are powers of rho = t d / (1 + t c) = A / B
        A, B = tn * e, 2 * S * td + tn * a
        Bn = B ** n
        acc = 0
        ej, Aj, Bnj = 1, 1, Bn
        for j in range(1, n + 1):
            ej *= e
            Aj *= A
            Bnj //= B
            if halflog:
                g = (-1) ** (j + 1) * (lam // (2 * j)) * Aj * Bnj
                acc += abs(P[j] * ej * lam * Bn - den_q * g)
            else:
                g = -2 * S * td * (-1) ** j * Aj * Bnj
                acc += abs(P[j] * ej * B * Bn - den_q * g)
        rho = Fraction(A, B)
        if halflog:
            bound = Fraction(acc, den_q * lam * Bn)
            bound += _halflog_gap(Fraction(P[0], den_q), t, Fraction(a, 2 * S), prec_bits)
            bound += rho ** (n + 1) / (2 * (n + 1) * (1 - rho))
        else:
            bound = Fraction(acc, den_q * B * Bn)
            bound += abs(Fraction(P[0], den_q) - Fraction(tn * a, B))
            bound += Fraction(2 * S * td, B) * rho ** (n + 1) / (1 - rho)
        if bound > worst:
            worst = bound
    return round_up(worst)


# ------------------------------------------------------------ integration


def integrate_against_moments(pa: PolyApprox, mu: MomentSequence) -> CertifiedValue:
    """Sum c_k mu_k, an enclosure of the integral of the target against the measure."""
    if pa.N > mu.K:
        raise InputError(f"polynomial degree {pa.N} exceeds moment order {mu.K}")
    support = Fraction(4 * (mu.D - 1)) if mu.D >= 1 else Fraction(0)
    if pa.R2 < support:
        raise InputError(
            f"approximation interval R^2={pa.R2} is smaller than the support R^2={support}; "
            "the bound would be unsound"
        )
    total = sum((ck * Fraction(mk) for ck, mk in zip(pa.c, mu.mu) if ck), Fraction(0))
    if pa.eps == 0 and pa.target == "custom":
        return CertifiedValue.exactly(total, "exact polynomial moment sum")
    prov = f"{pa.method} fit of {pa.target}(t={pa.t}) degree {pa.N} on R^2={pa.R2}, {mu.K + 1} moments"
    return CertifiedValue.from_fraction(total, pa.eps, prov)

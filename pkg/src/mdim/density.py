"""Density pictures of matching measures.

Kernel smoothing of a finite root measure, L2 projection of a measure onto
polynomials from its moments, the Kesten-McKay density and atom probes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import mpmath
import numpy as np
from numpy.polynomial import legendre

from .errors import InputError
from .graph import Graph
from .matching import MatchingPolynomial, RootMeasure, matching_counts, root_multiplicity
from .saw import MomentSequence

TRIWEIGHT_PEAK = 35 / 32


@dataclass(frozen=True)
class DensitySamples:
    grid: np.ndarray
    values: np.ndarray
    mass: float
    mode: str
    params: dict

    @property
    def has_negative(self) -> bool:
        return bool((self.values < 0).any())

    def to_dat(self) -> str:
        """Two whitespace-separated columns, one ``x value`` row per grid point."""
        return "".join(f"{x:.10g} {v:.10g}\n" for x, v in zip(self.grid, self.values))


def triweight(u):
    u = np.asarray(u, dtype=float)
    return np.where(np.abs(u) <= 1, TRIWEIGHT_PEAK * (1 - u * u) ** 3, 0.0)


def silverman_bandwidth(points: np.ndarray) -> float:
    n = len(points)
    sigma = float(np.sqrt(np.mean((points - points.mean()) ** 2)))
    if sigma == 0:
        return 1.0
    return 1.06 * sigma * n ** (-0.2)


def kernel_smooth(rm: RootMeasure, h: float | None = None, grid_size: int = 2001,
                  R: float | None = None) -> DensitySamples:
    """(1/n) sum over roots of K((x - root)/h)/h with the triweight kernel.

    The grid covers [-R - h, R + h] so that no kernel mass falls outside it;
    R defaults to the largest root modulus.
    """
    pts = rm.expanded()
    if h is None:
        h = silverman_bandwidth(pts)
    if h <= 0:
        raise InputError("bandwidth must be positive")
    if grid_size < 3:
        raise InputError("grid needs at least 3 points")
    if R is None:
        R = float(np.abs(pts).max()) if len(pts) else 0.0
    grid = np.linspace(-R - h, R + h, grid_size)
    values = np.zeros_like(grid)
    # roots are few compared with grid points; accumulate one root at a time
    for x0, k in zip(rm.midpoints(), rm.multiplicities()):
        lo, hi = np.searchsorted(grid, [x0 - h, x0 + h])
        values[lo:hi] += k * triweight((grid[lo:hi] - x0) / h)
    values /= rm.n * h
    mass = float(np.trapezoid(values, grid))
    return DensitySamples(grid, values, mass, "kernel", {"h": h, "grid_size": grid_size})


def legendre_projection_coefficients(mu: MomentSequence, N: int, R, prec_bits: int = 512) -> list[float]:
    """<rho, P_j> for the orthonormal Legendre basis P_j(x) = sqrt((2j+1)/(2R)) L_j(x/R), j <= N.

    Linear in mu_0..mu_N. Computed at high precision because the Legendre
    coefficients alternate and cancel heavily.
    """
    if N > mu.K:
        raise InputError(f"projection degree {N} exceeds moment order {mu.K}")
    out = []
    with mpmath.workprec(prec_bits):
        Rm = mpmath.mpf(R) if not isinstance(R, Fraction) else mpmath.mpf(R.numerator) / R.denominator
        mus = [mpmath.mpf(m.numerator) / m.denominator if isinstance(m, Fraction) else mpmath.mpf(m) for m in mu.mu]
        for j in range(N + 1):
            lj = _legendre_monomial(j)
            acc = mpmath.fsum(c * mus[k] / Rm**k for k, c in enumerate(lj) if c)
            out.append(float(mpmath.sqrt((2 * j + 1) / (2 * Rm)) * acc))
    return out


def _legendre_monomial(j: int) -> list[Fraction]:
    """Exact monomial coefficients of the Legendre polynomial L_j."""
    p0, p1 = [Fraction(1)], [Fraction(0), Fraction(1)]
    if j == 0:
        return p0
    for k in range(1, j):
        # (k+1) L_{k+1} = (2k+1) x L_k - k L_{k-1}
        nxt = [Fraction(0)] * (k + 2)
        for i, c in enumerate(p1):
            nxt[i + 1] += Fraction(2 * k + 1, k + 1) * c
        for i, c in enumerate(p0):
            nxt[i] -= Fraction(k, k + 1) * c
        p0, p1 = p1, nxt
    return p1


def l2_projection(mu: MomentSequence, N: int, R: float | None = None, grid_size: int = 2001) -> DensitySamples:
    """L2 projection of the measure onto polynomials of degree <= N on [-R, R]."""
    if N < 0:
        raise InputError("degree must be >= 0")
    R = mu.support_radius if R is None else R
    if R < mu.support_radius - 1e-12:
        raise InputError(f"R = {R} is smaller than the support radius {mu.support_radius}")
    coef = legendre_projection_coefficients(mu, N, R)
    grid = np.linspace(-R, R, grid_size)
    scale = np.sqrt((2 * np.arange(N + 1) + 1) / (2 * R))
    values = legendre.legval(grid / R, np.array(coef) * scale)
    mass = float(np.trapezoid(values, grid))
    return DensitySamples(grid, values, mass, "l2", {"N": N, "R": R, "grid_size": grid_size})


def bethe_density(d: int, t):
    """Kesten-McKay density of the d-regular tree; 0 outside |t| <= 2 sqrt(d-1)."""
    if d < 2:
        raise InputError("d must be >= 2")
    t = np.asarray(t, dtype=float)
    inside = 4 * (d - 1) - t * t
    # t = 2 sqrt(d-1) in floating point should still count as the endpoint
    inside = np.where(inside > 1e-12 * 4 * (d - 1), inside, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(inside > 0, d / (2 * math.pi) * np.sqrt(inside) / (d * d - t * t), 0.0)
    return float(val) if val.ndim == 0 else val


def atom_probe(family: Iterable[Graph | MatchingPolynomial], x,
               multiplicity: Callable[[MatchingPolynomial, Fraction], int] = root_multiplicity) -> list[Fraction]:
    """mult(mu(G), x) / |G| for each graph of the family; x must be rational."""
    x = Fraction(x)
    out = []
    for g in family:
        p = matching_counts(g) if isinstance(g, Graph) else g
        out.append(Fraction(multiplicity(p, x), p.n))
    return out

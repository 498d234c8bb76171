"""A real number with a rigorous absolute error bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def round_up(x) -> float:
    """Smallest float >= x for a Fraction, int or float ``x``."""
    if isinstance(x, float):
        return x
    if x == math.inf:
        return math.inf
    f = float(x)
    if Fraction(f) < x:
        f = math.nextafter(f, math.inf)
    return f


def float_slack(x: Fraction) -> Fraction:
    """Exact |x - float(x)|."""
    return abs(x - Fraction(float(x)))


@dataclass(frozen=True)
class CertifiedValue:
    """``value`` with the guarantee that the true quantity lies in [value - eps, value + eps].

    ``exact`` is set when the value is known as an exact rational (then
    eps is 0 and ``value`` is only its float rendering). ``eps == inf`` marks a
    one-sided estimate; ``provenance`` says which side holds.
    """

    value: float
    eps: float
    provenance: str
    exact: Fraction | None = None

    @property
    def lo(self) -> float:
        return self.value - self.eps

    @property
    def hi(self) -> float:
        return self.value + self.eps

    def contains(self, x) -> bool:
        if self.exact is not None and self.eps == 0:
            return Fraction(x) == self.exact
        return abs(Fraction(x) - Fraction(self.value)) <= Fraction(self.eps)

    def to_json_obj(self) -> dict:
        out = {"value": repr(self.value), "eps": repr(self.eps), "provenance": self.provenance}
        if self.exact is not None:
            out["exact"] = str(self.exact)
        return out

    @classmethod
    def exactly(cls, x: Fraction, provenance: str = "exact rational") -> "CertifiedValue":
        return cls(float(x), 0.0, provenance, Fraction(x))

    @classmethod
    def from_fraction(cls, x: Fraction, eps, provenance: str) -> "CertifiedValue":
        """Round ``x`` to a float and absorb the rounding into eps."""
        if eps == math.inf:
            return cls(float(x), math.inf, provenance)
        return cls(float(x), round_up(Fraction(eps) + float_slack(x)), provenance)

"""Formal quotients of kernel expressions.

Used where a replay step genuinely divides by a sum (isolated Y'' values,
the Q-coefficients of the unit-curvature regime).  Equality is decided by
cross multiplication, so no gcd machinery is needed; denominators must be
certified nonzero at the script level.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .poly import DEFAULT_MAX_DERIV_ORDER, ExpPoly, P, Rat


@dataclass(frozen=True)
class RationalExpr:
    num: ExpPoly
    den: ExpPoly

    @staticmethod
    def of(x: "RationalExpr | ExpPoly | Rat") -> "RationalExpr":
        if isinstance(x, RationalExpr):
            return x
        return RationalExpr(P(x), ExpPoly.one())

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("zero denominator")

    def __add__(self, other):
        o = RationalExpr.of(other)
        return RationalExpr(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalExpr(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalExpr.of(other))

    def __rsub__(self, other):
        return RationalExpr.of(other) - self

    def __mul__(self, other):
        o = RationalExpr.of(other)
        return RationalExpr(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalExpr.of(other)
        return RationalExpr(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalExpr.of(other) / self

    def __eq__(self, other) -> bool:
        if not isinstance(other, (RationalExpr, ExpPoly, int, Fraction)):
            return NotImplemented
        o = RationalExpr.of(other)
        return (self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self):
        raise TypeError("RationalExpr is not hashable")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def diff(self, x: str, max_order: int = DEFAULT_MAX_DERIV_ORDER) -> "RationalExpr":
        return RationalExpr(
            self.num.diff(x, max_order) * self.den
            - self.num * self.den.diff(x, max_order),
            self.den * self.den,
        )

    def subst_func(self, sym: str, order: int, value: "RationalExpr | ExpPoly | Rat") -> "RationalExpr":
        val = RationalExpr.of(value)
        num = _subst_poly(self.num, sym, order, val)
        den = _subst_poly(self.den, sym, order, val)
        return num / den

    def text(self) -> str:
        if self.den == ExpPoly.one():
            return self.num.text()
        return f"({self.num.text()}) / ({self.den.text()})"

    def __repr__(self):
        return f"RationalExpr({self.text()})"


def _subst_poly(e: ExpPoly, sym: str, order: int, val: RationalExpr) -> RationalExpr:
    """Substitute a rational value into a polynomial in (sym, order)."""
    parts = e.collect_func(sym, order)
    out = RationalExpr.of(0)
    for k, coeff in parts.items():
        if k < 0:
            term = RationalExpr.of(coeff)
            for _ in range(-k):
                term = term / val
        else:
            term = RationalExpr.of(coeff)
            for _ in range(k):
                term = term * val
        out = out + term
    return out

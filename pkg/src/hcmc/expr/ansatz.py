"""Closed-form profiles for the derivative symbols X and Y.

An ansatz replaces the formal symbols X, X', X'', ... (or Y, ...) of an
expression by the derivatives of a concrete one-parameter family.  Each
family records the nondegeneracy side conditions under which the
replacement is used, so replay reports can cite them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .poly import (
    COS,
    COSH,
    EXP,
    SIN,
    SINH,
    ExpPoly,
    Freq,
    P,
    Rat,
    UncoveredSymbol,
    FUNC_VAR,
)

Value = Union[ExpPoly, int, Fraction, str]


def _val(x: Value) -> ExpPoly:
    return P(x)


@dataclass(frozen=True)
class Ansatz:
    """Base: target is "X" (function of u) or "Y" (function of v)."""

    target: str
    side_conditions: tuple[str, ...] = ()

    @property
    def dep_var(self) -> str:
        return FUNC_VAR[self.target]

    def deriv(self, order: int) -> ExpPoly:
        raise NotImplementedError


@dataclass(frozen=True)
class Linear(Ansatz):
    """slope * t + intercept"""

    slope: Value = 0
    intercept: Value = 0

    def deriv(self, order: int) -> ExpPoly:
        t = ExpPoly.var(self.dep_var)
        if order == 0:
            return _val(self.slope) * t + _val(self.intercept)
        if order == 1:
            return _val(self.slope)
        return ExpPoly.zero()


@dataclass(frozen=True)
class HyperbolicPair(Ansatz):
    """c1*cosh(rate*t) + c2*sinh(rate*t)"""

    rate: Union[Freq, Rat, str] = 1
    c1: Value = 0
    c2: Value = 0

    def deriv(self, order: int) -> ExpPoly:
        f = Freq.of(self.rate)
        x = self.dep_var
        ch = ExpPoly.atom(COSH, x, f)
        sh = ExpPoly.atom(SINH, x, f)
        rate = _freq_poly(f)
        a, b = _val(self.c1), _val(self.c2)
        for _ in range(order):
            a, b = b * rate, a * rate
        return a * ch + b * sh


@dataclass(frozen=True)
class TrigPair(Ansatz):
    """c1*cos(rate*t) + c2*sin(rate*t)"""

    rate: Union[Freq, Rat, str] = 1
    c1: Value = 0
    c2: Value = 0

    def deriv(self, order: int) -> ExpPoly:
        f = Freq.of(self.rate)
        x = self.dep_var
        co = ExpPoly.atom(COS, x, f)
        si = ExpPoly.atom(SIN, x, f)
        rate = _freq_poly(f)
        a, b = _val(self.c1), _val(self.c2)
        for _ in range(order):
            a, b = b * rate, -a * rate
        return a * co + b * si


@dataclass(frozen=True)
class ExpLinear(Ansatz):
    """amp*e^{rate*t} - (lin/rate)*t + const, rate a nonzero parameter."""

    amp: Value = 0
    rate: Union[Freq, Rat, str] = 1
    lin: Value = 0
    const: Value = 0

    def deriv(self, order: int) -> ExpPoly:
        f = Freq.of(self.rate)
        x = self.dep_var
        e = ExpPoly.atom(EXP, x, f)
        rate = _freq_poly(f)
        amp = _val(self.amp)
        if order == 0:
            t = ExpPoly.var(x)
            return amp * e - _val(self.lin) * rate.inverse() * t + _val(self.const)
        if order == 1:
            return amp * rate * e - _val(self.lin) * rate.inverse()
        return amp * rate**order * e


@dataclass(frozen=True)
class PureExp(Ansatz):
    """coeff * e^{rate*t}"""

    coeff: Value = 1
    rate: Union[Freq, Rat, str] = 1

    def deriv(self, order: int) -> ExpPoly:
        f = Freq.of(self.rate)
        e = ExpPoly.atom(EXP, self.dep_var, f)
        return _val(self.coeff) * _freq_poly(f) ** order * e


@dataclass(frozen=True)
class Constant(Ansatz):
    value: Value = 0

    def deriv(self, order: int) -> ExpPoly:
        return _val(self.value) if order == 0 else ExpPoly.zero()


def _freq_poly(f: Freq) -> ExpPoly:
    out = ExpPoly.rational(f.coeff)
    if f.sym is not None:
        out = out * ExpPoly.param(f.sym)
    return out


def substitute_ansatz(e: ExpPoly, ansatze: Sequence[Ansatz]) -> ExpPoly:
    """Replace every derivative symbol covered by the given families."""
    by_target = {}
    for a in ansatze:
        if a.target in by_target:
            raise ValueError(f"duplicate ansatz for {a.target}")
        by_target[a.target] = a
    present = e.func_symbols()
    uncovered = {sym for sym, _ in present} - set(by_target)
    if uncovered:
        raise UncoveredSymbol(
            f"no ansatz covers symbol(s) {sorted(uncovered)}"
        )
    out = e
    # substitute highest orders first so lower-order values never collide
    for sym, order in sorted(present, key=lambda t: -t[1]):
        out = out.subst_func(sym, order, by_target[sym].deriv(order))
    return out

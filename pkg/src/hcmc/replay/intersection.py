"""Proportionality guard for the irreducibility endgame.

Two evaluations of the (X, X') polynomial

    p(X, X') = (p3 X + p6) X'^2 + (p1 X^2 + p4 X + p7) X' + (p2 X^2 + p5 X)

at different v share an infinite zero curve only if they are proportional
(no common factors would leave a finite intersection).  The guard checks
exact proportionality of the seven-entry coefficient vectors and replays
the inference that the normalised forms, having equal leading entries,
must coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = ["IntersectionVerdict", "DegenerateInput", "finite_intersection_guard"]

_N_COEFFS = 7


class DegenerateInput(Exception):
    pass


@dataclass(frozen=True)
class IntersectionVerdict:
    proportional: bool
    factor: Fraction | None
    normalized_equal: bool

    @property
    def kind(self) -> str:
        return "proportional" if self.proportional else "not_proportional"


def _validate(p: Sequence[Fraction]) -> tuple[Fraction, ...]:
    if len(p) != _N_COEFFS:
        raise ValueError(f"expected {_N_COEFFS} coefficients p1..p7, got {len(p)}")
    q = tuple(Fraction(x) for x in p)
    if q[0] * q[1] * q[2] == 0:
        raise DegenerateInput(
            "p1 p2 p3 must be nonzero (degree drop in the polynomial)"
        )
    return q


def finite_intersection_guard(p: Sequence[Fraction],
                              q: Sequence[Fraction]) -> IntersectionVerdict:
    """Compare two numeric coefficient vectors (p1..p7) exactly.

    Proportional vectors share the zero set; the normalised polynomial
    p/p6 has leading entry 1 in both, so a common infinite zero set forces
    the proportionality factor between the normalised forms to be 1.
    """
    pv, qv = _validate(p), _validate(q)
    factor = None
    for a, b in zip(pv, qv):
        if a == 0 and b == 0:
            continue
        if a == 0 or b == 0:
            return IntersectionVerdict(False, None, False)
        r = b / a
        if factor is None:
            factor = r
        elif r != factor:
            return IntersectionVerdict(False, None, False)
    factor = factor if factor is not None else Fraction(1)
    # normalising by p6 (index 5) scales the factor away entirely
    p_norm = tuple(x / pv[5] for x in pv)
    q_norm = tuple(x / qv[5] for x in qv)
    return IntersectionVerdict(True, factor, p_norm == q_norm)

"""Exact symbolic kernel: canonical expressions, ansatz substitution, quotients."""

from .poly import (
    COS,
    COSH,
    DEFAULT_MAX_DERIV_ORDER,
    EXP,
    SIN,
    SINH,
    Atom,
    DivisionMismatch,
    ExprError,
    ExpPoly,
    Freq,
    FrequencyMixError,
    MaxDerivOrderExceeded,
    MixedWDependence,
    Monomial,
    NonInvertibleSubstitution,
    P,
    UncoveredSymbol,
    atom,
    func,
    param,
    rational,
    var,
)
from .ansatz import (
    Ansatz,
    Constant,
    ExpLinear,
    HyperbolicPair,
    Linear,
    PureExp,
    TrigPair,
    substitute_ansatz,
)
from .frac import RationalExpr

__all__ = [
    "Atom",
    "Ansatz",
    "Constant",
    "COS",
    "COSH",
    "DEFAULT_MAX_DERIV_ORDER",
    "DivisionMismatch",
    "EXP",
    "ExpLinear",
    "ExprError",
    "ExpPoly",
    "Freq",
    "FrequencyMixError",
    "HyperbolicPair",
    "Linear",
    "MaxDerivOrderExceeded",
    "MixedWDependence",
    "Monomial",
    "NonInvertibleSubstitution",
    "P",
    "PureExp",
    "RationalExpr",
    "SIN",
    "SINH",
    "TrigPair",
    "UncoveredSymbol",
    "atom",
    "func",
    "param",
    "rational",
    "substitute_ansatz",
    "var",
]

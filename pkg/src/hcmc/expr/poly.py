"""Exact multivariate expressions over the function variables u, v, w.

The kernel works in a commutative ring generated by

* the variables ``u``, ``v``, ``w`` (polynomial powers),
* formal derivative symbols ``X, X', X'', ...`` (functions of u) and
  ``Y, Y', ...`` (functions of v), with Laurent powers so quotients like
  ``X''/X`` stay inside the ring,
* named parameters (``H``, ``lam``, ``m``, ``a1``, ...) with Laurent powers,
* transcendental atoms ``exp/cosh/sinh/cos/sin`` of a frequency times one
  variable, where the frequency is ``q`` or ``q*p`` for a rational ``q``
  and a single parameter symbol ``p``.

Every value is kept in a canonical normal form: rational coefficients,
products of atoms on the same variable rewritten to single atoms by the
product-to-sum identities, harmonics of even/odd atoms normalised to
positive frequency.  Equality of canonical forms is structural, which is
what makes the proof-replay checks decidable.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "ExprError",
    "MaxDerivOrderExceeded",
    "MixedWDependence",
    "UncoveredSymbol",
    "FrequencyMixError",
    "NonInvertibleSubstitution",
    "DivisionMismatch",
    "Freq",
    "Atom",
    "Monomial",
    "ExpPoly",
    "P",
    "var",
    "param",
    "func",
    "atom",
    "rational",
    "EXP",
    "COSH",
    "SINH",
    "COS",
    "SIN",
    "DEFAULT_MAX_DERIV_ORDER",
]

Rat = Union[int, Fraction]

DEFAULT_MAX_DERIV_ORDER = 4

VARS = ("u", "v", "w")
# dependency of the formal derivative symbols
FUNC_VAR = {"X": "u", "Y": "v"}

EXP = "exp"
COSH = "cosh"
SINH = "sinh"
COS = "cos"
SIN = "sin"

_HYP = (COSH, SINH)
_TRIG = (COS, SIN)
_EVEN = (COSH, COS)   # even in the frequency sign
_FAMILIES = (EXP, COSH, SINH, COS, SIN)


class ExprError(Exception):
    """Base error for the expression kernel."""


class MaxDerivOrderExceeded(ExprError):
    pass


class MixedWDependence(ExprError):
    pass


class UncoveredSymbol(ExprError):
    pass


class FrequencyMixError(ExprError):
    pass


class NonInvertibleSubstitution(ExprError):
    pass


class DivisionMismatch(ExprError):
    pass


def _frac(x: Rat) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class Freq:
    """Exact atom frequency ``coeff`` or ``coeff * sym`` (sym a parameter)."""

    coeff: Fraction
    sym: str | None = None

    @staticmethod
    def of(value: "Freq | Rat | str", sym: str | None = None) -> "Freq":
        if isinstance(value, Freq):
            return value
        if isinstance(value, str):
            return Freq(Fraction(1), value)
        return Freq(_frac(value), sym)

    def __post_init__(self):
        if not isinstance(self.coeff, Fraction):
            object.__setattr__(self, "coeff", _frac(self.coeff))

    def is_zero(self) -> bool:
        return self.coeff == 0

    def __add__(self, other: "Freq") -> "Freq":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.sym != other.sym:
            raise FrequencyMixError(
                f"cannot combine frequencies {self} and {other}: "
                "different base rates (substitute a numeric rate first)"
            )
        s = self.coeff + other.coeff
        return Freq(s, self.sym if s != 0 else None)

    def __neg__(self) -> "Freq":
        return Freq(-self.coeff, self.sym)

    def __sub__(self, other: "Freq") -> "Freq":
        return self + (-other)

    def scaled(self, q: Rat) -> "Freq":
        q = _frac(q)
        if q == 0:
            return Freq(Fraction(0), None)
        return Freq(self.coeff * q, self.sym)

    def sort_key(self):
        return (self.sym or "", self.coeff)

    def text(self) -> str:
        if self.sym is None:
            return _fmt_frac(self.coeff)
        if self.coeff == 1:
            return self.sym
        if self.coeff == -1:
            return f"-{self.sym}"
        return f"{_fmt_frac(self.coeff, parens=True)}*{self.sym}"

    def __str__(self) -> str:  # pragma: no cover - debug convenience
        return self.text()


def _fmt_frac(q: Fraction, parens: bool = False) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    s = f"{q.numerator}/{q.denominator}"
    return f"({s})" if parens else s


@dataclass(frozen=True)
class Atom:
    family: str
    var: str
    freq: Freq

    def sort_key(self):
        return (self.var, self.family, self.freq.sort_key())

    def text(self) -> str:
        f = self.freq.text()
        if f == "1":
            arg = self.var
        elif f == "-1":
            arg = f"-{self.var}"
        else:
            arg = f"{f}*{self.var}"
        return f"{self.family}({arg})"


# A monomial is a product of generator powers.  Atom products are already
# resolved, so it carries at most one atom per variable.
@dataclass(frozen=True)
class Monomial:
    vpow: tuple[int, int, int] = (0, 0, 0)  # u, v, w powers (non-negative)
    funcs: tuple[tuple[tuple[str, int], int], ...] = ()  # ((sym, order), power)
    params: tuple[tuple[str, int], ...] = ()  # (name, power), Laurent
    atoms: tuple[Atom, ...] = ()  # at most one per variable, sorted

    def sort_key(self):
        deg = (
            sum(self.vpow)
            + sum(abs(p) for _, p in self.funcs)
            + sum(abs(p) for _, p in self.params)
            + len(self.atoms)
        )
        return (
            deg,
            self.vpow,
            tuple((s, o, p) for (s, o), p in self.funcs),
            self.params,
            tuple(a.sort_key() for a in self.atoms),
        )

    def var_power(self, x: str) -> int:
        return self.vpow[VARS.index(x)]

    def atom_on(self, x: str) -> Atom | None:
        for a in self.atoms:
            if a.var == x:
                return a
        return None

    def text(self) -> str:
        parts: list[str] = []
        for name, p in self.params:
            parts.append(name if p == 1 else f"{name}^{p}")
        for (sym, order), p in self.funcs:
            s = sym + "'" * order
            parts.append(s if p == 1 else f"{s}^{p}")
        for x, p in zip(VARS, self.vpow):
            if p:
                parts.append(x if p == 1 else f"{x}^{p}")
        for a in self.atoms:
            parts.append(a.text())
        return "*".join(parts) if parts else "1"


_ONE_MONO = Monomial()


def _mk_funcs(d: Mapping[tuple[str, int], int]) -> tuple:
    return tuple(sorted((k, p) for k, p in d.items() if p != 0))


def _mk_params(d: Mapping[str, int]) -> tuple:
    return tuple(sorted((k, p) for k, p in d.items() if p != 0))


def _mk_atoms(atoms: Iterable[Atom]) -> tuple:
    return tuple(sorted(atoms, key=lambda a: a.sort_key()))


def _atom_normal(family: str, freq: Freq) -> tuple[Atom | None, Fraction]:
    """Normalise one atom; returns (atom or None for the constant 1, factor)."""
    if freq.is_zero():
        if family in (SINH, SIN):
            return None, Fraction(0)
        return None, Fraction(1)
    if family in _EVEN and freq.coeff < 0:
        return Atom(family, "?", -freq), Fraction(1)  # var fixed by caller
    if family in (SINH, SIN) and freq.coeff < 0:
        return Atom(family, "?", -freq), Fraction(-1)
    return Atom(family, "?", freq), Fraction(1)


def _norm_atom(family: str, x: str, freq: Freq) -> tuple[Atom | None, Fraction]:
    a, c = _atom_normal(family, freq)
    if a is not None:
        a = Atom(a.family, x, a.freq)
    return a, c


def _atom_mul(a: Atom, b: Atom) -> list[tuple[Atom | None, Fraction]]:
    """Product of two atoms on the same variable as a sum of single atoms."""
    assert a.var == b.var
    x = a.var
    fa, fb = a.family, b.family
    half = Fraction(1, 2)
    out: list[tuple[Atom | None, Fraction]] = []

    def push(family: str, freq: Freq, c: Fraction):
        at, f = _norm_atom(family, x, freq)
        if f != 0:
            out.append((at, c * f))

    if fa == EXP and fb == EXP:
        push(EXP, a.freq + b.freq, Fraction(1))
    elif {fa, fb} <= set(_HYP):
        s, d = a.freq + b.freq, a.freq - b.freq
        if fa == COSH and fb == COSH:
            push(COSH, s, half)
            push(COSH, d, half)
        elif fa == SINH and fb == SINH:
            push(COSH, s, half)
            push(COSH, d, -half)
        else:  # cosh * sinh in either order; sinh carries freq of the sinh
            alpha = a.freq if fa == COSH else b.freq
            beta = b.freq if fb == SINH else a.freq
            # cosh(alpha) sinh(beta) = (sinh(alpha+beta) - sinh(alpha-beta))/2
            push(SINH, alpha + beta, half)
            push(SINH, alpha - beta, -half)
    elif {fa, fb} <= set(_TRIG):
        s, d = a.freq + b.freq, a.freq - b.freq
        if fa == COS and fb == COS:
            push(COS, d, half)
            push(COS, s, half)
        elif fa == SIN and fb == SIN:
            push(COS, d, half)
            push(COS, s, -half)
        else:
            alpha = a.freq if fa == SIN else b.freq  # sin arg
            beta = b.freq if fb == COS else a.freq  # cos arg
            # sin(alpha) cos(beta) = (sin(alpha+beta) + sin(alpha-beta))/2
            push(SIN, alpha + beta, half)
            push(SIN, alpha - beta, half)
    elif EXP in (fa, fb) and (fa in _HYP or fb in _HYP):
        e = a if fa == EXP else b
        h = b if fa == EXP else a
        # e^g * cosh(f) = (e^{g+f} + e^{g-f})/2, sinh analogously
        sign = Fraction(1) if h.family == COSH else Fraction(-1)
        push(EXP, e.freq + h.freq, half)
        push(EXP, e.freq - h.freq, sign * half)
    else:
        raise FrequencyMixError(
            f"unsupported atom product {a.text()} * {b.text()}"
        )
    return out


class ExpPoly:
    """Immutable canonical expression: map monomial -> rational coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        acc: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c != 0:
                    acc[m] = acc.get(m, Fraction(0)) + c
        self.terms: dict[Monomial, Fraction] = {
            m: c for m, c in acc.items() if c != 0
        }
        self._uniformize_families()

    # -- construction -------------------------------------------------

    @staticmethod
    def zero() -> "ExpPoly":
        return ExpPoly()

    @staticmethod
    def one() -> "ExpPoly":
        return ExpPoly({_ONE_MONO: Fraction(1)})

    @staticmethod
    def rational(q: Rat) -> "ExpPoly":
        q = _frac(q)
        return ExpPoly({_ONE_MONO: q}) if q != 0 else ExpPoly()

    @staticmethod
    def var(x: str) -> "ExpPoly":
        if x not in VARS:
            raise ValueError(f"unknown variable {x!r}")
        vp = [0, 0, 0]
        vp[VARS.index(x)] = 1
        return ExpPoly({Monomial(vpow=tuple(vp)): Fraction(1)})

    @staticmethod
    def param(name: str) -> "ExpPoly":
        return ExpPoly({Monomial(params=((name, 1),)): Fraction(1)})

    @staticmethod
    def func(sym: str, order: int = 0) -> "ExpPoly":
        if sym not in FUNC_VAR:
            raise ValueError(f"unknown function symbol {sym!r}")
        if order < 0:
            raise ValueError("derivative order must be >= 0")
        return ExpPoly({Monomial(funcs=(((sym, order), 1),)): Fraction(1)})

    @staticmethod
    def atom(family: str, x: str, freq: "Freq | Rat | str") -> "ExpPoly":
        if family not in _FAMILIES:
            raise ValueError(f"unknown atom family {family!r}")
        if x not in VARS:
            raise ValueError(f"unknown variable {x!r}")
        f = Freq.of(freq)
        a, c = _norm_atom(family, x, f)
        if c == 0:
            return ExpPoly()
        mono = Monomial(atoms=(a,)) if a is not None else _ONE_MONO
        return ExpPoly({mono: c})

    # -- canonicalisation ----------------------------------------------

    def _uniformize_families(self) -> None:
        """Rewrite cosh/sinh to exponentials on any variable that also
        carries exp atoms, so that basis atoms stay linearly independent."""
        while True:
            families: dict[str, set[str]] = {}
            for m in self.terms:
                for a in m.atoms:
                    families.setdefault(a.var, set()).add(a.family)
            mixed = [
                x
                for x, fams in families.items()
                if EXP in fams and (COSH in fams or SINH in fams)
            ]
            if not mixed:
                return
            x = mixed[0]
            new: dict[Monomial, Fraction] = {}
            half = Fraction(1, 2)
            for m, c in self.terms.items():
                a = m.atom_on(x)
                if a is None or a.family == EXP:
                    new[m] = new.get(m, Fraction(0)) + c
                    continue
                rest = tuple(t for t in m.atoms if t.var != x)
                sign = Fraction(1) if a.family == COSH else Fraction(-1)
                for freq, fac in ((a.freq, half), (-a.freq, sign * half)):
                    at, f2 = _norm_atom(EXP, x, freq)
                    mono = Monomial(
                        m.vpow,
                        m.funcs,
                        m.params,
                        _mk_atoms(rest + ((at,) if at else ())),
                    )
                    new[mono] = new.get(mono, Fraction(0)) + c * fac * f2
            self.terms = {m: c for m, c in new.items() if c != 0}

    # -- ring operations ------------------------------------------------

    def __add__(self, other: "ExpPoly | Rat") -> "ExpPoly":
        other = _as_poly(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, Fraction(0)) + c
        return ExpPoly(acc)

    __radd__ = __add__

    def __neg__(self) -> "ExpPoly":
        return ExpPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "ExpPoly | Rat") -> "ExpPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other: "ExpPoly | Rat") -> "ExpPoly":
        return _as_poly(other) - self

    def __mul__(self, other: "ExpPoly | Rat") -> "ExpPoly":
        other = _as_poly(other)
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                for m, c in _term_mul(m1, m2):
                    c *= c1 * c2
                    if c != 0:
                        acc[m] = acc.get(m, Fraction(0)) + c
        return ExpPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ExpPoly":
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n < 0:
            return self.inverse() ** (-n)
        out = ExpPoly.one()
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def inverse(self) -> "ExpPoly":
        """Inverse of a single-term expression (Laurent generators only)."""
        if len(self.terms) != 1:
            raise NonInvertibleSubstitution(
                f"cannot invert a {len(self.terms)}-term expression"
            )
        (m, c), = self.terms.items()
        if any(p for p in m.vpow):
            raise NonInvertibleSubstitution("cannot invert a variable power")
        inv_atoms = []
        for a in m.atoms:
            if a.family != EXP:
                raise NonInvertibleSubstitution(
                    f"cannot invert atom {a.text()}"
                )
            inv_atoms.append(Atom(EXP, a.var, -a.freq))
        mono = Monomial(
            (0, 0, 0),
            tuple((k, -p) for k, p in m.funcs),
            tuple((k, -p) for k, p in m.params),
            _mk_atoms(inv_atoms),
        )
        return ExpPoly({mono: Fraction(1) / c})

    def __eq__(self, other) -> bool:
        if not isinstance(other, (ExpPoly, int, Fraction)):
            return NotImplemented
        return (self - _as_poly(other)).is_zero()

    def __hash__(self):
        raise TypeError("ExpPoly is not hashable")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- calculus ---------------------------------------------------------

    def diff(self, x: str, max_order: int = DEFAULT_MAX_DERIV_ORDER) -> "ExpPoly":
        if x not in VARS:
            raise ValueError(f"unknown variable {x!r}")
        xi = VARS.index(x)
        acc: dict[Monomial, Fraction] = {}

        def add(m: Monomial, c: Fraction):
            if c != 0:
                acc[m] = acc.get(m, Fraction(0)) + c

        for m, c in self.terms.items():
            # variable power
            k = m.vpow[xi]
            if k:
                vp = list(m.vpow)
                vp[xi] = k - 1
                add(Monomial(tuple(vp), m.funcs, m.params, m.atoms), c * k)
            # derivative symbols
            for (sym, order), p in m.funcs:
                if FUNC_VAR[sym] != x:
                    continue
                if order + 1 > max_order:
                    raise MaxDerivOrderExceeded(
                        f"derivative of {sym}{chr(39) * order} exceeds max order {max_order}"
                    )
                fd = dict(m.funcs)
                fd[(sym, order)] = p - 1
                fd[(sym, order + 1)] = fd.get((sym, order + 1), 0) + 1
                add(Monomial(m.vpow, _mk_funcs(fd), m.params, m.atoms), c * p)
            # the atom on x
            a = m.atom_on(x)
            if a is not None:
                rest = tuple(t for t in m.atoms if t.var != x)
                q = a.freq.coeff
                extra_param = a.freq.sym
                if a.family == EXP:
                    repl = [(EXP, a.freq, Fraction(1))]
                elif a.family == COSH:
                    repl = [(SINH, a.freq, Fraction(1))]
                elif a.family == SINH:
                    repl = [(COSH, a.freq, Fraction(1))]
                elif a.family == COS:
                    repl = [(SIN, a.freq, Fraction(-1))]
                else:  # SIN
                    repl = [(COS, a.freq, Fraction(1))]
                for fam, freq, sgn in repl:
                    at, f2 = _norm_atom(fam, x, freq)
                    if f2 == 0:
                        continue
                    pd = dict(m.params)
                    if extra_param is not None:
                        pd[extra_param] = pd.get(extra_param, 0) + 1
                    mono = Monomial(
                        m.vpow,
                        m.funcs,
                        _mk_params(pd),
                        _mk_atoms(rest + ((at,) if at else ())),
                    )
                    add(mono, c * q * sgn * f2)
        return ExpPoly(acc)

    def plane_residual(self, max_order: int = DEFAULT_MAX_DERIV_ORDER) -> "ExpPoly":
        """d/du - d/dv, the first-order condition for a quantity that is
        constant along the plane u + v + w = 0 (w-free expressions)."""
        return self.diff("u", max_order) - self.diff("v", max_order)

    # -- substitution -----------------------------------------------------

    def subst_var(self, x: str, value: Rat) -> "ExpPoly":
        value = _frac(value)
        xi = VARS.index(x)
        acc: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            k = m.vpow[xi]
            coeff = c * value**k
            if coeff == 0:
                continue
            a = m.atom_on(x)
            atoms = m.atoms
            if a is not None:
                if value != 0:
                    raise NonInvertibleSubstitution(
                        f"substituting {x}={value} into atom {a.text()} would "
                        "leave the rational coefficient field"
                    )
                atoms = tuple(t for t in m.atoms if t.var != x)
                if a.family in (SINH, SIN):
                    continue  # sinh(0) = sin(0) = 0
            vp = list(m.vpow)
            vp[xi] = 0
            mono = Monomial(tuple(vp), m.funcs, m.params, atoms)
            acc[mono] = acc.get(mono, Fraction(0)) + coeff
        return ExpPoly(acc)

    def eliminate_w(self) -> "ExpPoly":
        """Rewrite w = -(u+v): folds w powers and w atoms onto u and v."""
        out = ExpPoly.zero()
        minus_u_v = -(ExpPoly.var("u") + ExpPoly.var("v"))
        for m, c in self.terms.items():
            k = m.vpow[2]
            a = m.atom_on("w")
            base_atoms = tuple(t for t in m.atoms if t.var != "w")
            mono = Monomial((m.vpow[0], m.vpow[1], 0), m.funcs, m.params, base_atoms)
            piece = ExpPoly({mono: c})
            if k:
                piece = piece * minus_u_v**k
            if a is not None:
                if a.family != EXP:
                    raise MixedWDependence(
                        f"cannot eliminate w from atom {a.text()}"
                    )
                piece = (
                    piece
                    * ExpPoly.atom(EXP, "u", -a.freq)
                    * ExpPoly.atom(EXP, "v", -a.freq)
                )
            out = out + piece
        return out

    def subst_param(self, name: str, value: "ExpPoly | Rat") -> "ExpPoly":
        value = _as_poly(value)
        # frequency substitution requires value = q or q * single param
        freq_repl: Freq | None = None
        uses_freq = any(
            a.freq.sym == name for m in self.terms for a in m.atoms
        )
        if uses_freq:
            freq_repl = _as_freq(value)
            if freq_repl is None:
                raise NonInvertibleSubstitution(
                    f"parameter {name} appears in atom frequencies; the "
                    "substituted value must be rational or rational*parameter"
                )
        out = ExpPoly.zero()
        for m, c in self.terms.items():
            power = 0
            pd = dict(m.params)
            if name in pd:
                power = pd.pop(name)
            new_atoms: list[Atom] = []
            atom_factor = Fraction(1)
            extra = ExpPoly.one()
            for a in m.atoms:
                if a.freq.sym == name:
                    nf = freq_repl.scaled(a.freq.coeff)  # type: ignore[union-attr]
                    at, f2 = _norm_atom(a.family, a.var, nf)
                    atom_factor *= f2
                    if at is not None:
                        new_atoms.append(at)
                else:
                    new_atoms.append(a)
            if atom_factor == 0:
                continue
            mono = Monomial(m.vpow, m.funcs, _mk_params(pd), _mk_atoms(new_atoms))
            piece = ExpPoly({mono: c * atom_factor})
            if power:
                piece = piece * (value**power if power > 0 else value.inverse() ** (-power))
            out = out + piece
        return out

    def subst_func(self, sym: str, order: int, value: "ExpPoly | Rat") -> "ExpPoly":
        value = _as_poly(value)
        out = ExpPoly.zero()
        key = (sym, order)
        for m, c in self.terms.items():
            power = 0
            fd = dict(m.funcs)
            if key in fd:
                power = fd.pop(key)
            mono = Monomial(m.vpow, _mk_funcs(fd), m.params, m.atoms)
            piece = ExpPoly({mono: c})
            if power:
                piece = piece * (value**power if power > 0 else value.inverse() ** (-power))
            out = out + piece
        return out

    def subst_func_cleared(self, sym: str, order: int, num: "ExpPoly",
                           den: "ExpPoly") -> tuple["ExpPoly", int]:
        """Substitute (sym, order) -> num/den into a polynomial in that
        symbol, clearing denominators.

        Returns (e * den^K with the substitution applied, K) where K is the
        degree in the symbol; the caller must certify den != 0 since the
        zero set is preserved only up to that factor.
        """
        parts = self.collect_func(sym, order)
        if any(k < 0 for k in parts):
            raise NonInvertibleSubstitution(
                f"negative power of ({sym},{order}); not polynomial"
            )
        K = max(parts) if parts else 0
        out = ExpPoly.zero()
        for k, coeff in parts.items():
            out = out + coeff * num**k * den ** (K - k)
        return out, K

    def restrict(self, assignment: Mapping[str, object]) -> "ExpPoly":
        """Apply a partial substitution.

        Keys may be variables (mapped to exact rationals), parameters
        (mapped to rationals or expressions), or the special entry
        ``{"w": "plane"}`` that eliminates w through w = -(u+v).
        """
        out = self
        for key, val in assignment.items():
            if key == "w" and val == "plane":
                out = out.eliminate_w()
            elif key in VARS:
                out = out.subst_var(key, val)  # type: ignore[arg-type]
            else:
                out = out.subst_param(key, val)  # type: ignore[arg-type]
        return out

    # -- collection -------------------------------------------------------

    def collect_in_P(self) -> dict[int, "ExpPoly"]:
        """Coefficients of powers of P = e^{-w}.

        Requires every w-atom to be an exponential with non-positive
        frequency and the coefficients to carry no other w dependence.
        """
        acc: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            if m.vpow[2]:
                raise MixedWDependence("coefficient retains a power of w")
            a = m.atom_on("w")
            k = 0
            if a is not None:
                if a.family != EXP or a.freq.sym is not None:
                    raise MixedWDependence(
                        f"w dependence through atom {a.text()} is not polynomial in P"
                    )
                if a.freq.coeff > 0:
                    raise MixedWDependence(
                        f"positive exponential {a.text()} is not a power of P"
                    )
                q = -a.freq.coeff
                if q.denominator != 1:
                    raise MixedWDependence("fractional power of P")
                k = int(q)
            rest = tuple(t for t in m.atoms if t.var != "w")
            mono = Monomial(m.vpow, m.funcs, m.params, rest)
            acc.setdefault(k, {})[mono] = acc.get(k, {}).get(mono, Fraction(0)) + c
        return {k: ExpPoly(t) for k, t in sorted(acc.items())}

    def collect_var(self, x: str) -> dict[int, "ExpPoly"]:
        """Coefficients of powers of a variable (atoms on x not allowed)."""
        xi = VARS.index(x)
        acc: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            if m.atom_on(x) is not None:
                raise MixedWDependence(
                    f"cannot collect {x}-powers: atom on {x} present"
                )
            k = m.vpow[xi]
            vp = list(m.vpow)
            vp[xi] = 0
            mono = Monomial(tuple(vp), m.funcs, m.params, m.atoms)
            acc.setdefault(k, {})[mono] = acc.get(k, {}).get(mono, Fraction(0)) + c
        return {k: ExpPoly(t) for k, t in sorted(acc.items())}

    def collect_func(self, sym: str, order: int = 0) -> dict[int, "ExpPoly"]:
        """Coefficients of powers of a derivative symbol such as X or X'."""
        key = (sym, order)
        acc: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            fd = dict(m.funcs)
            k = fd.pop(key, 0)
            mono = Monomial(m.vpow, _mk_funcs(fd), m.params, m.atoms)
            acc.setdefault(k, {})[mono] = acc.get(k, {}).get(mono, Fraction(0)) + c
        return {k: ExpPoly(t) for k, t in sorted(acc.items())}

    def collect_param(self, name: str) -> dict[int, "ExpPoly"]:
        """Coefficients of powers of a parameter (must not set atom rates)."""
        acc: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            if any(a.freq.sym == name for a in m.atoms):
                raise MixedWDependence(
                    f"cannot collect {name}-powers: it drives an atom rate"
                )
            pd = dict(m.params)
            k = pd.pop(name, 0)
            mono = Monomial(m.vpow, m.funcs, _mk_params(pd), m.atoms)
            acc.setdefault(k, {})[mono] = acc.get(k, {}).get(mono, Fraction(0)) + c
        return {k: ExpPoly(t) for k, t in sorted(acc.items())}

    def coefficients_on_basis(self) -> dict[Monomial, "ExpPoly"]:
        """Decompose into basis atoms (variable powers times atoms) with
        parameter-only coefficients.  Derivative symbols must be resolved."""
        acc: dict[Monomial, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            if m.funcs:
                raise UncoveredSymbol(
                    "coefficients_on_basis requires all derivative symbols "
                    f"to be substituted (found {m.text()})"
                )
            basis = Monomial(m.vpow, (), (), m.atoms)
            coeff = Monomial((0, 0, 0), (), m.params, ())
            acc.setdefault(basis, {})[coeff] = (
                acc.get(basis, {}).get(coeff, Fraction(0)) + c
            )
        return {b: ExpPoly(t) for b, t in sorted(acc.items(), key=lambda kv: kv[0].sort_key())}

    # -- queries ------------------------------------------------------------

    def func_symbols(self) -> set[tuple[str, int]]:
        return {k for m in self.terms for k, _ in m.funcs}

    def param_names(self) -> set[str]:
        names = {name for m in self.terms for name, _ in m.params}
        names |= {a.freq.sym for m in self.terms for a in m.atoms if a.freq.sym}
        return names

    def depends_on_var(self, x: str) -> bool:
        xi = VARS.index(x)
        return any(m.vpow[xi] or m.atom_on(x) for m in self.terms)

    def as_rational(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if len(self.terms) == 1 and _ONE_MONO in self.terms:
            return self.terms[_ONE_MONO]
        raise ExprError(f"not a rational constant: {self.text()}")

    def is_rational(self) -> bool:
        return self.is_zero() or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    # -- exact division -------------------------------------------------------

    def exact_div(self, divisor: "ExpPoly | Rat") -> "ExpPoly":
        """Exact quotient; raises DivisionMismatch when it does not divide."""
        import functools

        divisor = _as_poly(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero expression")
        if self.is_zero():
            return ExpPoly.zero()
        key = functools.cmp_to_key(_lex_cmp)
        lead = max(divisor.terms, key=key)
        lead_c = divisor.terms[lead]
        if len(divisor.terms) == 1:
            out: dict[Monomial, Fraction] = {}
            for m, c in self.terms.items():
                piece = _term_div(m, lead)
                if piece is None:
                    raise DivisionMismatch(
                        f"{m.text()} is not divisible by {lead.text()}"
                    )
                out[piece] = out.get(piece, Fraction(0)) + c / lead_c
            return ExpPoly(out)
        rem = self
        quo = ExpPoly.zero()
        size_limit = 64 * (len(self.terms) + len(divisor.terms) + 8)
        for _ in range(512):
            if rem.is_zero():
                return quo
            if len(rem.terms) > size_limit:
                break
            t = max(rem.terms, key=key)
            cof = _term_div(t, lead)
            if cof is None:
                break
            piece = ExpPoly({cof: rem.terms[t] / lead_c})
            quo = quo + piece
            rem = rem - piece * divisor
        raise DivisionMismatch(
            f"{self.digest()} is not an exact multiple of {divisor.digest()}"
        )

    # -- numeric evaluation --------------------------------------------------

    def eval_num(self, env: Mapping[str, float],
                 funcs: Mapping[tuple[str, int], float] | None = None) -> float:
        """Floating point evaluation; env maps variables and parameters,
        funcs maps derivative symbols like ("X", 1)."""
        funcs = funcs or {}
        total = 0.0
        fns = {EXP: math.exp, COSH: math.cosh, SINH: math.sinh,
               COS: math.cos, SIN: math.sin}
        for m, c in self.terms.items():
            val = float(c)
            for x, p in zip(VARS, m.vpow):
                if p:
                    val *= env[x] ** p
            for (sym, order), p in m.funcs:
                val *= funcs[(sym, order)] ** p
            for name, p in m.params:
                val *= env[name] ** p
            for a in m.atoms:
                rate = env[a.freq.sym] if a.freq.sym else 1.0
                val *= fns[a.family](float(a.freq.coeff) * rate * env[a.var])
            total += val
        return total

    # -- presentation ----------------------------------------------------------

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: m.sort_key()):
            c = self.terms[m]
            mono = m.text()
            if mono == "1":
                body = _fmt_frac(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{_fmt_frac(abs(c), parens=True)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def digest(self) -> str:
        """Stable short fingerprint for logging large expressions."""
        h = hashlib.sha256(self.text().encode()).hexdigest()[:12]
        return f"{len(self.terms)}t:{h}"

    def __repr__(self) -> str:
        return f"ExpPoly({self.text()})"


def _term_div(m1: Monomial, m2: Monomial) -> Monomial | None:
    """Monomial quotient m1/m2, or None when it leaves the ring
    (negative variable powers, mismatched non-exponential atoms)."""
    vpow = tuple(a - b for a, b in zip(m1.vpow, m2.vpow))
    if any(p < 0 for p in vpow):
        return None
    fd = dict(m1.funcs)
    for k, p in m2.funcs:
        fd[k] = fd.get(k, 0) - p
    pd = dict(m1.params)
    for k, p in m2.params:
        pd[k] = pd.get(k, 0) - p
    atoms1 = {a.var: a for a in m1.atoms}
    out_atoms: list[Atom] = []
    for x in VARS:
        a = atoms1.get(x)
        b = next((t for t in m2.atoms if t.var == x), None)
        if b is None:
            if a is not None:
                out_atoms.append(a)
            continue
        if b.family == EXP:
            freq = (a.freq if a is not None and a.family == EXP else Freq(Fraction(0))) - b.freq
            if a is not None and a.family != EXP:
                return None
            if not freq.is_zero():
                out_atoms.append(Atom(EXP, x, freq))
        else:
            # non-exponential atoms only cancel against an identical atom
            if a is None or a.family != b.family or a.freq != b.freq:
                return None
    return Monomial(vpow, _mk_funcs(fd), _mk_params(pd), _mk_atoms(out_atoms))


def _lex_cmp(m1: Monomial, m2: Monomial) -> int:
    """Pure lexicographic order over the merged generator slots.

    Compatible with multiplication (exponents add slotwise), which is what
    exact division needs for leading-term reduction.
    """
    for a, b in zip(m1.vpow, m2.vpow):
        if a != b:
            return 1 if a > b else -1
    d1, d2 = dict(m1.funcs), dict(m2.funcs)
    for k in sorted(set(d1) | set(d2)):
        a, b = d1.get(k, 0), d2.get(k, 0)
        if a != b:
            return 1 if a > b else -1
    p1, p2 = dict(m1.params), dict(m2.params)
    for k in sorted(set(p1) | set(p2)):
        a, b = p1.get(k, 0), p2.get(k, 0)
        if a != b:
            return 1 if a > b else -1
    a1 = {(a.var, a.family, a.freq.sym or ""): a.freq.coeff for a in m1.atoms}
    a2 = {(a.var, a.family, a.freq.sym or ""): a.freq.coeff for a in m2.atoms}
    for k in sorted(set(a1) | set(a2)):
        x, y = a1.get(k, Fraction(0)), a2.get(k, Fraction(0))
        if x != y:
            return 1 if x > y else -1
    return 0


def _term_mul(m1: Monomial, m2: Monomial) -> list[tuple[Monomial, Fraction]]:
    vpow = tuple(a + b for a, b in zip(m1.vpow, m2.vpow))
    fd = dict(m1.funcs)
    for k, p in m2.funcs:
        fd[k] = fd.get(k, 0) + p
    pd = dict(m1.params)
    for k, p in m2.params:
        pd[k] = pd.get(k, 0) + p
    funcs = _mk_funcs(fd)
    params = _mk_params(pd)

    atoms1 = {a.var: a for a in m1.atoms}
    atoms2 = {a.var: a for a in m2.atoms}
    merged: list[list[tuple[Atom | None, Fraction]]] = []
    for x in VARS:
        a, b = atoms1.get(x), atoms2.get(x)
        if a is None and b is None:
            continue
        if a is None or b is None:
            merged.append([(a or b, Fraction(1))])
        else:
            merged.append(_atom_mul(a, b))
    out: list[tuple[Monomial, Fraction]] = []

    def rec(i: int, atoms: tuple[Atom, ...], coeff: Fraction):
        if coeff == 0:
            return
        if i == len(merged):
            out.append((Monomial(vpow, funcs, params, _mk_atoms(atoms)), coeff))
            return
        for at, c in merged[i]:
            rec(i + 1, atoms + ((at,) if at is not None else ()), coeff * c)

    rec(0, (), Fraction(1))
    return out


def _as_poly(x: "ExpPoly | Rat") -> ExpPoly:
    if isinstance(x, ExpPoly):
        return x
    return ExpPoly.rational(x)


def _as_freq(value: ExpPoly) -> Freq | None:
    """Interpret an expression as q or q*param for frequency substitution."""
    if value.is_zero():
        return Freq(Fraction(0), None)
    if len(value.terms) != 1:
        return None
    (m, c), = value.terms.items()
    if any(m.vpow) or m.funcs or m.atoms:
        return None
    if not m.params:
        return Freq(c, None)
    if len(m.params) == 1 and m.params[0][1] == 1:
        return Freq(c, m.params[0][0])
    return None


# -- public shorthands --------------------------------------------------------

def P(x: "ExpPoly | Rat | str") -> ExpPoly:
    """Coerce ints/Fractions/parameter names to ExpPoly."""
    if isinstance(x, str):
        return ExpPoly.param(x)
    return _as_poly(x)


var = ExpPoly.var
param = ExpPoly.param
func = ExpPoly.func
atom = ExpPoly.atom
rational = ExpPoly.rational

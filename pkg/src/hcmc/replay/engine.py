"""Interpreter for machine-checked replay of the classification cases.

A case script is a small program against :class:`ScriptRun`: every
substitution, collection, division, and contradiction certificate is
executed exactly in the expression kernel and logged as a step.  A branch
passes only if every scripted expectation holds as an identity of
canonical forms; contradictions are certified by explicit witnesses that
never rely on floating point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from ..expr import (
    Ansatz,
    DivisionMismatch,
    ExpPoly,
    Monomial,
    P,
    RationalExpr,
    substitute_ansatz,
)

__all__ = [
    "Witness",
    "StepRecord",
    "CaseReport",
    "CaseScript",
    "ScriptRun",
    "StepFailure",
    "run_script",
    "fold_w_basis",
]

NONZERO_COEFF = "nonzero_constant_coefficient"
FORCED_DEGENERATE = "forced_degenerate"
FORCED_LINEAR = "forced_linear_or_constant"


@dataclass(frozen=True)
class Witness:
    kind: str
    basis_atom: str | None
    coefficient: str
    side_conditions: tuple[str, ...]
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "basis_atom": self.basis_atom,
            "coefficient": self.coefficient,
            "side_conditions": list(self.side_conditions),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class StepRecord:
    index: int
    kind: str
    description: str
    value: str

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "kind": self.kind,
            "description": self.description,
            "value": self.value,
        }


@dataclass
class CaseReport:
    label: str
    regime: str
    case_path: str
    status: str = "pass"
    steps: list[StepRecord] = field(default_factory=list)
    witnesses: list[Witness] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "regime": self.regime,
            "case_path": self.case_path,
            "status": self.status,
            "steps": [s.to_dict() for s in self.steps],
            "witnesses": [w.to_dict() for w in self.witnesses],
            "notes": list(self.notes),
            "error": self.error,
        }


class StepFailure(Exception):
    def __init__(self, index: int, message: str):
        super().__init__(f"step {index}: {message}")
        self.index = index
        self.message = message


@dataclass(frozen=True)
class CaseScript:
    label: str
    regime: str
    case_path: str
    builder: Callable[["ScriptRun"], None]


# expressions above this many terms are logged by fingerprint only
_LOG_TERM_LIMIT = 40


def _expr_text(e) -> str:
    if isinstance(e, RationalExpr):
        num = _expr_text(e.num)
        if e.den == ExpPoly.one():
            return num
        return f"({num}) / ({_expr_text(e.den)})"
    if isinstance(e, ExpPoly):
        if len(e.terms) > _LOG_TERM_LIMIT:
            return e.digest()
        return e.text()
    return str(e)


class ScriptRun:
    """Execution context for one branch."""

    def __init__(self, script: CaseScript):
        self.script = script
        self.report = CaseReport(script.label, script.regime, script.case_path)
        self._idx = 0

    # -- logging -------------------------------------------------------

    def log(self, kind: str, description: str, value: object = "") -> None:
        self.report.steps.append(
            StepRecord(self._idx, kind, description, _expr_text(value))
        )
        self._idx += 1

    def note(self, text: str) -> None:
        self.report.notes.append(text)

    def fail(self, message: str):
        raise StepFailure(self._idx, message)

    def axiom(self, description: str) -> None:
        """Record a non-computational inference the replay relies on
        (separation of variables, finite zero sets, sign constraints)."""
        self.log("axiom", description)

    # -- expression steps ------------------------------------------------

    def expect_equal(self, computed, expected, description: str):
        if isinstance(computed, RationalExpr) or isinstance(expected, RationalExpr):
            ok = RationalExpr.of(computed) == RationalExpr.of(expected)
        else:
            ok = (P(computed) - P(expected)).is_zero()
        if not ok:
            exp_text = _expr_text(expected if isinstance(expected, RationalExpr)
                                  else P(expected))
            self.fail(f"{description}: expected {exp_text}, "
                      f"got {_expr_text(computed)}")
        self.log("match", description, computed)
        return computed

    def expect_zero(self, computed, description: str):
        return self.expect_equal(computed, ExpPoly.zero(), description)

    def substitute_ansatz(self, e: ExpPoly, ansatze: Sequence[Ansatz],
                          description: str) -> ExpPoly:
        out = substitute_ansatz(e, ansatze)
        conds = sorted({c for a in ansatze for c in a.side_conditions})
        suffix = f" (under {', '.join(conds)})" if conds else ""
        self.log("substitute_ansatz", description + suffix, out)
        return out

    def plane_residual(self, e: ExpPoly, description: str) -> ExpPoly:
        out = e.plane_residual()
        self.log("plane_residual", description, out)
        return out

    def restrict(self, e: ExpPoly, assignment: Mapping[str, object],
                 description: str) -> ExpPoly:
        out = e.restrict(assignment)
        self.log("restrict", f"{description} [{_fmt_assignment(assignment)}]", out)
        return out

    def divide_exact(self, e: ExpPoly, divisor, reason: str,
                     description: str) -> ExpPoly:
        d = P(divisor)
        try:
            q = e.exact_div(d)
        except DivisionMismatch as exc:
            self.fail(f"{description}: {exc}")
        self.log(
            "divide",
            f"{description} (divisor {_expr_text(d)} nonzero: {reason})",
            q,
        )
        return q

    def collect_basis(self, e: ExpPoly, description: str) -> dict[Monomial, ExpPoly]:
        bmap = e.coefficients_on_basis()
        pretty = {k.text(): v.text() for k, v in bmap.items()}
        self.log("collect_basis", description, json.dumps(pretty, sort_keys=True))
        return bmap

    # -- certificates ------------------------------------------------------

    def certify_nonzero(self, e: ExpPoly, side_conditions: Sequence[str] = (),
                        factors: Sequence[tuple[ExpPoly, str]] = (),
                        description: str = "") -> None:
        """Certify e != 0: either a nonzero rational, or a nonzero rational
        times declared-nonzero factors (verified by exact division)."""
        desc = description or f"certify {_expr_text(e)} != 0"
        if e.is_zero():
            self.fail(f"{desc}: expression is identically zero")
        if e.is_rational():
            self.log("nonzero", f"{desc}: nonzero rational {e.text()}")
            return
        rest = e
        used = []
        for f, reason in factors:
            try:
                rest = rest.exact_div(f)
            except DivisionMismatch:
                self.fail(f"{desc}: declared factor {_expr_text(f)} does not divide")
            used.append(f"{_expr_text(f)} != 0 ({reason})")
        if not rest.is_rational() or rest.as_rational() == 0:
            self.fail(f"{desc}: residual factor {_expr_text(rest)} is not a nonzero rational")
        self.log("nonzero", f"{desc} via {', '.join(used) or 'constant'}")

    def sos_positive(self, e: ExpPoly, description: str) -> None:
        """Certify e > 0: positive constant term plus monomials with positive
        coefficients and even parameter powers."""
        const = Fraction(0)
        for m, c in e.terms.items():
            if any(m.vpow) or m.funcs or m.atoms:
                self.fail(f"{description}: not parameter-only")
            if not m.params:
                const = c
                continue
            if c < 0 or any(p % 2 for _, p in m.params):
                self.fail(f"{description}: term {m.text()} is not a positive even power")
        if const <= 0:
            self.fail(f"{description}: constant term {const} is not positive")
        self.log("positivity", f"{description}: positive constant {const} plus even powers")

    def positive_exp_combination(self, e: ExpPoly, description: str) -> None:
        """Certify e > 0 pointwise: every term is a positive rational times
        pure exponential atoms."""
        for m, c in e.terms.items():
            if any(m.vpow) or m.funcs or m.params:
                self.fail(f"{description}: term {m.text()} is not exponential-only")
            if c <= 0 or any(a.family != "exp" for a in m.atoms):
                self.fail(f"{description}: term {m.text()} is not positive")
        self.log("positivity", f"{description}: positive combination of exponentials")

    def sos_forces_zero(self, e: ExpPoly, targets: Sequence[str],
                        description: str) -> None:
        """From e = 0 with e a sum of positive multiples of even powers,
        conclude each target parameter vanishes (it must appear alone in
        some term)."""
        alone: set[str] = set()
        for m, c in e.terms.items():
            if any(m.vpow) or m.funcs or m.atoms:
                self.fail(f"{description}: not parameter-only")
            if c < 0 or any(p % 2 for _, p in m.params):
                self.fail(f"{description}: term {m.text()} is not a positive even power")
            if len(m.params) == 1:
                alone.add(m.params[0][0])
        missing = set(targets) - alone
        if missing:
            self.fail(f"{description}: cannot isolate {sorted(missing)}")
        self.log(
            "forces_zero",
            f"{description}: {_expr_text(e)} = 0 over the reals forces "
            + ", ".join(f"{t} = 0" for t in targets),
        )

    def forced_factor_zero(self, e: ExpPoly, base: ExpPoly, power: int,
                           scale, description: str) -> None:
        """From e = 0 with e = scale * base^power (scale a nonzero rational),
        conclude base = 0."""
        expected = P(scale) * base**power
        if e != expected:
            self.fail(f"{description}: expression is not {_expr_text(expected)}")
        if P(scale).as_rational() == 0:
            self.fail(f"{description}: zero scale")
        self.log(
            "forces_zero",
            f"{description}: {_expr_text(e)} = 0 forces {_expr_text(base)} = 0",
        )

    def linear_coeffs(self, e: ExpPoly, unknowns: Sequence[str],
                      description: str) -> list[ExpPoly]:
        """Coefficients of a homogeneous linear expression in the unknowns."""
        coeffs = []
        remainder = e
        for p in unknowns:
            parts = e.collect_param(p)
            c = parts.get(1, ExpPoly.zero())
            if any(k not in (0, 1) for k in parts):
                self.fail(f"{description}: not linear in {p}")
            if c.param_names() & set(unknowns):
                self.fail(f"{description}: coefficient of {p} involves unknowns")
            coeffs.append(c)
            remainder = remainder - c * ExpPoly.param(p)
        if not remainder.is_zero():
            self.fail(f"{description}: inhomogeneous part {_expr_text(remainder)}")
        return coeffs

    def solve_2x2_determinant(self, eqs: tuple[ExpPoly, ExpPoly],
                              unknowns: tuple[str, str],
                              description: str) -> ExpPoly:
        """Determinant of a homogeneous 2x2 linear system; a nonzero
        determinant forces both unknowns to vanish."""
        a, b = self.linear_coeffs(eqs[0], unknowns, description)
        c, d = self.linear_coeffs(eqs[1], unknowns, description)
        det = a * d - b * c
        self.log("eliminate", f"{description}: determinant", det)
        return det

    # -- witnesses ----------------------------------------------------------

    def add_witness(self, kind: str, detail: str,
                    side_conditions: Sequence[str] = (),
                    basis_atom: str | None = None,
                    coefficient: str = "") -> None:
        self.report.witnesses.append(
            Witness(kind, basis_atom, coefficient, tuple(side_conditions), detail)
        )
        self.log("witness", f"{kind}: {detail}")

    def witness_nonzero_coefficient(
        self,
        bmap: dict[Monomial, ExpPoly],
        atom_label: str,
        expected,
        side_conditions: Sequence[str] = (),
        factors: Sequence[tuple[ExpPoly, str]] = (),
        display_label: str | None = None,
    ) -> None:
        """The coefficient of a basis atom is a certified-nonzero value, so
        the collected expression cannot vanish identically."""
        found = None
        for k, vv in bmap.items():
            if k.text() == atom_label:
                found = vv
                break
        if found is None:
            self.fail(f"basis atom {atom_label} absent from collection")
        if found != P(expected):
            self.fail(
                f"coefficient of {atom_label} is {_expr_text(found)}, "
                f"expected {_expr_text(P(expected))}"
            )
        self.certify_nonzero(found, side_conditions, factors,
                             f"coefficient of {atom_label}")
        self.add_witness(
            NONZERO_COEFF,
            f"linearly independent basis atom {display_label or atom_label} "
            "carries a nonvanishing coefficient",
            side_conditions,
            basis_atom=display_label or atom_label,
            coefficient=found.text(),
        )


def _fmt_assignment(assignment: Mapping[str, object]) -> str:
    parts = []
    for k, v in assignment.items():
        parts.append(f"{k}={_expr_text(P(v)) if not isinstance(v, str) else v}")
    return ", ".join(parts)


def run_script(script: CaseScript) -> CaseReport:
    run = ScriptRun(script)
    try:
        script.builder(run)
    except StepFailure as exc:
        run.report.status = "fail"
        run.report.error = str(exc)
    except Exception as exc:  # defensive: surface kernel errors in the report
        run.report.status = "fail"
        run.report.error = f"{type(exc).__name__}: {exc}"
    return run.report


def fold_w_basis(bmap: dict[Monomial, ExpPoly]) -> list[tuple[str, ExpPoly]] | None:
    """Rewrite a (u,v)-basis collection in terms of w = -(u+v) for display.

    Succeeds when every basis atom is a matched pair exp(q*u)exp(q*v)
    (or atom-free) and each polynomial part depends on u+v only.  Returns
    [(label, coefficient)] with labels like "w^2*exp(-4*w)"; None when the
    collection does not fold.
    """
    from ..expr.poly import EXP, VARS

    groups: dict[Fraction, ExpPoly] = {}
    for mono, coeff in bmap.items():
        if mono.vpow[2]:
            return None
        au, av = mono.atom_on("u"), mono.atom_on("v")
        aw = mono.atom_on("w")
        if aw is not None:
            return None
        if (au is None) != (av is None):
            return None
        if au is None:
            q = Fraction(0)
        else:
            if (
                au.family != EXP
                or av.family != EXP
                or au.freq.sym is not None
                or av.freq.sym is not None
                or au.freq.coeff != av.freq.coeff
            ):
                return None
            q = au.freq.coeff
        upow, vpow = mono.vpow[0], mono.vpow[1]
        piece = coeff * ExpPoly.var("u") ** upow * ExpPoly.var("v") ** vpow
        groups[q] = groups.get(q, ExpPoly.zero()) + piece

    out: list[tuple[str, ExpPoly]] = []
    u, v, w = ExpPoly.var("u"), ExpPoly.var("v"), ExpPoly.var("w")
    for q in sorted(groups):
        poly = groups[q]
        # restriction to v=0 gives the candidate profile in u+v
        profile = poly.subst_var("v", 0)
        rebuilt = ExpPoly.zero()
        w_form: dict[int, ExpPoly] = {}
        for k, c in profile.collect_var("u").items():
            rebuilt = rebuilt + c * (u + v) ** k
            w_form[k] = c * Fraction(-1) ** k
        if rebuilt != poly:
            return None
        for k in sorted(w_form):
            c = w_form[k]
            if c.is_zero():
                continue
            label = ""
            if k:
                label = "w" if k == 1 else f"w^{k}"
            if q != 0:
                e = f"exp({-q if q < 0 else f'-{q}'}*w)".replace("--", "")
                e = f"exp({_fmt_q(-q)}*w)"
                label = f"{label}*{e}" if label else e
            out.append((label or "1", c))
    return out


def _fmt_q(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"

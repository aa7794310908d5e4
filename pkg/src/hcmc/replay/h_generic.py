"""Replay of the generic regime H != 0, H^2 != 1.

Squaring the equation gives a degree-8 polynomial in P = e^{-w} with the
constant leading coefficient 16(1-H^2).  The replay pins the first-order
conditions, then closes the three lambda branches of the separated system
X''/X = lambda = Y''/Y.
"""

from __future__ import annotations

from ..cmc_equation import Regime, build_eq1, derived_conditions, square_and_polynomialize
from ..expr import (
    COS,
    COSH,
    ExpPoly,
    HyperbolicPair,
    Linear,
    P,
    SIN,
    SINH,
    TrigPair,
    atom,
    func,
    param,
)
from .engine import (
    FORCED_DEGENERATE,
    CaseReport,
    CaseScript,
    ScriptRun,
    fold_w_basis,
    run_script,
)

X, Y = func("X"), func("Y")
Xp, Yp = func("X", 1), func("Y", 1)
Xpp, Ypp = func("X", 2), func("Y", 2)
H = param("H")

_H_SIDE = ("H != 0", "H^2 != 1")

_EXPECTED_W_BASIS = {
    "1", "w", "w^2",
    "exp(-2*w)", "w*exp(-2*w)", "w^2*exp(-2*w)", "w^3*exp(-2*w)",
    "exp(-4*w)", "w*exp(-4*w)", "w^2*exp(-4*w)",
    "exp(-6*w)", "w*exp(-6*w)",
    "exp(-8*w)",
}


def _setup(run: ScriptRun):
    cs = square_and_polynomialize(build_eq1("H"), Regime.GENERIC)
    run.expect_equal(cs.coefficients[8], 16 * (1 - H * H),
                     "leading P^8 coefficient is 16(1-H^2)")
    conds = derived_conditions(cs)
    run.expect_equal(conds[0], Xpp * Y - X * Ypp,
                     "first-order condition of A0 factors through X''Y - XY''")
    run.expect_equal(conds[1], 6 * (H * H - 1) * (Xp - Yp) + Xpp - Ypp,
                     "first-order condition of A6")
    run.axiom("X''Y = XY'' separates: X''/X = lambda = Y''/Y")
    return cs, conds


def _lambda_zero(run: ScriptRun) -> None:
    cs, conds = _setup(run)
    ansatz0 = [Linear("X", slope="a1", intercept="a2"),
               Linear("Y", slope="b1", intercept="b2")]
    a6cond = run.substitute_ansatz(conds[1], ansatz0, "linear ansatz into the A6 condition")
    run.expect_equal(a6cond, 6 * (H * H - 1) * (P("a1") - P("b1")),
                     "condition reduces to 6(H^2-1)(a1 - b1)")
    reduced = run.divide_exact(a6cond, 6 * (H * H - 1), "H^2 != 1",
                               "divide by 6(H^2-1)")
    run.expect_equal(reduced, P("a1") - P("b1"), "slopes coincide: b1 = a1")

    residual = run.substitute_ansatz(
        cs.lhs,
        [Linear("X", slope="a1", intercept="a2"),
         Linear("Y", slope="a1", intercept="b2")],
        "common-slope ansatz into the squared equation",
    )
    flat = run.restrict(residual, {"w": "plane"}, "restrict to the plane u+v+w=0")
    bmap = run.collect_basis(flat, "collect on the independent basis")
    folded = fold_w_basis(bmap)
    if folded is None:
        run.fail("collection does not fold to functions of w")
    labels = {l for l, _ in folded}
    if labels != _EXPECTED_W_BASIS:
        run.fail(f"unexpected w-basis {sorted(labels)}")
    run.log("match", "thirteen-function w-basis matches", ", ".join(sorted(labels)))
    run.witness_nonzero_coefficient(
        bmap,
        "exp(8*u)*exp(8*v)",
        16 * (1 - H * H),
        side_conditions=_H_SIDE + ("the thirteen w-functions are linearly independent",),
        factors=((1 - H * H, "H^2 != 1"),),
        display_label="exp(-8*w)",
    )


def _top_harmonics(run: ScriptRun, cs, pair_cls, fam_top, fam_bottom):
    """Substitute the ansatz into A2, apply the plane condition at v=0, and
    return the two top-harmonic coefficients."""
    side = ("m != 0", "H != 0")
    ansatz = [pair_cls("X", rate="m", c1="a1", c2="a2", side_conditions=side),
              pair_cls("Y", rate="m", c1="b1", c2="b2", side_conditions=side)]
    a2sub = run.substitute_ansatz(cs.coefficients[2], ansatz,
                                  "ansatz into the degree-2 coefficient")
    resid = run.plane_residual(a2sub, "first-order condition of the substituted A2")
    at0 = run.restrict(resid, {"v": 0}, "evaluate at v=0")
    normalised = run.divide_exact(at0, -2, "constant", "normalise by -2")
    bmap = run.collect_basis(normalised, "Fourier collection in u")
    pick = {k.text(): v for k, v in bmap.items()}
    c3 = pick[f"{fam_top}(3*m*u)"]
    s3 = pick[f"{fam_bottom}(3*m*u)"]
    return c3, s3


def _lambda_positive(run: ScriptRun) -> None:
    cs, _ = _setup(run)
    c3, s3 = _top_harmonics(run, cs, HyperbolicPair, COSH, SINH)
    a1, a2, m = P("a1"), P("a2"), P("m")
    run.expect_equal(c3, 6 * a2 * m * H**2 * (3 * a1**2 + a2**2),
                     "cosh(3mu) coefficient is 6 a2 m H^2 (3a1^2 + a2^2)")
    run.expect_equal(s3, 6 * a1 * m * H**2 * (a1**2 + 3 * a2**2),
                     "sinh(3mu) coefficient is 6 a1 m H^2 (a1^2 + 3a2^2)")
    a_row = run.divide_exact(c3, 6 * m * H**2, "m != 0 and H != 0",
                             "strip the nonzero factor 6 m H^2")
    b_row = run.divide_exact(s3, 6 * m * H**2, "m != 0 and H != 0",
                             "strip the nonzero factor 6 m H^2")
    combo = P("a1") * b_row + P("a2") * a_row
    run.expect_equal(combo, P("a1") ** 4 + 6 * P("a1") ** 2 * P("a2") ** 2 + P("a2") ** 4,
                     "a1*(sinh row) + a2*(cosh row) is a positive even form")
    run.sos_forces_zero(combo, ("a1", "a2"),
                        "vanishing positive even form")
    run.add_witness(
        FORCED_DEGENERATE,
        "both top-harmonic coefficients vanish only at a1 = a2 = 0, which "
        "makes X identically zero: the x-factor is constant",
        side_conditions=("m != 0", "H != 0"),
    )


def _lambda_negative(run: ScriptRun) -> None:
    cs, _ = _setup(run)
    c3, s3 = _top_harmonics(run, cs, TrigPair, COS, SIN)
    a1, a2, m = P("a1"), P("a2"), P("m")
    run.expect_equal(c3, 6 * a2 * m * H**2 * (3 * a1**2 - a2**2),
                     "cos(3mu) coefficient is 6 a2 m H^2 (3a1^2 - a2^2)")
    run.expect_equal(s3, 6 * a1 * m * H**2 * (-(a1**2) + 3 * a2**2),
                     "sin(3mu) coefficient is 6 a1 m H^2 (-a1^2 + 3a2^2)")
    a_row = run.divide_exact(c3, 6 * m * H**2, "m != 0 and H != 0",
                             "strip the nonzero factor 6 m H^2")
    b_row = run.divide_exact(s3, 6 * m * H**2, "m != 0 and H != 0",
                             "strip the nonzero factor 6 m H^2")
    diff = a2 * a_row - a1 * b_row
    run.expect_equal(diff, a1**4 - a2**4, "a2*(cos row) - a1*(sin row) = a1^4 - a2^4")
    run.expect_equal(diff, (a1**2 + a2**2) * (a1**2 - a2**2),
                     "factorisation (a1^2+a2^2)(a1^2-a2^2)")
    run.log("branch", "either a1^2 + a2^2 = 0 or a1^2 = a2^2")
    # branch 1: sum of squares vanishes
    run.sos_forces_zero(a1**2 + a2**2, ("a1", "a2"), "a1^2 + a2^2 = 0")
    # branch 2: a1 = a2 or a1 = -a2; either way the cos row forces a2 = 0
    for sgn in (1, -1):
        sub = run.restrict(a_row, {"a1": sgn * a2}, f"substitute a1 = {sgn}*a2 in the cos row")
        run.forced_factor_zero(sub, a2, 3, 2, f"cos row at a1={sgn}*a2 is 2 a2^3")
    run.add_witness(
        FORCED_DEGENERATE,
        "every real solution of the two top-harmonic rows has a1 = a2 = 0, "
        "so X is identically zero: the x-factor is constant",
        side_conditions=("m != 0", "H != 0"),
    )


SCRIPTS = [
    CaseScript("hgen.lambda_zero", "generic", "H^2 not in {0,1}, lambda=0", _lambda_zero),
    CaseScript("hgen.lambda_positive", "generic", "H^2 not in {0,1}, lambda=m^2>0", _lambda_positive),
    CaseScript("hgen.lambda_negative", "generic", "H^2 not in {0,1}, lambda=-m^2<0", _lambda_negative),
]


def replay_generic() -> list[CaseReport]:
    """Run every generic-H branch."""
    return [run_script(s) for s in SCRIPTS]

"""Replay of the minimal regime H = 0.

The polynomial form of the equation is A0 + A2 P^2 - 4 P^4 = 0 with
P = e^{-w}.  Constancy of the leading coefficient makes A0 and A2
functions of w alone, whose first-order conditions separate X and Y into
X''/X = lambda = Y''/Y.  Each sign of lambda is replayed to an exact
contradiction witness.
"""

from __future__ import annotations

from ..cmc_equation import Regime, build_eq1, derived_conditions, square_and_polynomialize
from ..expr import ExpPoly, HyperbolicPair, Linear, P, TrigPair, func, param
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


def _coefficient_set(run: ScriptRun):
    cs = square_and_polynomialize(build_eq1(0), Regime.H_ZERO)
    run.expect_equal(cs.coefficients[4], ExpPoly.rational(-4),
                     "leading P^4 coefficient is the constant -4")
    conds = derived_conditions(cs)
    run.expect_equal(conds[0], Xpp * Y - X * Ypp,
                     "first-order condition of A0: X''Y - XY'' = 0")
    run.expect_equal(conds[1], Xpp - 6 * Xp - Ypp + 6 * Yp,
                     "first-order condition of A2: X''-6X' = Y''-6Y'")
    run.axiom("X''Y = XY'' with u, v independent separates: X''/X = lambda = Y''/Y")
    return cs


def _lambda_zero(run: ScriptRun) -> None:
    cs = _coefficient_set(run)
    h32 = Xpp - 6 * Xp - Ypp + 6 * Yp
    slopes = run.substitute_ansatz(
        h32,
        [Linear("X", slope="m1", intercept="a1"),
         Linear("Y", slope="m2", intercept="b1")],
        "linear X, Y into the A2 condition",
    )
    run.expect_equal(slopes, -6 * P("m1") + 6 * P("m2"),
                     "condition reduces to 6(m2 - m1) = 0")
    run.log("forces", "slopes coincide: both X and Y have slope m")

    residual = run.substitute_ansatz(
        cs.lhs,
        [Linear("X", slope="m", intercept="a1"),
         Linear("Y", slope="m", intercept="b1")],
        "common-slope linear ansatz into the full equation",
    )
    flat = run.restrict(residual, {"w": "plane"}, "restrict to the plane u+v+w=0")
    bmap = run.collect_basis(flat, "collect on the independent basis")
    folded = fold_w_basis(bmap)
    if folded is None:
        run.fail("basis collection does not fold to functions of w")
    run.expect_equal(
        ExpPoly.rational(1) if set(l for l, _ in folded) ==
        {"1", "w", "exp(-2*w)", "w*exp(-2*w)", "exp(-4*w)"} else ExpPoly.zero(),
        ExpPoly.rational(1),
        "w-basis is exactly {1, w, e^-2w, w e^-2w, e^-4w}",
    )
    run.witness_nonzero_coefficient(
        bmap,
        "exp(4*u)*exp(4*v)",
        -4,
        side_conditions=("functions {1, w, w e^-2w, e^-2w, e^-4w} are linearly independent",),
        display_label="exp(-4*w)",
    )


def _hyperbolic(run: ScriptRun) -> None:
    cs = _coefficient_set(run)
    h32 = Xpp - 6 * Xp - Ypp + 6 * Yp
    ansatz = [
        HyperbolicPair("X", rate="m", c1="a1", c2="a2",
                       side_conditions=("m != 0 (lambda = m^2 > 0)",)),
        HyperbolicPair("Y", rate="m", c1="b1", c2="b2",
                       side_conditions=("m != 0 (lambda = m^2 > 0)",)),
    ]
    r = run.substitute_ansatz(h32, ansatz, "hyperbolic ansatz into the A2 condition")
    display = run.divide_exact(r, P("m"), "m != 0", "normalise by m")
    from ..expr import COSH, SINH, atom
    sh_u, ch_u = atom(SINH, "u", "m"), atom(COSH, "u", "m")
    sh_v, ch_v = atom(SINH, "v", "m"), atom(COSH, "v", "m")
    expected = (
        (P("a2") * P("m") - 6 * P("a1")) * sh_u
        + (P("a1") * P("m") - 6 * P("a2")) * ch_u
        + (6 * P("b1") - P("b2") * P("m")) * sh_v
        + (6 * P("b2") - P("b1") * P("m")) * ch_v
    )
    run.expect_equal(display, expected, "matches the four-term sinh/cosh display")

    bmap = run.collect_basis(display, "coefficients on {sinh,cosh}(mu),(mv)")
    pick = {k.text(): v for k, v in bmap.items()}
    eq_a = (pick["sinh(m*u)"], pick["cosh(m*u)"])
    eq_b = (pick["sinh(m*v)"], pick["cosh(m*v)"])
    det_a = run.solve_2x2_determinant(eq_a, ("a1", "a2"), "system for (a1, a2)")
    det_b = run.solve_2x2_determinant(eq_b, ("b1", "b2"), "system for (b1, b2)")
    run.expect_equal(det_a, 36 - P("m") ** 2, "determinant is 36 - m^2")
    run.expect_equal(det_b, 36 - P("m") ** 2, "determinant is 36 - m^2")

    # branch: nonzero determinant kills all four coefficients
    run.log("branch", "if m^2 != 36 both systems are nonsingular")
    run.add_witness(
        FORCED_DEGENERATE,
        "m^2 != 36 forces a1=a2=b1=b2=0, so X = Y = 0: both factors of the "
        "surface are constant, contradicting non-constancy",
        side_conditions=("m != 0", "m^2 != 36 in this branch"),
    )

    # branch: determinant zero, m = 6 or m = -6
    run.log("branch", "if m^2 = 36 then m = 6 or m = -6 (real roots of m^2-36)")
    for mval, rel in ((6, 1), (-6, -1)):
        # from the sinh(mu) row: a2 m = 6 a1 -> a2 = rel * a1; same for b
        sub = {
            "m": mval,
            "a2": rel * P("a1"),
            "b2": rel * P("b1"),
        }
        check_a = run.restrict(eq_a[0], sub, f"solve (a1,a2) system at m={mval}")
        run.expect_zero(check_a, f"sinh(mu) row vanishes at m={mval}, a2={rel}*a1")
        residual = run.substitute_ansatz(
            cs.lhs,
            [HyperbolicPair("X", rate=mval, c1="a1", c2=rel * P("a1")),
             HyperbolicPair("Y", rate=mval, c1="b1", c2=rel * P("b1"))],
            f"solved ansatz at m={mval} into the full equation",
        )
        flat = run.restrict(residual, {"w": "plane"}, "restrict to the plane")
        bmap2 = run.collect_basis(flat, "collect on the independent basis")
        run.expect_equal(
            ExpPoly.rational(len(bmap2)), ExpPoly.rational(2),
            "exactly the e^{-6w} and e^{-4w} atoms survive",
        )
        run.witness_nonzero_coefficient(
            bmap2,
            "exp(4*u)*exp(4*v)",
            -4,
            side_conditions=("e^{-6w} and e^{-4w} are linearly independent",),
            display_label="exp(-4*w)",
        )
        t = {k.text(): v for k, v in bmap2.items()}
        run.expect_equal(t["exp(6*u)*exp(6*v)"], 12 * P("a1") * P("b1"),
                         "e^{-6w} coefficient is 12 a1 b1")


def _trigonometric(run: ScriptRun) -> None:
    _coefficient_set(run)
    h32 = Xpp - 6 * Xp - Ypp + 6 * Yp
    ansatz = [
        TrigPair("X", rate="m", c1="a1", c2="a2",
                 side_conditions=("m != 0 (lambda = -m^2 < 0)",)),
        TrigPair("Y", rate="m", c1="b1", c2="b2",
                 side_conditions=("m != 0 (lambda = -m^2 < 0)",)),
    ]
    r = run.substitute_ansatz(h32, ansatz, "trigonometric ansatz into the A2 condition")
    display = run.divide_exact(r, P("m"), "m != 0", "normalise by m")
    from ..expr import COS, SIN, atom
    si_u, co_u = atom(SIN, "u", "m"), atom(COS, "u", "m")
    si_v, co_v = atom(SIN, "v", "m"), atom(COS, "v", "m")
    expected = (
        (-P("a2") * P("m") + 6 * P("a1")) * si_u
        - (P("a1") * P("m") + 6 * P("a2")) * co_u
        + (-6 * P("b1") + P("b2") * P("m")) * si_v
        + (6 * P("b2") + P("b1") * P("m")) * co_v
    )
    run.expect_equal(display, expected, "matches the four-term sin/cos display")

    bmap = run.collect_basis(display, "coefficients on {sin,cos}(mu),(mv)")
    pick = {k.text(): v for k, v in bmap.items()}
    det_a = run.solve_2x2_determinant(
        (pick["sin(m*u)"], pick["cos(m*u)"]), ("a1", "a2"), "system for (a1, a2)")
    det_b = run.solve_2x2_determinant(
        (pick["sin(m*v)"], pick["cos(m*v)"]), ("b1", "b2"), "system for (b1, b2)")
    for det in (det_a, det_b):
        run.expect_equal(det, -36 - P("m") ** 2, "determinant is -(36 + m^2)")
        run.sos_positive(-det, "36 + m^2 is positive for every real m")
    run.add_witness(
        FORCED_DEGENERATE,
        "both 2x2 systems are nonsingular for every real m, so all a_i and "
        "b_i vanish and X = Y = 0, contradicting non-constancy",
        side_conditions=("m != 0",),
    )


SCRIPTS = [
    CaseScript("h0.lambda_zero", "H0", "H=0, lambda=0", _lambda_zero),
    CaseScript("h0.lambda_positive", "H0", "H=0, lambda=m^2>0", _hyperbolic),
    CaseScript("h0.lambda_negative", "H0", "H=0, lambda=-m^2<0", _trigonometric),
]


def replay_minimal() -> list[CaseReport]:
    """Run every H=0 branch."""
    return [run_script(s) for s in SCRIPTS]

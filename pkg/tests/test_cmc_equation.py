"""Coefficient sets of the squared equation against the reference displays."""

import random

import pytest

from hcmc.cmc_equation import (
    Regime,
    RegimeMismatch,
    build_eq1,
    build_equation,
    derivation_report,
    derived_a4_generic,
    derived_conditions,
    reference_displays,
    square_and_polynomialize,
)
from hcmc.expr import EXP, ExpPoly, P, atom, func, param
from hcmc.geometry import eq1_residual

X, Y = func("X"), func("Y")
Xp, Yp = func("X", 1), func("Y", 1)
Xpp, Ypp = func("X", 2), func("Y", 2)
H = param("H")


def test_h0_coefficients_match_displays():
    cs = square_and_polynomialize(build_eq1(0), Regime.H_ZERO)
    refs = reference_displays(Regime.H_ZERO)
    assert cs.coefficients[0] == refs[0]
    assert cs.coefficients[2] == refs[2]
    assert cs.coefficients[4] == ExpPoly.rational(-4)


def test_generic_coefficients_match_displays():
    cs = square_and_polynomialize(build_eq1("H"), Regime.GENERIC)
    refs = reference_displays(Regime.GENERIC)
    for k in (0, 2, 6, 8):
        assert cs.coefficients[k] == refs[k]
    # the degree-4 reference display is ill-formed; the derived value rules
    assert cs.coefficients[4] == derived_a4_generic()


def test_unit_coefficients_match_displays():
    cs = square_and_polynomialize(build_eq1(1), Regime.UNIT)
    refs = reference_displays(Regime.UNIT)
    for k in (0, 2, 4, 6):
        assert cs.coefficients[k] == refs[k]


def test_reassembly_is_exact():
    for regime in Regime:
        eq = build_equation(regime)
        cs = eq.coefficient_set()
        assert cs.lhs == eq.lhs


def test_cross_regime_generic_a0_is_h0_a0_squared():
    h0 = square_and_polynomialize(build_eq1(0), Regime.H_ZERO)
    gen = square_and_polynomialize(build_eq1("H"), Regime.GENERIC)
    assert gen.coefficients[0] == h0.coefficients[0] ** 2


def test_unit_is_minus_generic_at_unit_h():
    gen = square_and_polynomialize(build_eq1("H"), Regime.GENERIC)
    unit = square_and_polynomialize(build_eq1(1), Regime.UNIT)
    for k in (0, 2, 4, 6):
        at_one = gen.coefficients[k].restrict({"H": 1})
        assert unit.coefficients[k] == -at_one
    assert gen.coefficients[8].restrict({"H": 1}).is_zero()


def test_radical_marker():
    eq = build_eq1("H")
    squared_rhs = eq.radical_coeff**2 * eq.radicand**3
    expected = 16 * H**2 * atom(EXP, "w", -2) * (X + Y + atom(EXP, "w", -2)) ** 3
    assert squared_rhs == expected
    assert not build_eq1(0).has_radical()


def test_horosphere_data_reduces_to_unit_h():
    eq = build_eq1("H")
    sub = eq.subst_funcs(ExpPoly.zero(), ExpPoly.zero(), ExpPoly.zero(), ExpPoly.zero())
    # radicand is e^{-2w}, an exact square; resolve and compare sides
    resolved = sub.resolve_radical(atom(EXP, "w", -1))
    assert resolved == -4 * atom(EXP, "w", -4) + 4 * H * atom(EXP, "w", -4)
    # consistency exactly at H = 1
    assert resolved.restrict({"H": 1}).is_zero()


def test_regime_mismatch_errors():
    with pytest.raises(RegimeMismatch):
        square_and_polynomialize(build_eq1("H"), Regime.H_ZERO)
    with pytest.raises(RegimeMismatch):
        square_and_polynomialize(build_eq1(0), Regime.GENERIC)
    with pytest.raises(RegimeMismatch):
        square_and_polynomialize(build_eq1(2), Regime.UNIT)


def test_derived_conditions_h0_and_generic():
    h0 = square_and_polynomialize(build_eq1(0), Regime.H_ZERO)
    c1, c2 = derived_conditions(h0)
    assert c1 == Xpp * Y - X * Ypp
    assert c2 == Xpp - 6 * Xp - Ypp + 6 * Yp
    gen = square_and_polynomialize(build_eq1("H"), Regime.GENERIC)
    g1, g2 = derived_conditions(gen)
    assert g1 == Xpp * Y - X * Ypp
    assert g2 == 6 * (H * H - 1) * (Xp - Yp) + Xpp - Ypp


def test_derived_conditions_unit_requires_claim():
    unit = square_and_polynomialize(build_eq1(1), Regime.UNIT)
    with pytest.raises(Exception):
        derived_conditions(unit)
    (cond,) = derived_conditions(unit, assume_sum_derivatives_nonzero=True)
    bracket = Ypp * (Xp * (Y - 2 * X) - X * Yp) + Xpp * (Y * Xp - Yp * (X - 2 * Y))
    assert cond == (Y * Xp + X * Yp) * bracket


def test_numeric_cross_check_100_samples():
    gen = build_equation(Regime.GENERIC)
    rng = random.Random(11)
    for _ in range(100):
        env = {"u": 0.0, "v": 0.0, "w": rng.uniform(-0.7, 0.7),
               "H": rng.uniform(-2.0, 2.0)}
        funcs = {("X", k): rng.uniform(0.05, 2.0) for k in range(3)}
        funcs.update({("Y", k): rng.uniform(0.05, 2.0) for k in range(3)})
        sym = gen.lhs.eval_num(env, funcs)
        res_at_h = eq1_residual(funcs[("X", 0)], funcs[("Y", 0)],
                                funcs[("X", 1)], funcs[("Y", 1)],
                                env["w"], env["H"])
        res_at_minus_h = eq1_residual(funcs[("X", 0)], funcs[("Y", 0)],
                                      funcs[("X", 1)], funcs[("Y", 1)],
                                      env["w"], -env["H"])
        # lhs^2 - rhs^2 = (lhs - rhs)(lhs + rhs)
        direct = res_at_h * res_at_minus_h
        scale = max(1.0, abs(direct), abs(sym))
        assert abs(sym - direct) <= 1e-9 * scale


def test_derivation_report_structure():
    rep = derivation_report()
    assert rep["version"] == 1
    assert set(rep["regimes"]) == {"H0", "generic", "unit"}
    gen = rep["regimes"]["generic"]["coefficients"]
    assert gen["4"]["status"] == "derived"
    assert gen["4"]["reference"] is None
    for k in ("0", "2", "6", "8"):
        assert gen[k]["status"] == "matched"
    assert all(e["status"] == "matched"
               for e in rep["regimes"]["unit"]["coefficients"].values())

"""Kernel operations against hand-checked expected values."""

from fractions import Fraction

import pytest

from hcmc.expr import (
    COS,
    COSH,
    EXP,
    SIN,
    SINH,
    ExpLinear,
    ExpPoly,
    Freq,
    HyperbolicPair,
    Linear,
    MaxDerivOrderExceeded,
    MixedWDependence,
    P,
    PureExp,
    UncoveredSymbol,
    atom,
    func,
    param,
    substitute_ansatz,
    var,
)

X, Y = func("X"), func("Y")
Xp, Yp = func("X", 1), func("Y", 1)
Xpp, Ypp = func("X", 2), func("Y", 2)
u, v, w = var("u"), var("v"), var("w")
P2 = atom(EXP, "w", -2)


def test_ring_identity():
    assert (X + Y) * (X - Y) == X**2 - Y**2


def test_cosh_square_product_to_sum():
    prod = atom(COSH, "u", "m") * atom(COSH, "u", "m")
    expected = ExpPoly.rational(Fraction(1, 2)) + Fraction(1, 2) * atom(COSH, "u", Freq(2, "m"))
    assert prod == expected


def test_fourth_summand_of_the_equation():
    lhs = (X + Y + P2) * (4 * P2)
    assert lhs == 4 * X * P2 + 4 * Y * P2 + 4 * atom(EXP, "w", -4)


def test_differentiate_product_rule():
    assert (X * Y).diff("u") == Xp * Y
    inner = Xp * Y + X * Yp
    assert inner.diff("u") == Xpp * Y + Xp * Yp


def test_differentiate_w_atom():
    assert P2.diff("w") == -2 * P2


def test_max_derivative_order():
    e = func("X", 4)
    with pytest.raises(MaxDerivOrderExceeded):
        e.diff("u")


def test_plane_residual_displays():
    a0 = Xp * Y + X * Yp
    assert a0.plane_residual() == Xpp * Y - X * Ypp
    a2 = -6 * (X + Y) + Xp + Yp
    assert a2.plane_residual() == Xpp - 6 * Xp - Ypp + 6 * Yp
    assert ExpPoly.rational(7).plane_residual().is_zero()


def test_collect_in_P():
    eq = (Y + P2) * Xp + (X + P2) * Yp - 2 * (X + Y) * P2 - 4 * P2 * (X + Y + P2)
    coeffs = eq.collect_in_P()
    assert coeffs[0] == Xp * Y + X * Yp
    assert coeffs[2] == Xp + Yp - 6 * (X + Y)
    assert coeffs[4] == ExpPoly.rational(-4)
    # P-free input comes back at degree zero
    assert (X * Y).collect_in_P() == {0: X * Y}


def test_collect_in_P_rejects_w_powers():
    with pytest.raises(MixedWDependence):
        (w * P2).collect_in_P()


def test_restrict_variable_and_plane():
    assert atom(COSH, "v", "m").subst_var("v", 0) == ExpPoly.one()
    e = atom(EXP, "u", "a") * atom(EXP, "v", Freq(-1, "a"))
    assert e.subst_var("v", 0) == atom(EXP, "u", "a")
    # plane elimination rewrites both powers and atoms of w
    flat = (w * P2).eliminate_w()
    assert flat == -(u + v) * atom(EXP, "u", 2) * atom(EXP, "v", 2)


def test_restrict_commutes_on_disjoint_assignments():
    e = (X + atom(COSH, "v", "m")) * (u + 1) * P2
    one = e.restrict({"v": 0}).restrict({"u": 2})
    two = e.restrict({"u": 2}).restrict({"v": 0})
    assert one == two


def test_substitute_linear_ansatz_into_minimal_equation():
    eq = (Y + P2) * Xp + (X + P2) * Yp - 2 * (X + Y) * P2 - 4 * P2 * (X + Y + P2)
    out = substitute_ansatz(eq, [Linear("X", slope="m", intercept="a1"),
                                 Linear("Y", slope="m", intercept="b1")])
    m, a1, b1 = P("m"), P("a1"), P("b1")
    # displayed residual with w eliminated through w = -(u+v)
    e2 = atom(EXP, "u", 2) * atom(EXP, "v", 2)
    e4 = atom(EXP, "u", 4) * atom(EXP, "v", 4)
    # in the display -2(3(a1+b1) - m - 3 m w), the substitution w = -(u+v)
    # turns -3 m w into +3 m (u+v)
    expected = (m * (a1 + b1 + m * (u + v))
                - 2 * (3 * (a1 + b1) - m + 3 * m * (u + v)) * e2 - 4 * e4)
    assert out.eliminate_w() == expected


def test_substitute_pure_exp_second_derivative():
    e = substitute_ansatz(Xpp, [PureExp("X", coeff=1, rate=Freq.of("a"))])
    assert e == P("a") ** 2 * atom(EXP, "u", "a")


def test_substitute_hyperbolic_into_slope_condition():
    cond = Xpp - 6 * Xp - Ypp + 6 * Yp
    out = substitute_ansatz(cond, [
        HyperbolicPair("X", rate="m", c1="a1", c2="a2"),
        HyperbolicPair("Y", rate="m", c1="b1", c2="b2"),
    ])
    m, a1, a2, b1, b2 = (P(s) for s in ("m", "a1", "a2", "b1", "b2"))
    display = (
        (a2 * m - 6 * a1) * atom(SINH, "u", "m")
        + (a1 * m - 6 * a2) * atom(COSH, "u", "m")
        + (6 * b1 - b2 * m) * atom(SINH, "v", "m")
        + (6 * b2 - b1 * m) * atom(COSH, "v", "m")
    )
    assert out == P("m") * display


def test_uncovered_symbol():
    with pytest.raises(UncoveredSymbol):
        substitute_ansatz(X + Y, [Linear("X", slope=1, intercept=0)])


def test_coefficients_on_basis():
    e2 = atom(EXP, "u", 2) * atom(EXP, "v", 2)
    e4 = atom(EXP, "u", 4) * atom(EXP, "v", 4)
    e = 12 * P("a1") * P("b1") * atom(EXP, "u", 6) * atom(EXP, "v", 6) - 4 * e4
    bmap = e.coefficients_on_basis()
    by_text = {k.text(): val for k, val in bmap.items()}
    assert by_text["exp(4*u)*exp(4*v)"] == ExpPoly.rational(-4)
    assert by_text["exp(6*u)*exp(6*v)"] == 12 * P("a1") * P("b1")
    assert ExpPoly.zero().coefficients_on_basis() == {}
    # reassembly is exact
    total = ExpPoly.zero()
    for k, val in bmap.items():
        total = total + val * ExpPoly({k: Fraction(1)})
    assert total == e


def test_is_identically_zero():
    assert ((X + Y) - (Y + X)).is_zero()
    assert not (Xpp * Y - X * Ypp).is_zero()


def test_exp_linear_ansatz_derivatives():
    a = ExpLinear("X", amp="a3", rate="a2", lin="a1", const="a4")
    a2, a3 = P("a2"), P("a3")
    e = atom(EXP, "u", "a2")
    assert a.deriv(1) == a3 * a2 * e - P("a1") * a2.inverse()
    assert a.deriv(2) == a3 * a2**2 * e


def test_mixed_exp_and_hyperbolic_uniformize():
    e = atom(COSH, "u", 6) + atom(EXP, "u", 2)
    # the canonical form rewrites cosh through exponentials on u
    families = {a.family for m in e.terms for a in m.atoms}
    assert families == {EXP}
    half = ExpPoly.rational(Fraction(1, 2))
    assert e == half * atom(EXP, "u", 6) + half * atom(EXP, "u", -6) + atom(EXP, "u", 2)


def test_trig_product_to_sum():
    s = atom(SIN, "u", "m")
    c = atom(COS, "u", "m")
    two = Freq(2, "m")
    assert s * s == Fraction(1, 2) * ExpPoly.one() - Fraction(1, 2) * atom(COS, "u", two)
    assert s * c == Fraction(1, 2) * atom(SIN, "u", two)
    assert c * c == Fraction(1, 2) * ExpPoly.one() + Fraction(1, 2) * atom(COS, "u", two)


def test_deterministic_text_form():
    e = 12 * P("a1") * P("b1") * atom(EXP, "u", 6) - 4 * atom(EXP, "u", 4) + u * v
    assert e.text() == "-4*exp(4*u) + u*v + 12*a1*b1*exp(6*u)"

"""Numeric mean-curvature oracle tests."""

import numpy as np
import pytest

from hcmc.cmc_equation import Regime, build_equation
from hcmc.geometry import (
    Curve,
    DegenerateGradient,
    DomainViolation,
    GeneralGraph,
    HomotheticalGraph,
    JetSample,
    NegativeRadicand,
    NonPositiveHeight,
    constant_curve,
    curve_from_callables,
    eq1_residual,
    grid_validate,
    mean_curvature_graph,
    mean_curvature_implicit,
)


def sphere_sample(x, y, z):
    return JetSample((x, y, z), 2 * np.array([x, y, z]), 2 * np.eye(3))


def test_vertical_plane_is_minimal():
    s = JetSample((0.3, -0.2, 1.1), np.array([1.0, 0.0, 0.0]), np.zeros((3, 3)))
    assert mean_curvature_implicit(s) == 0.0


def test_unit_hemisphere_is_minimal():
    rng = np.random.default_rng(5)
    for _ in range(100):
        phi = rng.uniform(0, 2 * np.pi)
        theta = rng.uniform(0.05, np.pi / 2 - 0.05)
        x = np.cos(phi) * np.sin(theta)
        y = np.sin(phi) * np.sin(theta)
        z = np.cos(theta)
        assert abs(mean_curvature_implicit(sphere_sample(x, y, z))) <= 1e-10


def test_horosphere_unit_curvature():
    spec = HomotheticalGraph(constant_curve(1.0), constant_curve(3.7))
    r = grid_validate(spec, 1.0, 50, 50)
    assert r.max_abs_deviation <= 1e-12
    z = 2.2
    s = JetSample((0.0, 0.0, z), np.array([0.0, 0.0, 1 / z]),
                  np.diag([0.0, 0.0, -1 / z**2]))
    assert abs(mean_curvature_implicit(s) - 1.0) <= 1e-15


def test_degenerate_gradient_raises():
    s = JetSample((0, 0, 1), np.zeros(3), np.eye(3))
    with pytest.raises(DegenerateGradient):
        mean_curvature_implicit(s)


def test_graph_checks_domain_and_height():
    spec = HomotheticalGraph(constant_curve(1.0), constant_curve(1.0),
                             (-1, 1), (-1, 1))
    with pytest.raises(DomainViolation):
        mean_curvature_graph(spec, 2.0, 0.0)
    bad = HomotheticalGraph(
        curve_from_callables(lambda x: x, lambda x: np.ones_like(x),
                             lambda x: np.zeros_like(x)),
        constant_curve(1.0), (-1, 1), (-1, 1))
    with pytest.raises(NonPositiveHeight):
        mean_curvature_graph(bad, -0.5, 0.0)


def test_exp_graph_matches_implied_h():
    phi = curve_from_callables(np.exp, np.exp, np.exp)
    spec = HomotheticalGraph(phi, constant_curve(1.0))
    got = mean_curvature_graph(spec, 0.0, 0.0)
    assert abs(got - 5 / (4 * np.sqrt(2))) <= 1e-14


def test_general_graph_agrees_with_homothetical():
    a, b = 0.3, 0.2
    phi = curve_from_callables(lambda x: 1 + a * x * x, lambda x: 2 * a * x,
                               lambda x: 2 * a * np.ones_like(x))
    psi = curve_from_callables(lambda y: 1 + b * y * y, lambda y: 2 * b * y,
                               lambda y: 2 * b * np.ones_like(y))
    homо = HomotheticalGraph(phi, psi)

    def jet(x, y):
        f = (1 + a * x * x) * (1 + b * y * y)
        fx = 2 * a * x * (1 + b * y * y)
        fy = 2 * b * y * (1 + a * x * x)
        fxx = 2 * a * (1 + b * y * y)
        fxy = 4 * a * b * x * y
        fyy = 2 * b * (1 + a * x * x)
        return f, fx, fy, fxx, fxy, fyy

    gen = GeneralGraph(jet)
    xs = np.linspace(-0.9, 0.9, 7)
    for x in xs:
        for y in xs:
            h1 = mean_curvature_graph(homо, x, y)
            h2 = mean_curvature_graph(gen, x, y)
            assert abs(h1 - h2) <= 1e-12


def test_eq1_residual_values():
    assert eq1_residual(0, 0, 0, 0, 0.4, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert eq1_residual(0, 0, 0, 0, 0.0, 0.0) == -4.0
    with pytest.raises(NegativeRadicand):
        eq1_residual(-1.0, -1.0, 0, 0, 5.0, 1.0)


def test_symbolic_numeric_agreement_1000_samples():
    eq = build_equation(Regime.GENERIC)
    rng = np.random.default_rng(123)
    for _ in range(1000):
        X, Y = rng.uniform(0.05, 2.0, 2)
        Xp, Yp = rng.uniform(-2.0, 2.0, 2)
        w = rng.uniform(-0.7, 0.7)
        H = rng.uniform(-2.0, 2.0)
        sym = eq.lhs.eval_num({"u": 0.0, "v": 0.0, "w": w, "H": H},
                              {("X", 0): X, ("X", 1): Xp,
                               ("Y", 0): Y, ("Y", 1): Yp})
        direct = eq1_residual(X, Y, Xp, Yp, w, H) * eq1_residual(X, Y, Xp, Yp, w, -H)
        scale = max(1.0, abs(direct))
        assert abs(sym - direct) <= 1e-10 * scale


def test_translation_invariance():
    a = 0.4
    phi = curve_from_callables(lambda x: 1 + a * x * x, lambda x: 2 * a * x,
                               lambda x: 2 * a * np.ones_like(x))
    spec = HomotheticalGraph(phi, constant_curve(2.0), (-1, 1), (-1, 1))
    c = 0.37
    shifted_phi = curve_from_callables(
        lambda x: 1 + a * (x - c) ** 2, lambda x: 2 * a * (x - c),
        lambda x: 2 * a * np.ones_like(x))
    shifted = HomotheticalGraph(shifted_phi, constant_curve(2.0),
                                (-1 + c, 1 + c), (-1, 1))
    xs = np.linspace(-0.9, 0.9, 11)
    for x in xs:
        h0 = mean_curvature_graph(spec, x, 0.1)
        h1 = mean_curvature_graph(shifted, x + c, 0.1)
        assert h0 == pytest.approx(h1, abs=1e-15)


def test_scaling_invariance():
    a, c = 0.4, 2.5
    phi = curve_from_callables(lambda x: 1 + a * x * x, lambda x: 2 * a * x,
                               lambda x: 2 * a * np.ones_like(x))
    psi = curve_from_callables(lambda y: 1 + 0.2 * y, lambda y: 0.2 * np.ones_like(y),
                               lambda y: np.zeros_like(y))
    base = HomotheticalGraph(phi, psi, (-1, 1), (-1, 1))
    # the homothety (x,y,z) -> (cx,cy,cz) sends z = phi psi to
    # z = [c phi(x/c)] [psi(y/c)]: the scale goes with one factor
    phi_c = curve_from_callables(lambda x: c * (1 + a * (x / c) ** 2),
                                 lambda x: 2 * a * (x / c),
                                 lambda x: (2 * a / c) * np.ones_like(x))
    psi_c = curve_from_callables(lambda y: 1 + 0.2 * (y / c),
                                 lambda y: (0.2 / c) * np.ones_like(y),
                                 lambda y: np.zeros_like(y))
    scaled = HomotheticalGraph(phi_c, psi_c, (-c, c), (-c, c))
    r0 = grid_validate(base, 0.0, 21, 21)
    r1 = grid_validate(scaled, 0.0, 21, 21)
    assert abs(r0.max_abs_deviation - r1.max_abs_deviation) <= 1e-10


def test_parabola_product_is_not_cmc():
    phi = curve_from_callables(lambda x: 1 + x * x, lambda x: 2 * x,
                               lambda x: 2 * np.ones_like(x))
    psi = curve_from_callables(lambda y: 1 + y * y, lambda y: 2 * y,
                               lambda y: 2 * np.ones_like(y))
    spec = HomotheticalGraph(phi, psi)
    rep = grid_validate(spec, 1.0, 30, 30)
    # the deviation is reported, and it is genuinely bounded away from zero
    assert rep.max_abs_deviation > 1e-2


def test_jets_match_finite_differences():
    phi = curve_from_callables(np.exp, np.exp, np.exp)
    fd = curve_from_callables(np.exp)  # derivatives by central differences
    xs = np.linspace(-0.8, 0.8, 9)
    v1, d1, s1 = phi(xs)
    v2, d2, s2 = fd(xs)
    assert np.allclose(d1, d2, rtol=1e-6)
    assert np.allclose(s1, s2, rtol=1e-5)

"""Falsification harness: exact-solution recovery and residual floors."""

import numpy as np
import pytest
from numpy.polynomial import chebyshev as cheb

from hcmc.falsify import (
    FamilyParams,
    SearchConfig,
    SearchReport,
    chebyshev_curve,
    enforce_margin,
    objective,
    optimize_search,
    sweep_delta,
)
from hcmc.profiles import integrate_profile


def test_horosphere_objective_is_zero():
    p = FamilyParams((0.0,) * 7, (0.0,) * 7)
    assert objective(p, 1.0) <= 1e-12


def test_symmetric_nonparabolic_seed_is_positive():
    c = [0.0, 0.0, 0.15]  # 0.3 x^2 = 0.15 (T0 + T2) without the constant
    p = FamilyParams((0.15, 0.0, 0.15, 0.0), (0.15, 0.0, 0.15, 0.0))
    assert objective(p, 1.0) > 1e-3


def test_profile_fit_objective_small():
    # rescale an H = -1/2 profile (a homothety keeps H) so its window covers
    # [-1, 1], then fit log(phi) by a degree-8 series; the mean-curvature
    # evaluation amplifies the fit error through two derivatives, so a
    # comfortably flat scaling keeps the residual below 1e-4
    c = 8.0
    prof = integrate_profile(-0.5, 1.0, 0.0, (-0.3, 0.3), 1e-11)
    xs = np.linspace(-1.0, 1.0, 257)
    phi_scaled = c * prof._dense(xs / c)[0]
    coeffs = cheb.chebfit(xs, np.log(phi_scaled), 8)
    params = FamilyParams(tuple(coeffs), (0.0,) * 9)
    assert objective(params, -0.5, grid=(24, 24)) <= 1e-4


def test_margin_projection():
    vec = np.zeros(14)
    out = enforce_margin(vec, 6, 0.25)
    grid = np.linspace(-1, 1, 513)
    for k in range(2):
        c = out[k * 7:(k + 1) * 7]
        slope = cheb.chebval(grid, cheb.chebder(c))
        assert np.max(np.abs(slope)) >= 0.25 - 1e-12
    # an already-feasible vector is untouched
    vec2 = np.zeros(14)
    vec2[1] = vec2[8] = 0.5
    assert np.allclose(enforce_margin(vec2, 6, 0.25), vec2)
    # zero margin only clips
    assert np.allclose(enforce_margin(vec2, 6, 0.0), vec2)


def test_gradient_direction_consistency():
    rng = np.random.default_rng(2)
    h_target, degree = 0.5, 4
    n = 2 * (degree + 1)
    for _ in range(20):
        vec = rng.normal(scale=0.2, size=n)
        direction = rng.normal(size=n)
        direction /= np.linalg.norm(direction)
        step = 1e-6

        def f(v):
            return objective(FamilyParams.from_vector(v, degree), h_target)

        grad = np.array([
            (f(vec + step * e) - f(vec - step * e)) / (2 * step)
            for e in np.eye(n)
        ])
        directional = (f(vec + step * direction) - f(vec - step * direction)) / (2 * step)
        assert abs(grad @ direction - directional) <= 1e-4 * max(1.0, abs(directional))


def test_optimizer_recovers_horosphere():
    r = optimize_search(SearchConfig(1.0, budget=4000, seed=1, restarts=2))
    assert r.best_residual <= 1e-8


def test_optimizer_determinism_and_trace():
    cfg = SearchConfig(1.0, budget=2500, seed=9, restarts=2)
    a = optimize_search(cfg)
    b = optimize_search(cfg)
    assert a.to_dict() == b.to_dict()
    best_values = [v for _, v in a.trace]
    assert best_values == sorted(best_values, reverse=True)


def test_sweep_requires_sorted_deltas():
    cfg = SearchConfig(0.0, budget=500, restarts=1)
    with pytest.raises(ValueError):
        sweep_delta(cfg, [0.2, 0.1])


def test_sweep_single_delta_matches_optimize():
    cfg = SearchConfig(1.0, budget=1500, seed=4, restarts=1)
    (via_sweep,) = sweep_delta(cfg, [0.0])
    direct = optimize_search(cfg)
    assert via_sweep.to_dict() == direct.to_dict()


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(1.0, delta=-0.1)
    with pytest.raises(ValueError):
        SearchConfig(1.0, budget=0)


@pytest.mark.slow
@pytest.mark.parametrize("h_target", [0.5, 2.0])
def test_residual_floor_other_targets(h_target):
    base = optimize_search(SearchConfig(h_target, budget=12000, restarts=5, seed=3))
    margin = optimize_search(SearchConfig(h_target, budget=12000, restarts=5,
                                          seed=3, delta=0.2))
    assert base.best_residual <= 1e-4
    assert margin.best_residual >= 10 * base.best_residual


def test_sweep_ladder_monotone():
    cfg = SearchConfig(0.0, budget=3000, restarts=2, seed=3)
    reps = sweep_delta(cfg, [0.0, 0.1, 0.2])
    vals = [r.best_residual for r in reps]
    # non-decreasing by construction (later feasible sets are subsets)
    assert all(vals[i + 1] >= 0.8 * vals[i] for i in range(len(vals) - 1))

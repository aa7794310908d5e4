"""Profile integration, conservation, and meshing tests."""

import math
import os

import numpy as np
import pytest

from hcmc.profiles import (
    EmptyProfile,
    MeshData,
    NonPositiveInitialHeight,
    SingularQuadrature,
    build_mesh,
    first_integral,
    gallery_config,
    gallery_profiles,
    integrate_profile,
    integrate_profile_arclength,
    validate_profile_surface,
    write_obj,
)


def test_rk_tableau_consistency():
    from hcmc.profiles import _RK_A, _RK_B4, _RK_B5, _RK_C

    for row, node in zip(_RK_A, _RK_C):
        assert abs(sum(row) - node) <= 1e-15
    assert abs(sum(_RK_B5) - 1.0) <= 1e-15
    assert abs(sum(_RK_B4) - 1.0) <= 1e-15


def test_equilibrium_horosphere():
    p = integrate_profile(1.0, 1.0, 0.0, (-1, 1), 1e-10)
    assert np.max(np.abs(p.phis - 1.0)) <= 1e-10
    assert np.max(np.abs(p.dphis)) <= 1e-10


def test_nonpositive_initial_height():
    with pytest.raises(NonPositiveInitialHeight):
        integrate_profile(0.0, -1.0, 0.0, (-1, 1))


def test_minimal_first_integral_closed_form():
    assert first_integral(0.0, 1.0, 0.0) == 0.0
    assert first_integral(0.0, 2.0, 1.0) == pytest.approx(
        math.log(2.0) + 0.25 * math.log(2.0), abs=1e-15)


def test_minimal_conservation():
    p = integrate_profile(0.0, 1.0, 0.0, (-0.55, 0.55), 1e-10)
    quartic = (1.0 + p.dphis**2) * p.phis**4
    assert np.max(np.abs(quartic - 1.0)) <= 1e-8
    assert p.conserved_drift() <= 1e-8


@pytest.mark.parametrize("H", [-0.5, -1.0])
def test_general_conservation(H):
    rng = {-0.5: (-0.32, 0.32), -1.0: (-0.23, 0.23)}[H]
    p = integrate_profile(H, 1.0, 0.0, rng, 1e-10)
    assert p.conserved is not None
    assert p.conserved_drift() <= 10 * 1e-10


def test_singular_quadrature_regimes():
    # 0 < H < 1: root of the denominator at sqrt(1/H^2 - 1)
    with pytest.raises(SingularQuadrature):
        first_integral(0.5, 1.0, 2.0)
    # H = 1: singular for any nonzero p
    with pytest.raises(SingularQuadrature):
        first_integral(1.0, 1.0, 0.5)
    # H > 1 is regular
    first_integral(2.0, 1.0, 5.0)
    # H < 0 is regular
    first_integral(-0.5, 1.0, 5.0)


def test_autonomous_translation_symmetry():
    a = integrate_profile(-0.5, 1.0, 0.3, (0.0, 0.25), 1e-11)
    b = integrate_profile(-0.5, 1.0, 0.3, (0.1, 0.35), 1e-11)
    xs = np.linspace(0.02, 0.22, 15)
    pa = a._dense(xs)
    pb = b._dense(xs + 0.1)
    assert np.max(np.abs(pa - pb)) <= 1e-10


def test_convergence_order_under_tolerance_reduction():
    # step-count quantisation makes a single halving noisy; over the
    # gallery set two halvings reliably buy at least a factor of two
    windows = {0.0: (-0.55, 0.55), -0.5: (-0.32, 0.32), -1.0: (-0.23, 0.23)}
    for H, rng in windows.items():
        devs = []
        for tol in (4e-8, 1e-8):
            p = integrate_profile(H, 1.0, 0.0, rng, tol)
            devs.append(validate_profile_surface(p, nx=40, ny=4).max_abs_deviation)
        assert devs[1] <= devs[0] / 2, (H, devs)


def test_early_stop_reasons():
    p = integrate_profile(-1.0, 1.0, 0.0, (-2, 2), 1e-10, p_max=5.0)
    assert p.stop_reason == "p_max"
    q = integrate_profile(0.0, 0.05, -1.0, (0.0, 5.0), 1e-10, phi_min=0.04)
    assert q.stop_reason == "phi_min"
    assert np.all(q.phis > 0)


def test_build_mesh_and_obj(tmp_path):
    p = integrate_profile(0.0, 1.0, 0.0, (-0.4, 0.4), 1e-9, n_samples=41)
    mesh = build_mesh(p, (-0.5, 0.5), 9)
    mesh.validate()
    assert np.all(mesh.vertices[:, 2] > 0)
    path = tmp_path / "m.obj"
    write_obj(mesh, str(path))
    lines = path.read_text().splitlines()
    nv = sum(1 for l in lines if l.startswith("v "))
    nf = sum(1 for l in lines if l.startswith("f "))
    assert nv == len(mesh.vertices) and nf == len(mesh.faces)
    first_face = next(l for l in lines if l.startswith("f "))
    assert min(int(t) for t in first_face.split()[1:]) >= 1


def test_mesh_requires_profile_and_rows():
    p = integrate_profile(1.0, 1.0, 0.0, (-1, 1), 1e-9, n_samples=1)
    with pytest.raises(EmptyProfile):
        build_mesh(p, (-1, 1), 4)
    p2 = integrate_profile(1.0, 1.0, 0.0, (-1, 1), 1e-9, n_samples=5)
    with pytest.raises(ValueError):
        build_mesh(p2, (-1, 1), 1)


def test_constant_profile_mesh_is_flat():
    p = integrate_profile(1.0, 1.0, 0.0, (-1, 1), 1e-10, n_samples=11)
    mesh = build_mesh(p, (0, 1), 5, m=2.0)
    assert np.allclose(mesh.vertices[:, 2], 2.0)


def test_gallery_profiles_meet_budget():
    cfg = gallery_config()
    assert [s["H"] for s in cfg["surfaces"]] == [0.0, -0.5, -1.0, 2.0]
    for name, prof in gallery_profiles().items():
        rep = validate_profile_surface(prof)
        assert rep.max_abs_deviation <= 1e-6, name
        assert np.all(prof.phis >= 0.2) and np.all(prof.phis <= 5.0), name
        mesh = build_mesh(prof, tuple(cfg["y_range"]), cfg["ny"])
        mesh.validate()
        assert np.all(mesh.vertices[:, 2] > 0)


def test_arclength_profile_folds():
    p = integrate_profile_arclength(2.0, 1.0, 0.0, (0.0, 2.3429), 1e-10)
    # theta passes pi/2: the profile folds and x is non-monotone
    assert p.thetas.max() > np.pi / 2
    assert np.any(np.diff(p.xs) < 0)
    assert validate_profile_surface(p).max_abs_deviation <= 1e-6

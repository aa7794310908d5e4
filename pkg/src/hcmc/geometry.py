"""Floating-point mean curvature in the upper half-space model.

The hyperbolic mean curvature of a surface at height z relates to its
Euclidean data through H = z He + N3, with N the Euclidean unit normal
along grad F for an implicit surface F = 0.  Graphs z = phi(x) psi(y) are
handled through the separable implicit form f(x) + g(y) + log z = 0 with
phi = e^{-f}, psi = e^{-g}.

All evaluators accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DegenerateGradient",
    "DomainViolation",
    "NonPositiveHeight",
    "NegativeRadicand",
    "Curve",
    "curve_from_callables",
    "constant_curve",
    "JetSample",
    "HomotheticalGraph",
    "GeneralGraph",
    "ImplicitSurface",
    "mean_curvature_implicit",
    "mean_curvature_graph",
    "eq1_residual",
    "GridReport",
    "grid_validate",
    "EPS_GRAD",
]

EPS_GRAD = 1e-12


class DegenerateGradient(Exception):
    pass


class DomainViolation(Exception):
    pass


class NonPositiveHeight(Exception):
    pass


class NegativeRadicand(Exception):
    pass


@dataclass(frozen=True)
class Curve:
    """One-variable factor with two derivatives: jet(x) -> (f, f', f'')."""

    jet: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]

    def __call__(self, x):
        return self.jet(np.asarray(x, dtype=float))


def curve_from_callables(f, d1=None, d2=None, fd_step: float = 1e-5) -> Curve:
    """Analytic derivatives when given, central differences otherwise."""

    def jet(x):
        x = np.asarray(x, dtype=float)
        h = fd_step * np.maximum(1.0, np.abs(x))
        v = f(x)
        g = d1(x) if d1 is not None else (f(x + h) - f(x - h)) / (2 * h)
        s = d2(x) if d2 is not None else (f(x + h) - 2 * v + f(x - h)) / (h * h)
        return v, g, s

    return Curve(jet)


def constant_curve(c: float) -> Curve:
    def jet(x):
        x = np.asarray(x, dtype=float)
        z = np.zeros_like(x)
        return np.full_like(x, float(c)), z, z

    return Curve(jet)


@dataclass(frozen=True)
class JetSample:
    """Second-order jet of an implicit defining function at one point."""

    point: tuple[float, float, float]
    grad: np.ndarray
    hess: np.ndarray


@dataclass(frozen=True)
class HomotheticalGraph:
    """z = phi(x) psi(y) over a rectangle; both factors positive."""

    phi: Curve
    psi: Curve
    x_range: tuple[float, float] = (-1.0, 1.0)
    y_range: tuple[float, float] = (-1.0, 1.0)


@dataclass(frozen=True)
class GeneralGraph:
    """z = F(x, y); jet(x, y) -> (F, Fx, Fy, Fxx, Fxy, Fyy)."""

    jet: Callable
    x_range: tuple[float, float] = (-1.0, 1.0)
    y_range: tuple[float, float] = (-1.0, 1.0)


@dataclass(frozen=True)
class ImplicitSurface:
    """F(x, y, z) = 0; jet(x, y, z) -> (F, grad, hess)."""

    jet: Callable
    box: tuple[tuple[float, float], ...] = ((-1.0, 1.0), (-1.0, 1.0), (0.1, 2.0))


def mean_curvature_implicit(sample: JetSample, eps_grad: float = EPS_GRAD) -> float:
    """H = z He + N3 with N = grad F/|grad F| and He from the divergence
    formula (average of the principal curvatures)."""
    g = np.asarray(sample.grad, dtype=float)
    h = np.asarray(sample.hess, dtype=float)
    norm2 = float(g @ g)
    if norm2 <= eps_grad * eps_grad:
        raise DegenerateGradient(f"|grad F| <= {eps_grad} at {sample.point}")
    norm = np.sqrt(norm2)
    he = (g @ h @ g - norm2 * np.trace(h)) / (2.0 * norm2 * norm)
    z = sample.point[2]
    return float(z * he + g[2] / norm)


def _separable_mean_curvature(fp, fpp, gp, gpp, z):
    """H for f(x) + g(y) + log z = 0 with the diagonal-Hessian reduction."""
    hp = 1.0 / z
    hpp = -1.0 / (z * z)
    q = fp * fp + gp * gp + hp * hp
    num = (gp * gp + hp * hp) * fpp + (fp * fp + hp * hp) * gpp + (fp * fp + gp * gp) * hpp
    return -0.5 * z * num / q**1.5 + hp / np.sqrt(q)


def mean_curvature_graph(spec, x, y, check_domain: bool = True):
    """Mean curvature of a graph surface at (x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if isinstance(spec, HomotheticalGraph):
        if check_domain:
            _require_inside(x, spec.x_range, "x")
            _require_inside(y, spec.y_range, "y")
        phi, dphi, ddphi = spec.phi(x)
        psi, dpsi, ddpsi = spec.psi(y)
        z = phi * psi
        if np.any(z <= 0):
            raise NonPositiveHeight("phi * psi must stay positive")
        # f = -log phi, g = -log psi
        fp = -dphi / phi
        fpp = -ddphi / phi + (dphi / phi) ** 2
        gp = -dpsi / psi
        gpp = -ddpsi / psi + (dpsi / psi) ** 2
        out = _separable_mean_curvature(fp, fpp, gp, gpp, z)
        return float(out) if out.ndim == 0 else out
    if isinstance(spec, GeneralGraph):
        if check_domain:
            _require_inside(x, spec.x_range, "x")
            _require_inside(y, spec.y_range, "y")
        F, Fx, Fy, Fxx, Fxy, Fyy = spec.jet(x, y)
        z = np.asarray(F, dtype=float)
        if np.any(z <= 0):
            raise NonPositiveHeight("graph height must stay positive")
        # implicit form z - F(x, y) = 0, upward normal
        g = np.stack(np.broadcast_arrays(-Fx, -Fy, np.ones_like(z)), axis=-1)
        norm2 = np.sum(g * g, axis=-1)
        norm = np.sqrt(norm2)
        quad = (Fxx * Fx * Fx + 2 * Fxy * Fx * Fy + Fyy * Fy * Fy)
        trace = Fxx + Fyy
        # grad^T hess grad with hess of (z - F): -Fxx etc.; z-row is zero
        he = (-quad + norm2 * trace) / (2.0 * norm2 * norm)
        out = z * he + 1.0 / norm
        return float(out) if out.ndim == 0 else out
    raise TypeError(f"not a graph surface: {type(spec).__name__}")


def _require_inside(t, rng, name):
    lo, hi = rng
    pad = 1e-9 * max(1.0, abs(lo), abs(hi))
    if np.any(t < lo - pad) or np.any(t > hi + pad):
        raise DomainViolation(f"{name} outside [{lo}, {hi}]")


def eq1_residual(X, Y, Xp, Yp, w, H):
    """Left minus right side of the first-order mean-curvature relation in
    the variables X = f'^2, Y = g'^2, w = log z."""
    X = np.asarray(X, dtype=float)
    e2 = np.exp(-2.0 * np.asarray(w, dtype=float))
    radicand = X + Y + e2
    if np.any(radicand <= 0):
        raise NegativeRadicand("X + Y + e^{-2w} must be positive")
    lhs = (Y + e2) * Xp + (X + e2) * Yp - 2 * (X + Y) * e2 - 4 * e2 * radicand
    rhs = -4.0 * H * np.exp(-np.asarray(w, dtype=float)) * radicand**1.5
    out = lhs - rhs
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GridReport:
    max_abs_deviation: float
    argmax: tuple[float, float]
    n_points: int
    target: float

    def to_dict(self) -> dict:
        return {
            "max_abs_deviation": self.max_abs_deviation,
            "argmax": list(self.argmax),
            "n_points": self.n_points,
            "target": self.target,
        }


def grid_validate(spec, h_target: float, nx: int = 50, ny: int = 50) -> GridReport:
    """Max deviation of the mean curvature from the target over a grid."""
    if nx < 2 or ny < 2:
        raise ValueError("grid must be at least 2 x 2")
    xs = np.linspace(spec.x_range[0], spec.x_range[1], nx)
    ys = np.linspace(spec.y_range[0], spec.y_range[1], ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    h = mean_curvature_graph(spec, gx.ravel(), gy.ravel())
    dev = np.abs(np.asarray(h) - h_target)
    k = int(np.argmax(dev))
    return GridReport(float(dev[k]), (float(gx.ravel()[k]), float(gy.ravel()[k])),
                      dev.size, h_target)

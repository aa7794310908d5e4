"""Profile curves of parabolic constant-mean-curvature surfaces.

With psi constant the surface z = m phi(x) has constant mean curvature H
exactly when

    phi phi'' + 2 (1 + phi'^2) - 2 H (1 + phi'^2)^{3/2} = 0.

This module integrates that profile equation (graph form, plus an
arclength form for profiles that fold), tracks a conserved quantity, and
builds triangle meshes of the resulting surfaces.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .geometry import Curve, GridReport, HomotheticalGraph, constant_curve, grid_validate

__all__ = [
    "NonPositiveInitialHeight",
    "ToleranceNotMet",
    "SingularQuadrature",
    "EmptyProfile",
    "ProfileSolution",
    "integrate_profile",
    "integrate_profile_arclength",
    "first_integral",
    "MeshData",
    "build_mesh",
    "write_obj",
    "validate_profile_surface",
    "gallery_config",
    "PHI_MIN",
    "P_MAX",
]

PHI_MIN = 1e-9
P_MAX = 1e9


class NonPositiveInitialHeight(Exception):
    pass


class ToleranceNotMet(Exception):
    pass


class SingularQuadrature(Exception):
    pass


class EmptyProfile(Exception):
    pass


def _rhs_graph(x, y, H):
    phi, p = y
    s = 1.0 + p * p
    return np.array([p, (2.0 * H * s**1.5 - 2.0 * s) / phi])


def _rhs_arclength(s, y, H):
    x, phi, theta = y
    return np.array([math.cos(theta), math.sin(theta),
                     2.0 * (H - math.cos(theta)) / phi])


# Fehlberg 4(5) tableau; the fifth-order value propagates and the
# difference to the fourth-order value estimates the local error.
_RK_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8, 3680 / 513, -845 / 4104),
    (-8 / 27, 2, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_RK_C = (0, 1 / 4, 3 / 8, 12 / 13, 1, 1 / 2)
_RK_B5 = (16 / 135, 0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)
_RK_B4 = (25 / 216, 0, 1408 / 2565, 2197 / 4104, -1 / 5, 0)


class _Dense:
    """Piecewise cubic Hermite interpolant over the accepted nodes."""

    def __init__(self, xs, ys, fs):
        order = np.argsort(xs)
        self.xs = np.asarray(xs)[order]
        self.ys = np.asarray(ys)[order]
        self.fs = np.asarray(fs)[order]

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        x = np.clip(x, self.xs[0], self.xs[-1])
        idx = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0,
                      len(self.xs) - 2)
        x0, x1 = self.xs[idx], self.xs[idx + 1]
        h = np.where(x1 > x0, x1 - x0, 1.0)
        t = (x - x0) / h
        t2, t3 = t * t, t * t * t
        h00 = 2 * t3 - 3 * t2 + 1
        h10 = t3 - 2 * t2 + t
        h01 = -2 * t3 + 3 * t2
        h11 = t3 - t2
        out = (h00[:, None] * self.ys[idx]
               + (h10 * h)[:, None] * self.fs[idx]
               + h01[:, None] * self.ys[idx + 1]
               + (h11 * h)[:, None] * self.fs[idx + 1])
        return out.T


def _rk45(rhs, t0: float, t1: float, y0, args, tol: float,
          events=(), max_steps: int = 400000):
    """Embedded Fehlberg pair with error-per-unit-step control
    (local error <= tol * |h| per accepted step), so the accumulated error
    scales linearly with the tolerance.

    Returns (nodes, values, slopes, n_steps, event_index) where
    event_index is None for a completed run.
    """
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    if span == 0:
        f0 = rhs(t0, np.asarray(y0, float), *args)
        return [t0], [np.asarray(y0, float)], [f0], 0, None
    max_h = span / 8.0
    t = t0
    y = np.asarray(y0, dtype=float)
    f = rhs(t, y, *args)
    h = direction * min(1e-3 * max(span, 1.0), max_h)
    xs, ys, fs = [t], [y.copy()], [f.copy()]
    g_prev = [ev(t, y, *args) for ev in events]
    hit = None
    n = 0
    while (t1 - t) * direction > 1e-14 * max(1.0, abs(t1)):
        if (t + h - t1) * direction > 0:
            h = t1 - t
        k = [f]
        for i in range(1, 6):
            yi = y + h * sum(a * kk for a, kk in zip(_RK_A[i], k))
            k.append(rhs(t + _RK_C[i] * h, yi, *args))
        y5 = y + h * sum(b * kk for b, kk in zip(_RK_B5, k) if b)
        y4 = y + h * sum(b * kk for b, kk in zip(_RK_B4, k) if b)
        err = float(np.max(np.abs(y5 - y4)))
        n += 1
        if n > max_steps:
            raise ToleranceNotMet(
                f"step budget exhausted at t={t:.6g} (h={h:.3g}, err={err:.3g})"
            )
        if abs(h) < 1e-14 * max(1.0, abs(t)):
            raise ToleranceNotMet("required step size vanishes")
        # roundoff floor of the six-stage estimate (the large tableau
        # coefficients amplify ulp noise by roughly 60x): below it the
        # difference of the two embedded solutions carries no information
        floor = 1.5e-14 * (1.0 + float(np.max(np.abs(y5))))
        target = tol * abs(h) + floor
        if err <= target:
            t_new, y_new = t + h, y5
            f_new = rhs(t_new, y_new, *args)
            xs.append(t_new)
            ys.append(y_new.copy())
            fs.append(f_new.copy())
            g_new = [ev(t_new, y_new, *args) for ev in events]
            for j, (ga, gb) in enumerate(zip(g_prev, g_new)):
                if ga > 0 >= gb:
                    hit = j
                    break
            t, y, f, g_prev = t_new, y_new, f_new, g_new
            if hit is not None:
                break
        if err <= 2.0 * floor:
            fac = 4.0  # estimate is roundoff noise: the step is far too small
        else:
            fac = 0.9 * (tol * abs(h) / err) ** 0.25
        h *= min(4.0, max(0.2, fac))
        if abs(h) > max_h:
            h = direction * max_h
    return xs, ys, fs, n, hit


@dataclass
class ProfileSolution:
    """Sampled profile plus dense interpolant and step metadata."""

    H: float
    mode: str                      # "graph" or "arclength"
    xs: np.ndarray                 # x samples (graph) or x(s) (arclength)
    phis: np.ndarray
    dphis: np.ndarray              # phi' (graph) or tan(theta) (arclength)
    thetas: np.ndarray | None
    ss: np.ndarray | None          # arclength parameter samples
    tol: float
    n_steps: int
    stop_reason: str
    conserved: np.ndarray | None   # first-integral trace, when regular
    _dense: object = field(repr=False, default=None)

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.xs, self.phis, self.dphis])

    def conserved_drift(self) -> float:
        if self.conserved is None:
            raise SingularQuadrature("no regular conserved trace for this profile")
        return float(np.max(self.conserved) - np.min(self.conserved))

    def phi_jet(self, x):
        """(phi, phi', phi'') from the dense solution; graph mode only."""
        if self.mode != "graph":
            raise ValueError("dense jets are only defined for graph profiles")
        x = np.asarray(x, dtype=float)
        vals = self._dense(np.atleast_1d(x))
        phi, p = vals[0], vals[1]
        s = 1.0 + p * p
        ddphi = (2.0 * self.H * s**1.5 - 2.0 * s) / phi
        if x.ndim == 0:
            return float(phi[0]), float(p[0]), float(ddphi[0])
        return phi, p, ddphi

    def as_curve(self) -> Curve:
        return Curve(lambda x: self.phi_jet(x))

    def x_span(self) -> tuple[float, float]:
        return float(np.min(self.xs)), float(np.max(self.xs))


def _refine_event(dense: "_Dense", ev, args, ta: float, tb: float) -> float:
    """Bisect the event function on the interpolant over [ta, tb]."""
    ga = ev(ta, dense(ta)[:, 0], *args)
    if ga <= 0:
        return ta
    for _ in range(80):
        tm = 0.5 * (ta + tb)
        if ev(tm, dense(tm)[:, 0], *args) > 0:
            ta = tm
        else:
            tb = tm
    return tb


class _Piece:
    """One directional integration with its interpolant and stop data."""

    def __init__(self, rhs, t0, t1, y0, args, tol, events, reasons):
        xs, ys, fs, n, hit = _rk45(rhs, t0, t1, y0, args, tol, events)
        self.n_steps = n
        self.reason = "completed"
        self.dense = _Dense(xs, ys, fs)
        self.t_end = xs[-1]
        if hit is not None:
            t_ev = _refine_event(self.dense, events[hit], args,
                                 xs[-2] if len(xs) > 1 else xs[-1], xs[-1])
            self.t_end = t_ev
            self.reason = reasons[hit]


def integrate_profile(H: float, phi0: float, dphi0: float,
                      x_range: tuple[float, float], tol: float = 1e-10,
                      n_samples: int = 801,
                      phi_min: float = PHI_MIN, p_max: float = P_MAX) -> ProfileSolution:
    """Integrate the graph-form profile equation.

    Initial data sits at x = 0 when the range spans it, otherwise at the
    left endpoint.  Integration stops early (with the reason recorded)
    when phi reaches phi_min or |phi'| reaches p_max.
    """
    if phi0 <= 0:
        raise NonPositiveInitialHeight(f"phi0 = {phi0}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = float(x_range[0]), float(x_range[1])
    if not a < b:
        raise ValueError("empty x range")
    x0 = 0.0 if a <= 0.0 <= b else a

    def ev_phi(x, y, H):
        return y[0] - phi_min

    def ev_p(x, y, H):
        return p_max - abs(y[1])

    events = (ev_phi, ev_p)
    reasons = ("phi_min", "p_max")
    y0 = (phi0, dphi0)

    pieces = []
    if a < x0:
        pieces.append(_Piece(_rhs_graph, x0, a, y0, (H,), tol, events, reasons))
    if b > x0:
        pieces.append(_Piece(_rhs_graph, x0, b, y0, (H,), tol, events, reasons))
    if not pieces:
        raise ValueError("empty x range")
    lo = min(min(p.t_end, x0) for p in pieces)
    hi = max(max(p.t_end, x0) for p in pieces)
    stop = "completed"
    for p in pieces:
        if p.reason != "completed":
            stop = p.reason

    left = next((p for p in pieces if p.t_end < x0), None)
    right = next((p for p in pieces if p.t_end > x0), None)

    def dense(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        x = np.clip(x, lo, hi)
        out = np.empty((2, x.size))
        mask_l = x < x0
        if left is not None and mask_l.any():
            out[:, mask_l] = left.dense(x[mask_l])
        mask_r = ~mask_l
        if mask_r.any():
            if right is not None:
                out[:, mask_r] = right.dense(x[mask_r])
            else:
                out[0, mask_r], out[1, mask_r] = phi0, dphi0
        return out

    xs = np.linspace(lo, hi, n_samples)
    vals = dense(xs)
    phis, dphis = vals[0].copy(), vals[1].copy()
    n_steps = sum(p.n_steps for p in pieces)

    conserved = None
    try:
        conserved = np.array([first_integral(H, float(f), float(p))
                              for f, p in zip(phis, dphis)])
    except SingularQuadrature:
        conserved = None

    return ProfileSolution(H, "graph", xs, phis, dphis, None, None, tol,
                           n_steps, stop, conserved, dense)


def integrate_profile_arclength(H: float, phi0: float, theta0: float,
                                s_range: tuple[float, float], tol: float = 1e-10,
                                n_samples: int = 2001,
                                phi_min: float = PHI_MIN) -> ProfileSolution:
    """Integrate the profile by arclength: x' = cos(theta), phi' = sin(theta),
    theta' = 2(H - cos(theta))/phi.  Handles folding profiles."""
    if phi0 <= 0:
        raise NonPositiveInitialHeight(f"phi0 = {phi0}")

    def ev_phi(s, y, H):
        return y[1] - phi_min

    a, b = float(s_range[0]), float(s_range[1])
    piece = _Piece(_rhs_arclength, a, b, (0.0, phi0, theta0), (H,), tol,
                   (ev_phi,), ("phi_min",))
    ss = np.linspace(a, piece.t_end, n_samples)
    xs, phis, thetas = piece.dense(ss)
    return ProfileSolution(H, "arclength", xs, phis, np.tan(thetas), thetas,
                           ss, tol, piece.n_steps, piece.reason, None,
                           piece.dense)


def first_integral(H: float, phi: float, p: float) -> float:
    """log(phi) - Q(p), constant along exact profiles.

    Q(p) integrates s / (2 (1+s^2) (H sqrt(1+s^2) - 1)) from 0 to p;
    closed form log(phi) + log(1+p^2)/4 when H = 0.  The quadrature is
    singular when H sqrt(1+s^2) = 1 is crossed: for 0 < H < 1 at
    |p| >= sqrt(1/H^2 - 1), and for H = 1 at any p != 0.
    """
    if phi <= 0:
        raise ValueError("phi must be positive")
    if H == 0.0:
        return math.log(phi) + 0.25 * math.log1p(p * p)
    if 0.0 < H <= 1.0:
        s_star2 = 1.0 / (H * H) - 1.0
        if p * p >= s_star2 - 1e-15:
            raise SingularQuadrature(
                f"denominator root at |p| = sqrt(1/H^2 - 1) inside [0, {p}]"
            )

    def integrand(s):
        r = math.sqrt(1.0 + s * s)
        return s / (2.0 * (1.0 + s * s) * (H * r - 1.0))

    q, _ = quad(integrand, 0.0, p, epsabs=1e-12, epsrel=1e-12, limit=200)
    return math.log(phi) - q


@dataclass(frozen=True)
class MeshData:
    """Triangle mesh in half-space coordinates (all z > 0)."""

    vertices: np.ndarray  # (n, 3)
    faces: np.ndarray     # (m, 3), 0-based

    def validate(self) -> None:
        if np.any(self.vertices[:, 2] <= 0):
            raise ValueError("mesh reaches the ideal boundary z <= 0")
        if self.faces.min() < 0 or self.faces.max() >= len(self.vertices):
            raise ValueError("face index out of range")
        # consistent winding: every interior edge used once per direction
        seen: dict[tuple[int, int], int] = {}
        for tri in self.faces:
            for i in range(3):
                e = (int(tri[i]), int(tri[(i + 1) % 3]))
                seen[e] = seen.get(e, 0) + 1
                if seen[e] > 1:
                    raise ValueError(f"edge {e} traversed twice in one direction")
                if seen.get((e[1], e[0]), 0) > 1:
                    raise ValueError("inconsistent winding")


def build_mesh(prof: ProfileSolution, y_range: tuple[float, float], ny: int,
               m: float = 1.0) -> MeshData:
    """Vertices (x_i, y_j, m phi(x_i)) over the profile samples with a
    regular two-triangles-per-quad pattern."""
    if ny < 2:
        raise ValueError("ny must be at least 2")
    if prof.xs.size < 2:
        raise EmptyProfile("profile has fewer than two samples")
    ys = np.linspace(y_range[0], y_range[1], ny)
    nx = prof.xs.size
    vx = np.repeat(prof.xs, ny)
    vy = np.tile(ys, nx)
    vz = np.repeat(m * prof.phis, ny)
    vertices = np.column_stack([vx, vy, vz])
    faces = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            a = i * ny + j
            b = (i + 1) * ny + j
            faces.append((a, b, b + 1))
            faces.append((a, b + 1, a + 1))
    return MeshData(vertices, np.array(faces, dtype=int))


def write_obj(mesh: MeshData, path: str) -> None:
    """ASCII Wavefront subset: v lines then f lines with 1-based indices."""
    with open(path, "w") as fh:
        for x, y, z in mesh.vertices:
            fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for a, b, c in mesh.faces:
            fh.write(f"f {a + 1} {b + 1} {c + 1}\n")


def independent_curve(prof: ProfileSolution, h: float = 3e-4) -> Curve:
    """Curve with phi'' from a five-point stencil on the dense phi', not
    from the profile equation itself (which would make any curvature
    check circular)."""
    if prof.mode != "graph":
        raise ValueError("graph profiles only")

    def jet(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        phi, p = prof._dense(x)
        stencil = [prof._dense(x + k * h)[1] for k in (-2, -1, 1, 2)]
        ddphi = (stencil[0] - 8 * stencil[1] + 8 * stencil[2] - stencil[3]) / (12 * h)
        return phi, p, ddphi

    return Curve(jet)


def validate_profile_surface(prof: ProfileSolution, m: float = 1.0,
                             nx: int = 50, ny: int = 8,
                             fd_step: float = 3e-4) -> GridReport:
    """Max |H - H_target| over the surface generated by the profile.

    Graph profiles go through the generic graph evaluator with the
    stencil-based second derivative; arclength profiles use the
    ruled-surface formula H = phi * curvature/2 + cos(theta) with the
    curvature from a finite difference of theta(s).  Either way the
    evaluation is independent of the integrator's right side.
    """
    if prof.mode == "graph":
        lo, hi = prof.x_span()
        pad = 2.5 * fd_step
        spec = HomotheticalGraph(independent_curve(prof, fd_step),
                                 constant_curve(m),
                                 (lo + pad, hi - pad), (-1.0, 1.0))
        return grid_validate(spec, prof.H, nx, ny)
    if m != 1.0:
        raise ValueError("arclength validation assumes m = 1")
    a, b = float(prof.ss[0]), float(prof.ss[-1])
    ss = np.linspace(a, b, max(nx, 501))
    ds = ss[1] - ss[0]
    _, phis, thetas = prof._dense(ss)
    kappa = (-thetas[4:] + 8 * thetas[3:-1] - 8 * thetas[1:-3] + thetas[:-4]) / (12 * ds)
    h = phis[2:-2] * kappa / 2.0 + np.cos(thetas[2:-2])
    dev = np.abs(h - prof.H)
    k = int(np.argmax(dev))
    return GridReport(float(dev[k]), (float(ss[2:-2][k]), 0.0), dev.size, prof.H)


def gallery_config() -> dict:
    """Shipped parameters reproducing the four-surface gallery."""
    data = resources.files("hcmc.data").joinpath("gallery.json").read_text()
    return json.loads(data)


def gallery_profiles(tol: float | None = None) -> dict[str, ProfileSolution]:
    """Integrate every gallery profile at the shipped (or given) tolerance."""
    cfg = gallery_config()
    t = cfg["tol"] if tol is None else tol
    out: dict[str, ProfileSolution] = {}
    for s in cfg["surfaces"]:
        if s["mode"] == "graph":
            out[s["name"]] = integrate_profile(
                s["H"], s["phi0"], s["dphi0"], tuple(s["x_range"]), t)
        else:
            out[s["name"]] = integrate_profile_arclength(
                s["H"], s["phi0"], s["theta0"], tuple(s["s_range"]), t)
    return out

"""Stationary and unsteady Stokes solves on the MAC grid under no-slip.

The saddle point is solved by conjugate gradients on the pressure Schur
complement (the classical Uzawa route): each application does one exact
fast velocity solve per component, and the unsteady step is preconditioned
by one Neumann Poisson solve plus a mass term.  Divergence-form right-hand
sides built from a scalar reuse grid.perp_gradient, so only one difference
of the scalar ever enters the assembled source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fastsolve
from .errors import ConvergenceError
from .grid import (
    GridSpec,
    ScalarField,
    VelocityField,
    cell_components,
    cell_gradient,
    divergence,
    grad_scalar_on_faces,
    laplacian_vec,
    perp_gradient,
)

DEFAULT_TOL = 1e-9


@dataclass
class StokesSolveResult:
    velocity: VelocityField
    pressure: ScalarField
    iterations: int
    div_residual: float
    mom_residual: float


@dataclass
class LogGradientAudit:
    grad_u_linf: float
    f_linf: float
    grad_f_lq: float
    envelope: float
    ratio: float


def _face_l2(u: VelocityField) -> float:
    h = u.grid.h
    return h * math.sqrt(float(np.sum(u.ux**2) + np.sum(u.uy**2)))


def _cell_l2(a: np.ndarray, h: float) -> float:
    return h * float(np.linalg.norm(a))


def _solve_velocity(f: VelocityField, mass: float, visc: float) -> VelocityField:
    """Exact solve of (mass*I + visc*(-Lap)) u = f on interior faces, no-slip."""
    g = f.grid
    out = VelocityField.zeros(g)
    out.ux[1:-1, :] = fastsolve.solve_ux_helmholtz(f.ux[1:-1, :], g.h, mass, visc)
    out.uy[:, 1:-1] = fastsolve.solve_uy_helmholtz(f.uy[:, 1:-1], g.h, mass, visc)
    return out


def _schur_cg(f: VelocityField, mass: float, visc: float, dt_scale: float,
              tol: float, max_iter: int, precond=None) -> tuple[VelocityField, np.ndarray, int, float]:
    """CG on the pressure Schur complement of (mass*I - visc*Lap) u + dt_scale*Grad p = f.

    Returns (velocity, pressure array, iterations, final div residual).
    """
    g = f.grid
    h = g.h

    def solve(vf: VelocityField) -> VelocityField:
        return _solve_velocity(vf, mass, visc)

    def apply_s(q: np.ndarray) -> np.ndarray:
        gq = grad_scalar_on_faces(ScalarField(g, q))
        return -divergence(solve(gq)).data

    uf = solve(f)
    b = -divergence(uf).data / dt_scale
    b -= b.mean()

    p = np.zeros_like(b)
    r = b.copy()
    res_div = dt_scale * _cell_l2(r, h)
    it = 0
    if res_div > tol:
        z = precond(r) if precond else r.copy()
        d = z.copy()
        rz = float(np.sum(r * z))
        for it in range(1, max_iter + 1):
            sd = apply_s(d)
            alpha = rz / float(np.sum(d * sd))
            p += alpha * d
            r -= alpha * sd
            r -= r.mean()
            res_div = dt_scale * _cell_l2(r, h)
            if res_div <= tol:
                break
            z = precond(r) if precond else r.copy()
            rz_new = float(np.sum(r * z))
            d = z + (rz_new / rz) * d
            rz = rz_new
    p -= p.mean()
    u = solve(f - dt_scale * grad_scalar_on_faces(ScalarField(g, p)))
    return u, p, it, res_div


def stokes_stationary(f: VelocityField, tol: float = DEFAULT_TOL,
                      max_iter: int | None = None) -> StokesSolveResult:
    """Solve -Lap u + Grad p = f, div u = 0, u = 0 on the walls.

    The tolerance is absolute for order-one data and relative to ||f|| for
    larger right-hand sides (transform round-off scales with the data).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = f.grid
    cap = max_iter if max_iter is not None else 40 * g.nx
    tol_eff = tol * max(1.0, _face_l2(f))
    u, p, it, res_div = _schur_cg(f, 0.0, 1.0, 1.0, tol_eff, cap)

    pres = ScalarField(g, p)
    mom = laplacian_vec(u) * (-1.0) + grad_scalar_on_faces(pres) - f
    mom.zero_boundary_faces()
    mom_res = _face_l2(mom)
    div_res = _cell_l2(divergence(u).data, g.h)
    if div_res > tol_eff or mom_res > tol_eff:
        raise ConvergenceError("stationary Stokes solve did not converge",
                               max(div_res, mom_res), it)
    return StokesSolveResult(u, pres, it, div_res, mom_res)


def apply_A_inv_perp(w_like: ScalarField, scale: float, tol: float = DEFAULT_TOL,
                     max_iter: int | None = None) -> StokesSolveResult:
    """Stationary Stokes solve with source scale * perp-grad(w).

    The source is assembled in divergence form (differences of the
    node-interpolated scalar), never of derivatives of w.  A zero scale
    short-circuits to the zero solution.
    """
    g = w_like.grid
    if scale == 0.0:
        return StokesSolveResult(VelocityField.zeros(g), ScalarField.zeros(g), 0, 0.0, 0.0)
    return stokes_stationary(scale * perp_gradient(w_like), tol=tol, max_iter=max_iter)


def stokes_unsteady_step(u: VelocityField, f: VelocityField, dt: float, visc: float,
                         tol: float = DEFAULT_TOL, max_iter: int | None = None) -> StokesSolveResult:
    """One implicit-Euler step of du/dt - visc*Lap u + Grad p = f, div u = 0.

    The Schur complement is preconditioned by visc*dt*I + inv(-Lap_Neumann),
    one Poisson solve per outer iteration; iteration counts stay grid- and
    dt-independent.
    """
    if dt <= 0 or visc <= 0:
        raise ValueError("dt and visc must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = u.grid
    cap = max_iter if max_iter is not None else 40 * g.nx
    b = u + dt * f
    b.zero_boundary_faces()
    scale = max(1.0, _face_l2(b))
    tol_eff = tol * scale

    def precond(r: np.ndarray) -> np.ndarray:
        out = dt * visc * r + fastsolve.solve_cell_neumann(r, g.h)
        return out - out.mean()

    u1, p, it, res_div = _schur_cg(b, 1.0, dt * visc, dt, tol_eff, cap, precond=precond)

    pres = ScalarField(g, p)
    mom = (u1 - u) * (1.0 / dt) - visc * laplacian_vec(u1) + grad_scalar_on_faces(pres) - f
    mom.zero_boundary_faces()
    mom_res = _face_l2(mom)
    div_res = _cell_l2(divergence(u1).data, g.h)
    if div_res > tol_eff or mom_res > tol_eff * max(1.0, 1.0 / dt):
        raise ConvergenceError("unsteady Stokes step did not converge",
                               max(div_res, mom_res), it)
    return StokesSolveResult(u1, pres, it, div_res, mom_res)


def leray_project(u: VelocityField) -> tuple[VelocityField, ScalarField]:
    """Discrete Leray projection: remove the gradient part of a face field.

    Boundary normal faces are zeroed (projection space carries u.n = 0);
    the potential comes from one exact Neumann Poisson solve.
    """
    g = u.grid
    v = u.copy()
    v.zero_boundary_faces()
    div = divergence(v).data
    q = fastsolve.solve_cell_neumann(-div, g.h)
    qf = ScalarField(g, q)
    proj = v - grad_scalar_on_faces(qf)
    return proj, qf


def _grad_linf(u: VelocityField) -> float:
    uxc, uyc = cell_components(u)
    h = u.grid.h
    gxx, gxy = cell_gradient(uxc, h)
    gyx, gyy = cell_gradient(uyc, h)
    return float(np.sqrt(gxx**2 + gxy**2 + gyx**2 + gyy**2).max())


def log_gradient_audit(w_like: ScalarField, q: float, scale: float = 1.0,
                       tol: float = DEFAULT_TOL) -> LogGradientAudit:
    """Evaluate the logarithmic gradient bound for the divergence-form Stokes solve.

    Solves with source scale*perp-grad(w), then compares ||grad u||_inf with
    (1 + ||F||_inf) * ln(e + ||grad F||_Lq) where F is the antisymmetric
    tensor with entries +-scale*w; tensor norms are reported through w.
    """
    if q <= 2:
        raise ValueError("q must exceed 2")
    g = w_like.grid
    res = apply_A_inv_perp(w_like, scale, tol=tol)
    lhs = _grad_linf(res.velocity)
    f_linf = abs(scale) * float(np.abs(w_like.data).max())
    gx, gy = cell_gradient(w_like.data, g.h)
    mag = np.sqrt(gx**2 + gy**2) * abs(scale)
    grad_f_lq = float((g.h**2 * np.sum(mag**q)) ** (1.0 / q))
    envelope = (1.0 + f_linf) * math.log(math.e + grad_f_lq)
    return LogGradientAudit(lhs, f_linf, grad_f_lq, envelope,
                            lhs / envelope if envelope > 0 else 0.0)

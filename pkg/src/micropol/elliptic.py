"""Dirichlet and Neumann Poisson solvers on cell centers.

Both are preconditioned conjugate-gradient iterations whose preconditioner
is the exact fast-transform inverse of the same stencil, so they normally
converge in one or two iterations while still reporting a genuine residual.
Residual norms are measured in the midpoint-rule L2 norm sqrt(h^2 * sum r^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fastsolve
from .errors import ConvergenceError
from .grid import GridSpec, ScalarField

DEFAULT_TOL = 1e-10


@dataclass
class BoundaryFlux:
    """Outward normal derivative data on the four walls."""

    west: np.ndarray
    east: np.ndarray
    south: np.ndarray
    north: np.ndarray

    @classmethod
    def zeros(cls, grid: GridSpec) -> "BoundaryFlux":
        return cls(np.zeros(grid.ny), np.zeros(grid.ny), np.zeros(grid.nx), np.zeros(grid.nx))

    def boundary_integral(self, h: float) -> float:
        return float(h * (self.west.sum() + self.east.sum() + self.south.sum() + self.north.sum()))


@dataclass
class EllipticSolveResult:
    solution: ScalarField
    iterations: int
    residual_norm: float
    projection_magnitude: float = field(default=0.0)


def _pcg(apply_a, rhs: np.ndarray, precond, h: float, tol: float, max_iter: int,
         project=None) -> tuple[np.ndarray, int, float]:
    """Preconditioned CG; tolerance is absolute on the weighted residual norm."""
    wt = h  # sqrt(h^2) per entry
    x = np.zeros_like(rhs)
    r = rhs.copy()
    if project is not None:
        project(r)
    res = wt * np.linalg.norm(r)
    if res <= tol:
        return x, 0, res
    z = precond(r)
    p = z.copy()
    rz = float(np.sum(r * z))
    for it in range(1, max_iter + 1):
        ap = apply_a(p)
        denom = float(np.sum(p * ap))
        if denom == 0.0:
            break
        alpha = rz / denom
        x += alpha * p
        r -= alpha * ap
        if project is not None:
            project(r)
        res = wt * np.linalg.norm(r)
        if res <= tol:
            return x, it, res
        z = precond(r)
        rz_new = float(np.sum(r * z))
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, max_iter, res


def poisson_dirichlet(g: ScalarField, tol: float = DEFAULT_TOL,
                      max_iter: int | None = None) -> EllipticSolveResult:
    """Solve -Lap f = g with f = 0 on the walls (cell-centered, anti-reflection ghosts)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    gr = g.grid
    cap = max_iter if max_iter is not None else 20 * gr.nx
    sol, it, res = _pcg(
        lambda v: fastsolve.apply_neg_lap_cell_dirichlet(v, gr.h),
        g.data,
        lambda r: fastsolve.solve_cell_dirichlet(r, gr.h),
        gr.h, tol, cap,
    )
    if res > tol:
        raise ConvergenceError("Dirichlet Poisson solve did not converge", res, it)
    return EllipticSolveResult(ScalarField(gr, sol), it, res)


def poisson_neumann(g: ScalarField, bdry_flux: BoundaryFlux | None = None,
                    tol: float = DEFAULT_TOL, max_iter: int | None = None) -> EllipticSolveResult:
    """Solve -Lap f = g with prescribed outward flux; returns the zero-mean solution.

    The flux enters the boundary cells through the ghost closure
    (ghost = cell + h * flux), which folds +flux/h into the right-hand side.
    An incompatible (g, flux) pair is projected onto the solvable space and
    the removed defect integral |int g + bdry int flux| is reported.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    gr = g.grid
    flux = bdry_flux if bdry_flux is not None else BoundaryFlux.zeros(gr)
    rhs = g.data.copy()
    rhs[0, :] += flux.west / gr.h
    rhs[-1, :] += flux.east / gr.h
    rhs[:, 0] += flux.south / gr.h
    rhs[:, -1] += flux.north / gr.h

    defect = float(rhs.sum() * gr.h**2)
    rhs -= rhs.mean()

    def project(r: np.ndarray) -> None:
        r -= r.mean()

    cap = max_iter if max_iter is not None else 20 * gr.nx
    sol, it, res = _pcg(
        lambda v: fastsolve.apply_neg_lap_cell_neumann(v, gr.h),
        rhs,
        lambda r: fastsolve.solve_cell_neumann(r, gr.h),
        gr.h, tol, cap, project=project,
    )
    if res > tol:
        raise ConvergenceError("Neumann Poisson solve did not converge", res, it)
    sol -= sol.mean()
    return EllipticSolveResult(ScalarField(gr, sol), it, res, projection_magnitude=abs(defect))

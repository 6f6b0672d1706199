"""Fast sine/cosine-transform solvers for the constant-coefficient stencils.

On a uniform rectangle every operator this package assembles (cell-centered
Dirichlet/Neumann Laplacians, face-staggered no-slip Laplacians, and their
Helmholtz shifts) is diagonalized exactly by a separable DST/DCT basis.
These direct solves back the conjugate-gradient preconditioners in the
elliptic module and the velocity sub-solves of the Stokes module.
"""

from __future__ import annotations

import numpy as np
import scipy.fft as sfft


def _lam_cell_dirichlet(n: int, h: float) -> np.ndarray:
    """Eigenvalues of the 1D -d2/dx2 with anti-reflection (zero wall) ghosts, n cells."""
    k = np.arange(1, n + 1)
    return (2.0 - 2.0 * np.cos(np.pi * k / n)) / h**2


def _lam_node_dirichlet(n: int, h: float) -> np.ndarray:
    """Eigenvalues on the n-1 interior nodes of n cells with zero end values."""
    k = np.arange(1, n)
    return (2.0 - 2.0 * np.cos(np.pi * k / n)) / h**2


def _lam_cell_neumann(n: int, h: float) -> np.ndarray:
    """Eigenvalues with reflection ghosts; the k=0 constant mode is null."""
    k = np.arange(n)
    return (2.0 - 2.0 * np.cos(np.pi * k / n)) / h**2


def _dst2_2d(a: np.ndarray) -> np.ndarray:
    return sfft.dst(sfft.dst(a, type=2, axis=0, norm="ortho"), type=2, axis=1, norm="ortho")


def _idst2_2d(a: np.ndarray) -> np.ndarray:
    return sfft.dst(sfft.dst(a, type=3, axis=0, norm="ortho"), type=3, axis=1, norm="ortho")


def _dct2_2d(a: np.ndarray) -> np.ndarray:
    return sfft.dct(sfft.dct(a, type=2, axis=0, norm="ortho"), type=2, axis=1, norm="ortho")


def _idct2_2d(a: np.ndarray) -> np.ndarray:
    return sfft.dct(sfft.dct(a, type=3, axis=0, norm="ortho"), type=3, axis=1, norm="ortho")


def solve_cell_dirichlet(rhs: np.ndarray, h: float) -> np.ndarray:
    """Solve -Lap f = rhs on cell centers with zero wall values (anti-reflection ghosts)."""
    nx, ny = rhs.shape
    lam = _lam_cell_dirichlet(nx, h)[:, None] + _lam_cell_dirichlet(ny, h)[None, :]
    return _idst2_2d(_dst2_2d(rhs) / lam)


def solve_cell_neumann(rhs: np.ndarray, h: float) -> np.ndarray:
    """Solve -Lap f = rhs with homogeneous Neumann walls; returns the zero-mean solution.

    The constant null mode is removed in transform space, which silently
    projects an incompatible right-hand side; callers wanting the projection
    magnitude measure it beforehand.
    """
    nx, ny = rhs.shape
    lam = _lam_cell_neumann(nx, h)[:, None] + _lam_cell_neumann(ny, h)[None, :]
    coef = _dct2_2d(rhs)
    coef[0, 0] = 0.0
    lam[0, 0] = 1.0
    return _idct2_2d(coef / lam)


def apply_neg_lap_cell_dirichlet(f: np.ndarray, h: float) -> np.ndarray:
    p = np.pad(f, 1, mode="empty")
    p[0, 1:-1] = -f[0, :]
    p[-1, 1:-1] = -f[-1, :]
    p[1:-1, 0] = -f[:, 0]
    p[1:-1, -1] = -f[:, -1]
    return (4.0 * f - p[:-2, 1:-1] - p[2:, 1:-1] - p[1:-1, :-2] - p[1:-1, 2:]) / h**2


def apply_neg_lap_cell_neumann(f: np.ndarray, h: float) -> np.ndarray:
    p = np.pad(f, 1, mode="edge")
    return (4.0 * f - p[:-2, 1:-1] - p[2:, 1:-1] - p[1:-1, :-2] - p[1:-1, 2:]) / h**2


def _helmholtz_face(interior: np.ndarray, lam_x: np.ndarray, lam_y: np.ndarray,
                    mass: float, visc: float, axis_types: tuple[int, int]) -> np.ndarray:
    """Solve (mass*I + visc*(-Lap)) on a face-interior block, mixed DST types per axis."""
    tx, ty = axis_types
    a = sfft.dst(interior, type=tx, axis=0, norm="ortho")
    a = sfft.dst(a, type=ty, axis=1, norm="ortho")
    a /= mass + visc * (lam_x[:, None] + lam_y[None, :])
    inv_tx = 1 if tx == 1 else 3
    inv_ty = 1 if ty == 1 else 3
    a = sfft.dst(a, type=inv_ty, axis=1, norm="ortho")
    return sfft.dst(a, type=inv_tx, axis=0, norm="ortho")


def solve_ux_helmholtz(rhs_interior: np.ndarray, h: float, mass: float = 0.0,
                       visc: float = 1.0) -> np.ndarray:
    """Solve (mass*I + visc*(-Lap)) ux = rhs on interior vertical faces.

    rhs has shape (nx-1, ny): x is node-Dirichlet (DST-I), y is
    cell-Dirichlet via anti-reflection (DST-II).
    """
    m, ny = rhs_interior.shape
    nx = m + 1
    lam_x = _lam_node_dirichlet(nx, h)
    lam_y = _lam_cell_dirichlet(ny, h)
    return _helmholtz_face(rhs_interior, lam_x, lam_y, mass, visc, (1, 2))


def solve_uy_helmholtz(rhs_interior: np.ndarray, h: float, mass: float = 0.0,
                       visc: float = 1.0) -> np.ndarray:
    """Same as solve_ux_helmholtz for horizontal faces; rhs shape (nx, ny-1)."""
    nx, m = rhs_interior.shape
    ny = m + 1
    lam_x = _lam_cell_dirichlet(nx, h)
    lam_y = _lam_node_dirichlet(ny, h)
    return _helmholtz_face(rhs_interior, lam_x, lam_y, mass, visc, (2, 1))

"""Rectangular MAC-staggered grid and its discrete differential operators.

Scalars (micro-rotation, pressure, vorticity) live at cell centers,
velocity components on cell faces: ux on vertical faces, uy on horizontal
faces.  This staggering makes the discrete divergence of a discrete curl
vanish identically, which the projection step and several audits rely on.

Index convention: arr[i, j] with i along x and j along y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

MIN_CELLS = 8
_SQUARE_RTOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Uniform square-cell grid covering [0, lx] x [0, ly]."""

    nx: int
    ny: int
    lx: float
    ly: float
    h: float

    @property
    def area(self) -> float:
        return self.lx * self.ly

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid (ij indexing) of cell-center coordinates."""
        x = (np.arange(self.nx) + 0.5) * self.h
        y = (np.arange(self.ny) + 0.5) * self.h
        return np.meshgrid(x, y, indexing="ij")

    def node_coords(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.nx + 1) * self.h
        y = np.arange(self.ny + 1) * self.h
        return np.meshgrid(x, y, indexing="ij")

    def ux_coords(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.nx + 1) * self.h
        y = (np.arange(self.ny) + 0.5) * self.h
        return np.meshgrid(x, y, indexing="ij")

    def uy_coords(self) -> tuple[np.ndarray, np.ndarray]:
        x = (np.arange(self.nx) + 0.5) * self.h
        y = np.arange(self.ny + 1) * self.h
        return np.meshgrid(x, y, indexing="ij")


def make_grid(nx: int, ny: int, lx: float, ly: float) -> GridSpec:
    """Validate and build a GridSpec.  Cells must be square to 1e-12 relative."""
    if nx < MIN_CELLS or ny < MIN_CELLS:
        raise ConfigurationError(f"grid too coarse: need nx, ny >= {MIN_CELLS}, got {nx} x {ny}")
    if lx <= 0 or ly <= 0:
        raise ConfigurationError(f"domain lengths must be positive, got lx={lx}, ly={ly}")
    hx = lx / nx
    hy = ly / ny
    if abs(hx - hy) > _SQUARE_RTOL * max(hx, hy):
        raise ConfigurationError(f"non-square cells: lx/nx = {hx!r} but ly/ny = {hy!r}")
    return GridSpec(nx=nx, ny=ny, lx=float(lx), ly=float(ly), h=hx)


def _require_finite(name: str, *arrays: np.ndarray) -> None:
    for a in arrays:
        if not np.isfinite(a).all():
            raise FloatingPointError(f"{name} produced non-finite values")


class ScalarField:
    """Cell-centered scalar, shape (nx, ny)."""

    __slots__ = ("grid", "data")

    def __init__(self, grid: GridSpec, data: np.ndarray):
        data = np.asarray(data, dtype=np.float64)
        if data.shape != (grid.nx, grid.ny):
            raise ValueError(f"scalar data shape {data.shape} != {(grid.nx, grid.ny)}")
        self.grid = grid
        self.data = data

    @classmethod
    def zeros(cls, grid: GridSpec) -> "ScalarField":
        return cls(grid, np.zeros((grid.nx, grid.ny)))

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> "ScalarField":
        x, y = grid.cell_centers()
        return cls(grid, np.asarray(fn(x, y), dtype=np.float64))

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.data.copy())

    def mean(self) -> float:
        return float(self.data.mean())

    def __add__(self, other: "ScalarField") -> "ScalarField":
        return ScalarField(self.grid, self.data + other.data)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        return ScalarField(self.grid, self.data - other.data)

    def __mul__(self, a: float) -> "ScalarField":
        return ScalarField(self.grid, self.data * a)

    __rmul__ = __mul__


class VelocityField:
    """Face-staggered velocity: ux (nx+1, ny) on vertical faces, uy (nx, ny+1) on horizontal."""

    __slots__ = ("grid", "ux", "uy")

    def __init__(self, grid: GridSpec, ux: np.ndarray, uy: np.ndarray):
        ux = np.asarray(ux, dtype=np.float64)
        uy = np.asarray(uy, dtype=np.float64)
        if ux.shape != (grid.nx + 1, grid.ny):
            raise ValueError(f"ux shape {ux.shape} != {(grid.nx + 1, grid.ny)}")
        if uy.shape != (grid.nx, grid.ny + 1):
            raise ValueError(f"uy shape {uy.shape} != {(grid.nx, grid.ny + 1)}")
        self.grid = grid
        self.ux = ux
        self.uy = uy

    @classmethod
    def zeros(cls, grid: GridSpec) -> "VelocityField":
        return cls(grid, np.zeros((grid.nx + 1, grid.ny)), np.zeros((grid.nx, grid.ny + 1)))

    @classmethod
    def from_functions(cls, grid: GridSpec, fx, fy) -> "VelocityField":
        xu, yu = grid.ux_coords()
        xv, yv = grid.uy_coords()
        return cls(grid, np.asarray(fx(xu, yu), float), np.asarray(fy(xv, yv), float))

    @classmethod
    def from_streamfunction(cls, grid: GridSpec, psi) -> "VelocityField":
        """Discrete curl of a node-sampled streamfunction: exactly divergence-free.

        A streamfunction vanishing on the boundary yields an exactly no-slip
        normal trace as well.
        """
        xn, yn = grid.node_coords()
        pn = np.asarray(psi(xn, yn), dtype=np.float64)
        ux = -(pn[:, 1:] - pn[:, :-1]) / grid.h
        uy = (pn[1:, :] - pn[:-1, :]) / grid.h
        return cls(grid, ux, uy)

    def copy(self) -> "VelocityField":
        return VelocityField(self.grid, self.ux.copy(), self.uy.copy())

    def max_speed(self) -> float:
        mx = float(np.abs(self.ux).max()) if self.ux.size else 0.0
        my = float(np.abs(self.uy).max()) if self.uy.size else 0.0
        return max(mx, my)

    def boundary_normal_max(self) -> float:
        """Largest |u.n| on the four walls (exact zero means no-slip normal trace)."""
        return max(
            float(np.abs(self.ux[0, :]).max()),
            float(np.abs(self.ux[-1, :]).max()),
            float(np.abs(self.uy[:, 0]).max()),
            float(np.abs(self.uy[:, -1]).max()),
        )

    def zero_boundary_faces(self) -> None:
        self.ux[0, :] = 0.0
        self.ux[-1, :] = 0.0
        self.uy[:, 0] = 0.0
        self.uy[:, -1] = 0.0

    def __add__(self, other: "VelocityField") -> "VelocityField":
        return VelocityField(self.grid, self.ux + other.ux, self.uy + other.uy)

    def __sub__(self, other: "VelocityField") -> "VelocityField":
        return VelocityField(self.grid, self.ux - other.ux, self.uy - other.uy)

    def __mul__(self, a: float) -> "VelocityField":
        return VelocityField(self.grid, self.ux * a, self.uy * a)

    __rmul__ = __mul__


def extend_scalar(w: ScalarField, order: int = 1) -> np.ndarray:
    """Pad cell data with a one-cell ghost halo by one-sided extrapolation.

    order 1: linear (2a - b), order 3: cubic (4a - 6b + 4c - d).  Corners are
    filled from the two adjacent edge ghosts.
    """
    d = w.data
    ext = np.empty((d.shape[0] + 2, d.shape[1] + 2))
    ext[1:-1, 1:-1] = d
    if order == 1:
        ext[0, 1:-1] = 2.0 * d[0, :] - d[1, :]
        ext[-1, 1:-1] = 2.0 * d[-1, :] - d[-2, :]
        ext[1:-1, 0] = 2.0 * d[:, 0] - d[:, 1]
        ext[1:-1, -1] = 2.0 * d[:, -1] - d[:, -2]
    elif order == 3:
        ext[0, 1:-1] = 4.0 * d[0, :] - 6.0 * d[1, :] + 4.0 * d[2, :] - d[3, :]
        ext[-1, 1:-1] = 4.0 * d[-1, :] - 6.0 * d[-2, :] + 4.0 * d[-3, :] - d[-4, :]
        ext[1:-1, 0] = 4.0 * d[:, 0] - 6.0 * d[:, 1] + 4.0 * d[:, 2] - d[:, 3]
        ext[1:-1, -1] = 4.0 * d[:, -1] - 6.0 * d[:, -2] + 4.0 * d[:, -3] - d[:, -4]
    else:
        raise ValueError(f"unsupported extrapolation order {order}")
    for (ci, ei), (cj, ej) in (((0, 1), (0, 1)), ((0, 1), (-1, -2)), ((-1, -2), (0, 1)), ((-1, -2), (-1, -2))):
        ext[ci, cj] = ext[ei, cj] + ext[ci, ej] - ext[ei, ej]
    return ext


def divergence(u: VelocityField) -> ScalarField:
    """Cell-centered discrete divergence (exact flux balance on the MAC grid)."""
    h = u.grid.h
    d = (u.ux[1:, :] - u.ux[:-1, :]) / h + (u.uy[:, 1:] - u.uy[:, :-1]) / h
    _require_finite("divergence", d)
    return ScalarField(u.grid, d)


def node_average(w: ScalarField, order: int = 1) -> np.ndarray:
    """Scalar interpolated to grid nodes, (nx+1, ny+1), using ghost extrapolation at walls."""
    ext = extend_scalar(w, order=order)
    return 0.25 * (ext[:-1, :-1] + ext[1:, :-1] + ext[:-1, 1:] + ext[1:, 1:])


def perp_gradient(w: ScalarField) -> VelocityField:
    """Face-valued rotated gradient (-d_y w, d_x w).

    Built by differencing the node-interpolated scalar, so the result is
    exactly divergence-free for any input; this is also the divergence-form
    right-hand side used by the Stokes solves (one difference of w total).
    """
    g = w.grid
    wn = node_average(w, order=1)
    ux = -(wn[:, 1:] - wn[:, :-1]) / g.h
    uy = (wn[1:, :] - wn[:-1, :]) / g.h
    _require_finite("perp_gradient", ux, uy)
    return VelocityField(g, ux, uy)


def _d_along(arr: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Cell-centered first derivative: centered inside, one-sided second-order at walls."""
    out = np.empty_like(arr)
    a = np.moveaxis(arr, axis, 0)
    o = np.moveaxis(out, axis, 0)
    o[1:-1] = (a[2:] - a[:-2]) / (2.0 * h)
    o[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * h)
    o[-1] = (3.0 * a[-1] - 4.0 * a[-2] + a[-3]) / (2.0 * h)
    return out


def cell_components(u: VelocityField) -> tuple[np.ndarray, np.ndarray]:
    """Velocity components averaged to cell centers."""
    uxc = 0.5 * (u.ux[:-1, :] + u.ux[1:, :])
    uyc = 0.5 * (u.uy[:, :-1] + u.uy[:, 1:])
    return uxc, uyc


def cell_gradient(data: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """(d_x, d_y) of a cell-centered array, second-order everywhere."""
    return _d_along(data, 0, h), _d_along(data, 1, h)


def perp_divergence(u: VelocityField) -> ScalarField:
    """Cell-centered scalar vorticity d_x uy - d_y ux."""
    g = u.grid
    uxc, uyc = cell_components(u)
    phi = _d_along(uyc, 0, g.h) - _d_along(uxc, 1, g.h)
    _require_finite("perp_divergence", phi)
    return ScalarField(g, phi)


def laplacian(w: ScalarField) -> ScalarField:
    """5-point scalar Laplacian; cubic ghost extrapolation keeps boundary cells second-order."""
    g = w.grid
    ext = extend_scalar(w, order=3)
    lap = (
        ext[:-2, 1:-1] + ext[2:, 1:-1] + ext[1:-1, :-2] + ext[1:-1, 2:] - 4.0 * ext[1:-1, 1:-1]
    ) / g.h**2
    _require_finite("laplacian", lap)
    return ScalarField(g, lap)


def _neg_laplacian_ux(ux: np.ndarray, h: float) -> np.ndarray:
    """-Laplacian of the ux component under no-slip.

    x direction sees the boundary-face values directly (Dirichlet nodes);
    y direction uses anti-reflection ghosts (zero wall value).  This is the
    exact operator the fast face solvers invert; output boundary faces are 0.
    """
    p = np.empty((ux.shape[0], ux.shape[1] + 2))
    p[:, 1:-1] = ux
    p[:, 0] = -ux[:, 0]
    p[:, -1] = -ux[:, -1]
    out = np.zeros_like(ux)
    out[1:-1, :] = (
        4.0 * p[1:-1, 1:-1] - p[:-2, 1:-1] - p[2:, 1:-1] - p[1:-1, :-2] - p[1:-1, 2:]
    ) / h**2
    return out


def _neg_laplacian_uy(uy: np.ndarray, h: float) -> np.ndarray:
    p = np.empty((uy.shape[0] + 2, uy.shape[1]))
    p[1:-1, :] = uy
    p[0, :] = -uy[0, :]
    p[-1, :] = -uy[-1, :]
    out = np.zeros_like(uy)
    out[:, 1:-1] = (
        4.0 * p[1:-1, 1:-1] - p[:-2, 1:-1] - p[2:, 1:-1] - p[1:-1, :-2] - p[1:-1, 2:]
    ) / h**2
    return out


def laplacian_vec(u: VelocityField) -> VelocityField:
    """Vector Laplacian on interior faces with no-slip ghosts (boundary faces zero).

    Matches the operator inverted by the viscous/Stokes solvers, so scheme
    residual audits close at the discrete level.
    """
    g = u.grid
    lx = -_neg_laplacian_ux(u.ux, g.h)
    ly = -_neg_laplacian_uy(u.uy, g.h)
    _require_finite("laplacian_vec", lx, ly)
    return VelocityField(g, lx, ly)


def grad_scalar_on_faces(p: ScalarField) -> VelocityField:
    """Discrete gradient of a cell scalar onto interior faces (boundary faces zero)."""
    g = p.grid
    gx = np.zeros((g.nx + 1, g.ny))
    gy = np.zeros((g.nx, g.ny + 1))
    gx[1:-1, :] = (p.data[1:, :] - p.data[:-1, :]) / g.h
    gy[:, 1:-1] = (p.data[:, 1:] - p.data[:, :-1]) / g.h
    return VelocityField(g, gx, gy)


def convective_derivative(advected: VelocityField, advecting: VelocityField) -> VelocityField:
    """(advecting . grad) advected on interior faces, second-order centered.

    Transverse components are interpolated from the four surrounding faces;
    wall-tangential derivatives use anti-reflection ghosts (no-slip wall).
    Boundary faces of the result are zero.
    """
    g = advected.grid
    h = g.h
    out = VelocityField.zeros(g)

    ux, uy = advected.ux, advected.uy
    ax, ay = advecting.ux, advecting.uy

    # x-component at interior vertical faces
    dxu = (ux[2:, :] - ux[:-2, :]) / (2.0 * h)
    p = np.empty((g.nx + 1, g.ny + 2))
    p[:, 1:-1] = ux
    p[:, 0] = -ux[:, 0]
    p[:, -1] = -ux[:, -1]
    dyu = (p[1:-1, 2:] - p[1:-1, :-2]) / (2.0 * h)
    ay_at_ux = 0.25 * (ay[:-1, :-1] + ay[1:, :-1] + ay[:-1, 1:] + ay[1:, 1:])
    out.ux[1:-1, :] = ax[1:-1, :] * dxu + ay_at_ux * dyu

    # y-component at interior horizontal faces
    dyv = (uy[:, 2:] - uy[:, :-2]) / (2.0 * h)
    p = np.empty((g.nx + 2, g.ny + 1))
    p[1:-1, :] = uy
    p[0, :] = -uy[0, :]
    p[-1, :] = -uy[-1, :]
    dxv = (p[2:, 1:-1] - p[:-2, 1:-1]) / (2.0 * h)
    ax_at_uy = 0.25 * (ax[:-1, :-1] + ax[1:, :-1] + ax[:-1, 1:] + ax[1:, 1:])
    out.uy[:, 1:-1] = ay[:, 1:-1] * dyv + ax_at_uy * dxv

    _require_finite("convective_derivative", out.ux, out.uy)
    return out


def scalar_on_ux_faces(w: ScalarField) -> np.ndarray:
    """Cell scalar averaged to vertical faces; boundary faces by linear extrapolation."""
    out = np.empty((w.grid.nx + 1, w.grid.ny))
    out[1:-1, :] = 0.5 * (w.data[1:, :] + w.data[:-1, :])
    out[0, :] = 1.5 * w.data[0, :] - 0.5 * w.data[1, :]
    out[-1, :] = 1.5 * w.data[-1, :] - 0.5 * w.data[-2, :]
    return out


def scalar_on_uy_faces(w: ScalarField) -> np.ndarray:
    out = np.empty((w.grid.nx, w.grid.ny + 1))
    out[:, 1:-1] = 0.5 * (w.data[:, 1:] + w.data[:, :-1])
    out[:, 0] = 1.5 * w.data[:, 0] - 0.5 * w.data[:, 1]
    out[:, -1] = 1.5 * w.data[:, -1] - 0.5 * w.data[:, -2]
    return out

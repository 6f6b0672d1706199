"""Shared fixtures: grids, manufactured solutions, and symbolic oracles."""

import numpy as np
import pytest
import sympy as sp

from micropol.grid import ScalarField, VelocityField, make_grid
from micropol.micropolar import FluidParams, SimState


@pytest.fixture(scope="session")
def grid32():
    return make_grid(32, 32, 1.0, 1.0)


@pytest.fixture(scope="session")
def grid64():
    return make_grid(64, 64, 1.0, 1.0)


@pytest.fixture(scope="session")
def params():
    return FluidParams(nu=0.1, kappa=0.1)


def vortex_state(grid, scale_u=0.3, scale_w=1.0):
    u = VelocityField.from_streamfunction(
        grid, lambda x, y: scale_u * np.sin(np.pi * x) ** 2 * np.sin(np.pi * y) ** 2)
    w = ScalarField.from_function(
        grid, lambda x, y: scale_w * np.sin(np.pi * x) * np.sin(np.pi * y))
    return SimState(0.0, 0, u, w)


class StokesOracle:
    """Symbolically derived manufactured solution for the Stokes systems.

    u* = curl(sin^2(pi x) sin^2(pi y)), p* = cos(pi x) cos(pi y); forcing
    terms are lambdified once per session.
    """

    def __init__(self):
        x, y = sp.symbols("x y")
        psi = sp.sin(sp.pi * x) ** 2 * sp.sin(sp.pi * y) ** 2
        ux = -sp.diff(psi, y)
        uy = sp.diff(psi, x)
        p = sp.cos(sp.pi * x) * sp.cos(sp.pi * y)

        def lap(f):
            return sp.diff(f, x, 2) + sp.diff(f, y, 2)

        self.ux = sp.lambdify((x, y), ux, "numpy")
        self.uy = sp.lambdify((x, y), uy, "numpy")
        self.fx = sp.lambdify((x, y), -lap(ux) + sp.diff(p, x), "numpy")
        self.fy = sp.lambdify((x, y), -lap(uy) + sp.diff(p, y), "numpy")
        # unsteady: u(t) = exp(-t) u*, f = du/dt - visc lap u + grad p
        self._sym = (x, y, ux, uy, p, lap)

    def forcing(self, grid):
        return VelocityField.from_functions(grid, self.fx, self.fy)

    def exact(self, grid):
        return VelocityField.from_functions(grid, self.ux, self.uy)

    def unsteady_forcing_at(self, grid, t, visc):
        x, y, ux, uy, p, lap = self._sym
        e = sp.exp(-t)
        fx = sp.lambdify((x, y), -e * ux - visc * e * lap(ux) + sp.diff(p, x), "numpy")
        fy = sp.lambdify((x, y), -e * uy - visc * e * lap(uy) + sp.diff(p, y), "numpy")
        return VelocityField.from_functions(grid, fx, fy)


@pytest.fixture(scope="session")
def stokes_oracle():
    return StokesOracle()

"""Named initial-condition builders shared by the CLI and the test suite."""

from __future__ import annotations

import numpy as np

from .grid import GridSpec, ScalarField, VelocityField
from .micropolar import SimState


def vortex_velocity(grid: GridSpec, scale: float) -> VelocityField:
    """Discrete curl of scale * sin^2(pi x/lx) sin^2(pi y/ly): no-slip and
    exactly divergence-free on the staggered grid."""
    return VelocityField.from_streamfunction(
        grid,
        lambda x, y: scale * np.sin(np.pi * x / grid.lx) ** 2 * np.sin(np.pi * y / grid.ly) ** 2,
    )


def spin_scalar(grid: GridSpec, scale: float) -> ScalarField:
    return ScalarField.from_function(
        grid, lambda x, y: scale * np.sin(np.pi * x / grid.lx) * np.sin(np.pi * y / grid.ly))


def stokes_mms_exact(grid: GridSpec) -> VelocityField:
    """Exact velocity of the stationary manufactured problem on the unit square."""
    pi = np.pi
    return VelocityField.from_functions(
        grid,
        lambda x, y: -pi * np.sin(pi * x) ** 2 * np.sin(2 * pi * y),
        lambda x, y: pi * np.sin(2 * pi * x) * np.sin(pi * y) ** 2,
    )


def stokes_mms_forcing(grid: GridSpec) -> VelocityField:
    """f = -Lap u* + grad p* for u* the rotating cell and p* = cos(pi x) cos(pi y).

    Closed form (checked symbolically in the test suite), unit square only.
    """
    pi = np.pi

    def fx(x, y):
        return ((2 * pi**3 * np.cos(2 * pi * x) - 4 * pi**3 * np.sin(pi * x) ** 2)
                * np.sin(2 * pi * y) - pi * np.sin(pi * x) * np.cos(pi * y))

    def fy(x, y):
        return ((4 * pi**3 * np.sin(pi * y) ** 2 - 2 * pi**3 * np.cos(2 * pi * y))
                * np.sin(2 * pi * x) - pi * np.cos(pi * x) * np.sin(pi * y))

    return VelocityField.from_functions(grid, fx, fy)


def build_initial_state(grid: GridSpec, name: str, scale_u: float, scale_w: float) -> SimState:
    """Construct the named manufactured initial state.

    zero: both fields zero; vortex: rotating cell plus micro-rotation;
    spin: micro-rotation only (velocity spun up through the coupling).
    """
    if name == "zero":
        return SimState(0.0, 0, VelocityField.zeros(grid), ScalarField.zeros(grid))
    if name == "vortex":
        return SimState(0.0, 0, vortex_velocity(grid, scale_u), spin_scalar(grid, scale_w))
    if name == "spin":
        return SimState(0.0, 0, VelocityField.zeros(grid), spin_scalar(grid, scale_w))
    raise ValueError(f"unknown initial condition {name!r}")

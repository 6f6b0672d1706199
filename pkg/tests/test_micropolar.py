import math

import numpy as np
import pytest

from micropol.analysis import lp_norm
from micropol.errors import CflCollapseError, StepSizeError
from micropol.grid import ScalarField, VelocityField, divergence, make_grid, perp_gradient
from micropol.micropolar import (
    DtPolicy,
    FluidParams,
    SimState,
    advect_w,
    check_compatibility,
    momentum_step,
    run,
    step,
)
from micropol.stokes import leray_project

from conftest import vortex_state


def test_fluid_params_validation():
    with pytest.raises(ValueError):
        FluidParams(nu=0.0, kappa=0.1)
    with pytest.raises(ValueError):
        FluidParams(nu=0.1, kappa=-0.1)
    assert FluidParams(nu=0.1, kappa=0.0).total_visc == pytest.approx(0.1)


# ---------------------------------------------------------------------------
# compatibility

def test_compatibility_zero_data(grid32, params):
    rep = check_compatibility(VelocityField.zeros(grid32), ScalarField.zeros(grid32), params)
    assert rep.div_defect == 0.0
    assert rep.wall_trace_defect == 0.0
    assert rep.momentum_defect == 0.0
    assert rep.projection_magnitude == 0.0


def test_compatibility_noslip_vortex(grid64, params):
    state = vortex_state(grid64, scale_u=1.0, scale_w=0.0)
    rep = check_compatibility(state.u, state.w, params)
    assert rep.div_defect <= 1e-10
    assert rep.wall_trace_defect <= 1e-10
    assert np.isfinite(rep.momentum_defect)  # recorded, not asserted


def test_compatibility_nonzero_wall_trace(grid64, params):
    # u = (x, -y): divergence-free, wall-normal trace nonzero
    u = VelocityField.from_functions(grid64, lambda x, y: x, lambda x, y: -y)
    rep = check_compatibility(u, ScalarField.zeros(grid64), params)
    # analytic boundary L2 of u.n: east wall x=1 gives 1, west 0;
    # north/south give |y|=1 resp 0 -> sqrt(2)
    assert rep.wall_trace_defect == pytest.approx(math.sqrt(2.0), rel=2e-2)


# ---------------------------------------------------------------------------
# transport

def test_advect_zero_velocity_kappa0(grid32):
    p0 = FluidParams(nu=0.1, kappa=0.0)
    w = ScalarField.from_function(grid32, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    w1 = advect_w(w, VelocityField.zeros(grid32), p0, dt=0.02)
    assert np.array_equal(w1.data, w.data)


def test_advect_pure_damping_exact(grid32, params):
    w = ScalarField.from_function(grid32, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    dt = 0.02
    w1 = advect_w(w, VelocityField.zeros(grid32), params, dt=dt)
    assert np.abs(w1.data - math.exp(-4 * params.kappa * dt) * w.data).max() <= 1e-15


def test_advect_cfl_guard(grid32, params):
    u = VelocityField.zeros(grid32)
    u.ux[:] = 10.0
    w = ScalarField.zeros(grid32)
    with pytest.raises(StepSizeError):
        advect_w(w, u, params, dt=0.1)


def _rotation_about_center(grid, omega=1.0):
    return VelocityField.from_functions(
        grid, lambda x, y: -omega * (y - 0.5), lambda x, y: omega * (x - 0.5))


def test_advect_rotation_monotone_and_l2_conserving():
    # rigid rotation of an interior bump; kappa = 0 so the step is pure transport
    p0 = FluidParams(nu=0.1, kappa=0.0)
    results = {}
    for n in (64, 128):
        g = make_grid(n, n, 1.0, 1.0)
        u = _rotation_about_center(g)
        w = ScalarField.from_function(
            g, lambda x, y: np.exp(-((x - 0.5) ** 2 + (y - 0.6) ** 2) / (2 * 0.05**2)))
        dt = 0.9 * g.h / u.max_speed()
        n_steps = int(round(0.5 / dt))
        linf0, l20 = lp_norm(w, math.inf), lp_norm(w, 2)
        wl = w.copy()
        for _ in range(n_steps):
            wl = advect_w(wl, u, p0, dt, interp="linear")
            assert lp_norm(wl, math.inf) <= linf0 * (1 + 1e-13)
        wc = w.copy()
        for _ in range(n_steps):
            wc = advect_w(wc, u, p0, dt, interp="cubic")
        results[n] = abs(lp_norm(wc, 2) - l20) / (n_steps * dt)
    # cubic transport: L2 drift per unit time shrinks at least second order
    assert results[64] <= 0.1
    assert results[64] / results[128] >= 3.0


# ---------------------------------------------------------------------------
# momentum

def test_momentum_zero_state(grid32, params):
    z = SimState(0.0, 0, VelocityField.zeros(grid32), ScalarField.zeros(grid32))
    res = momentum_step(z, params, 0.01)
    assert res.velocity.max_speed() == 0.0


def _spinup_rel(grid, params, w, dt):
    state = SimState(0.0, 0, VelocityField.zeros(grid), w)
    u1 = momentum_step(state, params, dt).velocity
    target, _ = leray_project(-2.0 * params.kappa * dt * perp_gradient(w))
    return lp_norm(u1 - target, 2) / lp_norm(target, 2)


def test_momentum_spinup_taylor(grid64, params):
    # from rest: one step is -2 kappa dt P(perp_grad w) + higher order
    w = ScalarField.from_function(grid64, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    assert _spinup_rel(grid64, params, w, 0.002) <= 150.0 * 0.002
    # a profile whose rotated gradient vanishes on the walls avoids the
    # viscous boundary layer and shows the clean first-order rate
    w = ScalarField.from_function(
        grid64, lambda x, y: 0.25 * (1 - np.cos(2 * np.pi * x)) * (1 - np.cos(2 * np.pi * y)))
    r4 = _spinup_rel(grid64, params, w, 0.004)
    r2 = _spinup_rel(grid64, params, w, 0.002)
    assert r4 <= 30.0 * 0.004
    assert r4 / r2 >= 1.6


def test_momentum_divergence_free(grid32, params):
    state = vortex_state(grid32)
    u1 = momentum_step(state, params, 0.005).velocity
    assert grid32.h * np.linalg.norm(divergence(u1).data) <= 1e-8
    assert u1.boundary_normal_max() == 0.0


# ---------------------------------------------------------------------------
# coupled stepping

def test_step_zero_state(grid32, params):
    z = SimState(0.0, 0, VelocityField.zeros(grid32), ScalarField.zeros(grid32))
    s1 = step(z, params, 0.01)
    assert s1.u.max_speed() == 0.0
    assert np.all(s1.w.data == 0.0)
    assert s1.t == pytest.approx(0.01)
    assert s1.step == 1


def test_step_kappa_zero_decouples_bitwise(grid32):
    p0 = FluidParams(nu=0.1, kappa=0.0)
    with_w = vortex_state(grid32, scale_u=0.3, scale_w=1.0)
    without_w = vortex_state(grid32, scale_u=0.3, scale_w=0.0)
    a, b = with_w, without_w
    for _ in range(5):
        a = step(a, p0, 0.005)
        b = step(b, p0, 0.005)
        assert np.array_equal(a.u.ux, b.u.ux)
        assert np.array_equal(a.u.uy, b.u.uy)


def test_step_richardson_splitting_order(grid32, params):
    # two half steps vs one full step differ at O(dt^2)
    state = vortex_state(grid32)
    diffs = []
    for dt in (0.01, 0.005):
        full = step(state, params, dt)
        half = step(step(state, params, dt / 2), params, dt / 2)
        diffs.append(lp_norm(full.u - half.u, 2) + lp_norm(full.w - half.w, 2))
    assert diffs[0] / diffs[1] >= 3.0


# ---------------------------------------------------------------------------
# run driver

def test_run_time_zero_echoes(grid32, params):
    state = vortex_state(grid32)
    res = run(state, params, 0.0)
    assert res.final_state.t == 0.0
    assert np.array_equal(res.final_state.u.ux, state.u.ux)
    assert len(res.records) == 1


def test_run_zero_ic_all_zero_diagnostics(grid32, params):
    z = SimState(0.0, 0, VelocityField.zeros(grid32), ScalarField.zeros(grid32))
    res = run(z, params, 0.1, policy=DtPolicy(dt_max=0.02), diag_interval=0.05)
    for rec in res.records:
        assert rec.l2_u == 0.0
        assert rec.l2_w == 0.0
        assert rec.energy_defect == 0.0
        assert rec.g_residual == 0.0


def test_run_deterministic(grid32, params):
    state = vortex_state(grid32)
    r1 = run(state, params, 0.05, policy=DtPolicy(dt_max=0.005), diag_interval=0.02)
    r2 = run(state, params, 0.05, policy=DtPolicy(dt_max=0.005), diag_interval=0.02)
    assert np.array_equal(r1.final_state.u.ux, r2.final_state.u.ux)
    assert np.array_equal(r1.final_state.w.data, r2.final_state.w.data)
    assert r1.records[-1] == r2.records[-1]


def test_run_lands_exactly_on_final_time(grid32, params):
    res = run(vortex_state(grid32), params, 0.037, policy=DtPolicy(dt_max=0.005))
    assert res.final_state.t == pytest.approx(0.037, abs=1e-12)


def test_run_divergence_free_every_step(grid32, params):
    res = run(vortex_state(grid32), params, 0.05, policy=DtPolicy(dt_max=0.005),
              record_states=True)
    for s in res.states:
        assert grid32.h * np.linalg.norm(divergence(s.u).data) <= 1e-8


def test_dt_floor_collapse():
    g = make_grid(32, 32, 1.0, 1.0)
    u = VelocityField.zeros(g)
    u.ux[:] = 1e8  # CFL-driven dt far below the floor
    state = SimState(0.0, 0, u, ScalarField.zeros(g))
    with pytest.raises(CflCollapseError) as err:
        run(state, FluidParams(0.1, 0.1), 1.0, policy=DtPolicy(dt_floor=1e-8))
    assert err.value.state is not None

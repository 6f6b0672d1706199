import math

import numpy as np
import pytest

from micropol.analysis import (
    LedgerEntry,
    band_limited_fields,
    energy_ledger,
    gn_audit,
    gronwall_envelopes,
    l4_ledger,
    lp_linf_ledger,
    lp_norm,
    sobolev_seminorm,
)
from micropol.grid import ScalarField, VelocityField, make_grid
from micropol.micropolar import DtPolicy, FluidParams, SimState, run

from conftest import vortex_state


def test_lp_norm_constant(grid64):
    w = ScalarField.from_function(grid64, lambda x, y: 0 * x + 2.5)
    for p in (1.0, 2.0, 4.0, 7.0):
        assert lp_norm(w, p) == pytest.approx(2.5, rel=1e-12)
    assert lp_norm(w, math.inf) == 2.5


def test_lp_norm_trig_exact_values(grid64):
    w = ScalarField.from_function(grid64, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    # integral of sin^2 sin^2 over the unit square is 1/4
    assert lp_norm(w, 2) == pytest.approx(0.5, abs=4.0 * grid64.h**2)
    # integral of sin^4 per axis is 3/8
    assert lp_norm(w, 4) == pytest.approx(math.sqrt(3.0 / 8.0), abs=4.0 * grid64.h**2)


def test_lp_norm_homogeneous(grid32):
    rng = np.random.default_rng(0)
    w = ScalarField(grid32, rng.standard_normal((32, 32)))
    for p in (1.0, 2.0, 4.0, math.inf):
        assert lp_norm(ScalarField(grid32, -3.0 * w.data), p) == pytest.approx(
            3.0 * lp_norm(w, p), rel=1e-13)


def test_lp_norm_holder_monotone(grid32):
    rng = np.random.default_rng(1)
    w = ScalarField(grid32, rng.standard_normal((32, 32)))
    norms = [lp_norm(w, p) for p in (1.0, 2.0, 4.0, 8.0, math.inf)]
    assert all(a <= b * (1 + 1e-12) for a, b in zip(norms, norms[1:]))


def test_lp_norm_rejects_bad_p(grid32):
    with pytest.raises(ValueError):
        lp_norm(ScalarField.zeros(grid32), 0.5)


def test_lp_norm_velocity_weights(grid32):
    u = VelocityField.zeros(grid32)
    u.ux[:] = 2.0
    assert lp_norm(u, 2) == pytest.approx(2.0, rel=1e-12)
    assert lp_norm(u, math.inf) == 2.0


def test_sobolev_seminorm_examples(grid64):
    c = ScalarField.from_function(grid64, lambda x, y: 0 * x + 1.0)
    assert sobolev_seminorm(c, 1, 2) == 0.0
    f = ScalarField.from_function(grid64, lambda x, y: x)
    assert sobolev_seminorm(f, 1, 2) == pytest.approx(1.0, abs=1e-12)
    s = ScalarField.from_function(grid64, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    assert sobolev_seminorm(s, 1, 2) == pytest.approx(np.pi / math.sqrt(2), abs=30 * grid64.h**2)


def test_sobolev_seminorm_rejects_order(grid32):
    with pytest.raises(ValueError):
        sobolev_seminorm(ScalarField.zeros(grid32), 3, 2)


def test_band_limited_fields_cross_grid_consistency():
    # same continuum field sampled on both grids: L2 norms agree to O(h^2)
    f64 = band_limited_fields(make_grid(64, 64, 1.0, 1.0), 5, 6, seed=9)
    f128 = band_limited_fields(make_grid(128, 128, 1.0, 1.0), 5, 6, seed=9)
    for a, b in zip(f64, f128):
        assert lp_norm(a, 2) == pytest.approx(lp_norm(b, 2), rel=1e-3)
        assert lp_norm(a, 2) > 0  # never the zero field


def test_gn_audit_ratios_finite_and_stable():
    res64 = gn_audit(make_grid(64, 64, 1.0, 1.0), count=60, kmax=8, seed=3)
    res128 = gn_audit(make_grid(128, 128, 1.0, 1.0), count=60, kmax=8, seed=3)
    for label, r in res64.max_ratios.items():
        assert np.isfinite(r) and r > 0
        drift = abs(r - res128.max_ratios[label]) / max(r, res128.max_ratios[label])
        assert drift <= 0.10, label


def test_energy_ledger_zero_trajectory(grid32, params):
    z = SimState(0.0, 0, VelocityField.zeros(grid32), ScalarField.zeros(grid32))
    entry = energy_ledger(z, z, params, 0.01)
    assert entry == LedgerEntry(0.0, 0.0, 0.0)
    entry = l4_ledger(z, z, params, 0.01)
    assert entry == LedgerEntry(0.0, 0.0, 0.0)


def test_energy_ledger_pure_damping(grid32, params):
    # u frozen at 0: w decays exactly, ledger defect is O(dt) quadrature only
    w0 = ScalarField.from_function(grid32, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    dt = 0.01
    decay = math.exp(-4.0 * params.kappa * dt)
    s0 = SimState(0.0, 0, VelocityField.zeros(grid32), w0)
    s1 = SimState(dt, 1, VelocityField.zeros(grid32), ScalarField(grid32, decay * w0.data))
    entry = energy_ledger(s0, s1, params, dt)
    assert entry.rhs == 0.0
    scale = 4.0 * params.kappa * lp_norm(w0, 2) ** 2
    assert abs(entry.defect) <= 2.0 * dt * scale


def test_l4_ledger_pure_damping(grid32, params):
    w0 = ScalarField.from_function(grid32, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    dt = 0.01
    decay = math.exp(-4.0 * params.kappa * dt)
    s0 = SimState(0.0, 0, VelocityField.zeros(grid32), w0)
    s1 = SimState(dt, 1, VelocityField.zeros(grid32), ScalarField(grid32, decay * w0.data))
    entry = l4_ledger(s0, s1, params, dt)
    scale = 4.0 * params.kappa * lp_norm(w0, 4) ** 4
    assert abs(entry.defect) <= 4.0 * dt * scale


def test_lp_linf_ledger_damping_only(grid32, params):
    # u held at zero (transport-only path): ||w||_q decays exactly like
    # exp(-4 k t) and the per-step inequality has zero violations
    from micropol.analysis import TrajectorySeries
    from micropol.grid import laplacian_vec
    from micropol.micropolar import advect_w

    w = ScalarField.from_function(grid32, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    zero_u = VelocityField.zeros(grid32)
    series = TrajectorySeries()
    series.append_instant(0.0, zero_u, w, zero_u, zero_u, laplacian_vec(zero_u))
    dt = 0.01
    s_prev = SimState(0.0, 0, zero_u, w)
    for k in range(10):
        w = advect_w(w, zero_u, params, dt)
        s_new = SimState((k + 1) * dt, k + 1, zero_u, w)
        series.append_instant(s_new.t, zero_u, w, zero_u, zero_u, laplacian_vec(zero_u))
        series.append_step(dt, energy_ledger(s_prev, s_new, params, dt),
                           l4_ledger(s_prev, s_new, params, dt))
        s_prev = s_new
    for rep in lp_linf_ledger(series, params):
        assert rep.violations == 0
        assert rep.majorant_violations == 0
    w2 = np.asarray(series.w_lq[2.0])
    t = np.asarray(series.t)
    assert np.allclose(w2, w2[0] * np.exp(-4 * params.kappa * t), rtol=1e-12)


def test_lp_linf_ledger_kappa_zero_monotone(grid32):
    p0 = FluidParams(nu=0.1, kappa=0.0)
    res = run(vortex_state(make_grid(32, 32, 1.0, 1.0)), p0, 0.1,
              policy=DtPolicy(dt_max=0.005), diag_interval=0.05, interp="linear")
    winf = np.asarray(res.series.linf_w)
    assert np.all(np.diff(winf) <= 1e-14)
    for rep in lp_linf_ledger(res.series, p0):
        assert rep.violations == 0


def test_gronwall_envelopes_reference_clean(grid32, params):
    res = run(vortex_state(make_grid(32, 32, 1.0, 1.0)), params, 0.2,
              policy=DtPolicy(dt_max=0.005), diag_interval=0.05, interp="cubic")
    env = gronwall_envelopes(res.series, params)
    assert env.violations_a1 == 0
    assert env.violations_a2 == 0
    assert np.all(env.envelope_a1[1:] >= env.tracked_a1[1:] * 0.95)


def test_gronwall_envelopes_flag_adversarial():
    # forced CFL 2.0 at weak viscosity: the explicit advection destabilizes
    # and the budgets fitted on the early steps get overrun
    from micropol.analysis import ledger_defect_check

    weak = FluidParams(nu=0.002, kappa=0.002)
    g = make_grid(64, 64, 1.0, 1.0)
    state = vortex_state(g, scale_u=1.0, scale_w=1.0)
    res = run(state, weak, 0.3, policy=DtPolicy(cfl_max=2.0, dt_max=0.05),
              diag_interval=0.1, interp="linear")
    env = gronwall_envelopes(res.series, weak)
    check = ledger_defect_check(res.series, weak)
    flagged = env.violations_a1 + env.violations_a2
    flagged += 0 if check.quartic_ok else 1
    flagged += 0 if check.energy_ok else 1
    assert flagged > 0

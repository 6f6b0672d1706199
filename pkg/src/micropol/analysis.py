"""Norms, interpolation-inequality audits, and per-step estimate ledgers.

Everything here is measurement: quadrature norms over fields, discrete
analogues of the energy and L4 budgets evaluated on consecutive states,
per-step differential-inequality checks for the micro-rotation, and the
exponential (Gronwall) envelopes whose constants are fitted from measured
slack rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .grid import (
    GridSpec,
    ScalarField,
    VelocityField,
    cell_components,
    cell_gradient,
)

_FLOOR = 1e-300


# ---------------------------------------------------------------------------
# quadrature norms

def _velocity_weights(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Cell-area weights per face; boundary normal faces own half cells."""
    wx = np.full((grid.nx + 1, grid.ny), grid.h**2)
    wx[0, :] *= 0.5
    wx[-1, :] *= 0.5
    wy = np.full((grid.nx, grid.ny + 1), grid.h**2)
    wy[:, 0] *= 0.5
    wy[:, -1] *= 0.5
    return wx, wy


def lp_norm(f: ScalarField | VelocityField, p: float) -> float:
    """Midpoint-rule L^p norm; grid max for p = inf.

    Velocity fields combine the two face components in the same l^p sense
    with face-weighted cells.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if isinstance(f, ScalarField):
        if math.isinf(p):
            return float(np.abs(f.data).max())
        return float((f.grid.h**2 * np.sum(np.abs(f.data) ** p)) ** (1.0 / p))
    if math.isinf(p):
        return f.max_speed()
    wx, wy = _velocity_weights(f.grid)
    total = np.sum(wx * np.abs(f.ux) ** p) + np.sum(wy * np.abs(f.uy) ** p)
    return float(total ** (1.0 / p))


def _lp_of_magnitude(mag: np.ndarray, h: float, p: float) -> float:
    if math.isinf(p):
        return float(mag.max())
    return float((h**2 * np.sum(mag**p)) ** (1.0 / p))


def _scalar_derivative_stack(data: np.ndarray, h: float, order: int) -> list[np.ndarray]:
    """All order-th nested cell-centered derivatives of a cell array."""
    stack = [data]
    for _ in range(order):
        nxt = []
        for a in stack:
            gx, gy = cell_gradient(a, h)
            nxt.extend((gx, gy))
        stack = nxt
    return stack


def _derivative_magnitude(f: ScalarField | VelocityField, order: int) -> tuple[np.ndarray, float]:
    """Pointwise Frobenius magnitude of the order-th derivative tensor at cell centers."""
    if isinstance(f, ScalarField):
        comps = _scalar_derivative_stack(f.data, f.grid.h, order)
        h = f.grid.h
    else:
        uxc, uyc = cell_components(f)
        comps = _scalar_derivative_stack(uxc, f.grid.h, order)
        comps += _scalar_derivative_stack(uyc, f.grid.h, order)
        h = f.grid.h
    sq = np.zeros_like(comps[0])
    for c in comps:
        sq += c**2
    return np.sqrt(sq), h


def sobolev_seminorm(f: ScalarField | VelocityField, order: int, p: float) -> float:
    """L^p norm of the order-th finite-difference derivative (order 1 or 2).

    Staggered velocities are interpolated to cell centers component-wise
    first, so one norm definition serves every ledger.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    mag, h = _derivative_magnitude(f, order)
    return _lp_of_magnitude(mag, h, p)


def h1_norm(f: ScalarField | VelocityField) -> float:
    return math.hypot(lp_norm(f, 2), sobolev_seminorm(f, 1, 2))


def l2_inner(a: ScalarField, b: ScalarField) -> float:
    return float(a.grid.h**2 * np.sum(a.data * b.data))


def face_inner(a: VelocityField, b: VelocityField) -> float:
    """Face-weighted L2 inner product of two staggered velocity fields."""
    wx, wy = _velocity_weights(a.grid)
    return float(np.sum(wx * a.ux * b.ux) + np.sum(wy * a.uy * b.uy))


# ---------------------------------------------------------------------------
# random band-limited ensembles (grid-independent continuum fields)

def band_limited_coefficients(count: int, kmax: int, seed: int) -> np.ndarray:
    """Sine-mode coefficients with a 1/|k|^2 spectral decay, drawn once per seed."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((count, kmax, kmax))
    k = np.arange(1, kmax + 1)
    decay = 1.0 / (k[:, None] ** 2 + k[None, :] ** 2)
    return a * decay


def band_limited_fields(grid: GridSpec, count: int, kmax: int, seed: int) -> list[ScalarField]:
    """Random smooth fields vanishing on the boundary, identical across grids for a seed."""
    coeff = band_limited_coefficients(count, kmax, seed)
    x = (np.arange(grid.nx) + 0.5) * grid.h
    y = (np.arange(grid.ny) + 0.5) * grid.h
    k = np.arange(1, kmax + 1)
    sx = np.sin(np.pi * np.outer(x, k) / grid.lx)
    sy = np.sin(np.pi * np.outer(y, k) / grid.ly)
    return [ScalarField(grid, sx @ coeff[i] @ sy.T) for i in range(count)]


# ---------------------------------------------------------------------------
# Gagliardo-Nirenberg audit

GN_LABELS = (
    "l4_from_h1",
    "grad_l4_from_h2",
    "linf_from_h2",
    "linf_from_h3",
)


@dataclass
class GnAuditResult:
    count: int
    kmax: int
    seed: int
    max_ratios: dict[str, float]


def gn_audit(grid: GridSpec, count: int = 100, kmax: int = 8, seed: int = 7) -> GnAuditResult:
    """Empirical C=1 ratios for the four interpolation inequalities over an ensemble.

    Refinement stability of the max ratios (not their absolute size) is the
    testable content; the generator never emits the zero field.
    """
    ratios = {name: 0.0 for name in GN_LABELS}
    for f in band_limited_fields(grid, count, kmax, seed):
        l2 = lp_norm(f, 2)
        if l2 == 0.0:
            continue
        l4 = lp_norm(f, 4)
        linf = lp_norm(f, math.inf)
        g1 = sobolev_seminorm(f, 1, 2)
        g1_l4 = sobolev_seminorm(f, 1, 4)
        g2 = sobolev_seminorm(f, 2, 2)
        mag3, h = _derivative_magnitude(f, 3)
        g3 = _lp_of_magnitude(mag3, h, 2)
        ratios["l4_from_h1"] = max(ratios["l4_from_h1"], l4 / (math.sqrt(l2 * g1) + l2))
        ratios["grad_l4_from_h2"] = max(
            ratios["grad_l4_from_h2"], g1_l4 / (l2**0.25 * g2**0.75 + l2))
        ratios["linf_from_h2"] = max(ratios["linf_from_h2"], linf / (math.sqrt(l2 * g2) + l2))
        ratios["linf_from_h3"] = max(
            ratios["linf_from_h3"], linf / (l2 ** (2 / 3) * g3 ** (1 / 3) + l2))
    return GnAuditResult(count, kmax, seed, ratios)


# ---------------------------------------------------------------------------
# per-step ledgers

@dataclass
class LedgerEntry:
    lhs: float
    rhs: float
    defect: float


def energy_ledger(state0, state1, params, dt: float) -> LedgerEntry:
    """Discrete energy budget over one step (quadratics by trapezoid average).

    lhs = d/dt of half the squared L2 norms plus viscous and damping sinks,
    rhs = the curl-coupling transfer term; the defect collects time and
    interpolation errors of the scheme, O(dt + h^2) per unit scale.
    """
    from .grid import perp_divergence  # local to keep module import light

    e0 = 0.5 * (lp_norm(state0.u, 2) ** 2 + lp_norm(state0.w, 2) ** 2)
    e1 = 0.5 * (lp_norm(state1.u, 2) ** 2 + lp_norm(state1.w, 2) ** 2)
    diss = 0.5 * (sobolev_seminorm(state0.u, 1, 2) ** 2 + sobolev_seminorm(state1.u, 1, 2) ** 2)
    damp = 0.5 * (lp_norm(state0.w, 2) ** 2 + lp_norm(state1.w, 2) ** 2)
    transfer0 = l2_inner(perp_divergence(state0.u), state0.w)
    transfer1 = l2_inner(perp_divergence(state1.u), state1.w)
    nu_k = params.nu + params.kappa
    lhs = (e1 - e0) / dt + nu_k * diss + 4.0 * params.kappa * damp
    rhs = 4.0 * params.kappa * 0.5 * (transfer0 + transfer1)
    return LedgerEntry(lhs, rhs, lhs - rhs)


def l4_ledger(state0, state1, params, dt: float) -> LedgerEntry:
    """Discrete quartic budget for the micro-rotation (transport term drops out)."""
    from .grid import perp_divergence

    n0 = lp_norm(state0.w, 4) ** 4
    n1 = lp_norm(state1.w, 4) ** 4
    damp = 0.5 * (n0 + n1)
    h2 = state0.w.grid.h**2

    def transfer(state):
        wd = state.w.data
        return float(h2 * np.sum(perp_divergence(state.u).data * np.abs(wd) ** 3 * np.sign(wd)))

    lhs = (n1 - n0) / (4.0 * dt) + 4.0 * params.kappa * damp
    rhs = 2.0 * params.kappa * 0.5 * (transfer(state0) + transfer(state1))
    return LedgerEntry(lhs, rhs, lhs - rhs)


# ---------------------------------------------------------------------------
# trajectory series

LEDGER_QS = (2.0, 4.0, 8.0, math.inf)


@dataclass
class TrajectorySeries:
    """Per-instant norms and per-step ledger entries accumulated during a run."""

    t: list[float] = field(default_factory=list)
    l2_u: list[float] = field(default_factory=list)
    gradu_l2: list[float] = field(default_factory=list)
    gradu_linf: list[float] = field(default_factory=list)
    hessu_l4: list[float] = field(default_factory=list)
    u_linf: list[float] = field(default_factory=list)
    w_lq: dict[float, list[float]] = field(default_factory=lambda: {q: [] for q in LEDGER_QS})
    curl_lq: dict[float, list[float]] = field(default_factory=lambda: {q: [] for q in LEDGER_QS})
    gradu_lq: dict[float, list[float]] = field(default_factory=lambda: {q: [] for q in LEDGER_QS})
    gradw_lq: dict[float, list[float]] = field(default_factory=lambda: {q: [] for q in LEDGER_QS})
    gradw_l4: list[float] = field(default_factory=list)
    linf_w: list[float] = field(default_factory=list)
    h1_v: list[float] = field(default_factory=list)
    l2_g: list[float] = field(default_factory=list)
    grad_g_l2: list[float] = field(default_factory=list)
    lap_g_l2: list[float] = field(default_factory=list)
    adv_scale_energy: list[float] = field(default_factory=list)
    adv_scale_quartic: list[float] = field(default_factory=list)
    step_dt: list[float] = field(default_factory=list)
    energy: list[LedgerEntry] = field(default_factory=list)
    quartic: list[LedgerEntry] = field(default_factory=list)

    def append_instant(self, t: float, u: VelocityField, w: ScalarField,
                       v: VelocityField, g: VelocityField, lap_g: VelocityField) -> None:
        from .grid import perp_divergence

        self.t.append(t)
        self.l2_u.append(lp_norm(u, 2))
        gradmag, h = _derivative_magnitude(u, 1)
        self.gradu_l2.append(_lp_of_magnitude(gradmag, h, 2))
        self.gradu_linf.append(float(gradmag.max()))
        hess, _ = _derivative_magnitude(u, 2)
        self.hessu_l4.append(_lp_of_magnitude(hess, h, 4))
        curl = perp_divergence(u)
        self.u_linf.append(lp_norm(u, math.inf))
        gwx, gwy = cell_gradient(w.data, h)
        gradw_mag = np.hypot(gwx, gwy)
        for q in LEDGER_QS:
            self.w_lq[q].append(lp_norm(w, q))
            self.curl_lq[q].append(lp_norm(curl, q))
            self.gradu_lq[q].append(_lp_of_magnitude(gradmag, h, q))
            self.gradw_lq[q].append(_lp_of_magnitude(gradw_mag, h, q))
        self.gradw_l4.append(sobolev_seminorm(w, 1, 4))
        self.linf_w.append(lp_norm(w, math.inf))
        self.h1_v.append(h1_norm(v))
        self.l2_g.append(lp_norm(g, 2))
        self.grad_g_l2.append(sobolev_seminorm(g, 1, 2))
        self.lap_g_l2.append(lp_norm(lap_g, 2))
        # gross magnitude of the advective fluxes whose exact cancellation the
        # energy/quartic ledgers probe (keeps the pure-transport case non-degenerate)
        uxc, uyc = cell_components(u)
        speed = np.sqrt(uxc**2 + uyc**2)
        h2 = u.grid.h**2
        e_density = 0.5 * (uxc**2 + uyc**2) + 0.5 * w.data**2
        gx, gy = cell_gradient(e_density, u.grid.h)
        self.adv_scale_energy.append(float(h2 * np.sum(speed * np.hypot(gx, gy))))
        gx, gy = cell_gradient(0.25 * w.data**4, u.grid.h)
        self.adv_scale_quartic.append(float(h2 * np.sum(speed * np.hypot(gx, gy))))

    def append_step(self, dt: float, energy: LedgerEntry, quartic: LedgerEntry) -> None:
        self.step_dt.append(dt)
        self.energy.append(energy)
        self.quartic.append(quartic)

    @property
    def n_steps(self) -> int:
        return len(self.step_dt)


# ---------------------------------------------------------------------------
# differential-inequality ledgers along a trajectory

@dataclass
class InequalityReport:
    label: str
    n_steps: int
    violations: int
    max_defect: float
    tolerance: float
    fitted_constant: float
    majorant_violations: int = 0


def lp_linf_ledger(series: TrajectorySeries, params,
                   qs: tuple[float, ...] = LEDGER_QS, rtol: float = 0.05) -> list[InequalityReport]:
    """Check d/dt||w||_q + 4k||w||_q <= 2k||curl u||_q per step, plus the
    integrated exponential majorant seeded by the measured source.

    The curl norm (not a gradient-norm convention) is used on the right so
    the inequality holds with constant exactly one.
    """
    reports = []
    kap = params.kappa
    for q in qs:
        wq = np.asarray(series.w_lq[q])
        cq = np.asarray(series.curl_lq[q])
        gw = np.asarray(series.gradw_lq[q])
        ul = np.asarray(series.u_linf)
        dts = np.asarray(series.step_dt)
        lhs = (wq[1:] - wq[:-1]) / dts + 4.0 * kap * 0.5 * (wq[1:] + wq[:-1])
        rhs = 2.0 * kap * 0.5 * (cq[1:] + cq[:-1])
        defect = lhs - rhs
        transport = 0.5 * (ul[1:] * gw[1:] + ul[:-1] * gw[:-1])
        gross = (np.abs((wq[1:] - wq[:-1]) / dts) + 4.0 * kap * 0.5 * (wq[1:] + wq[:-1])
                 + rhs + transport)
        scale = float(gross.max()) if gross.size else 0.0
        tol = rtol * max(scale, 1e-14)
        violations = int(np.sum(defect > tol))
        # exponential majorant with exact damping factor per step
        maj = np.empty_like(wq)
        maj[0] = wq[0]
        for k, dt in enumerate(dts):
            decay = math.exp(-4.0 * kap * dt)
            src = 0.5 * (1.0 - decay) * 0.5 * (cq[k] + cq[k + 1]) if kap > 0 else 0.0
            maj[k + 1] = decay * maj[k] + src
        t_rel = np.asarray(series.t) - series.t[0]
        maj_viol = int(np.sum(wq > maj * (1.0 + rtol) + tol * (1.0 + t_rel)))
        reports.append(InequalityReport(
            label=f"w_L{'inf' if math.isinf(q) else int(q)}",
            n_steps=len(dts), violations=violations,
            max_defect=float(defect.max()) if defect.size else 0.0,
            tolerance=tol, fitted_constant=1.0, majorant_violations=maj_viol))
    return reports


def gradw_ledger(series: TrajectorySeries, params, q: float = 4.0,
                 c_geo: float = 2.0, rtol: float = 0.05,
                 burn_frac: float = 0.5) -> InequalityReport:
    """Check the gradient budget of the micro-rotation at exponent q = 4.

    d/dt||grad w||_q + 4k||grad w||_q <= c_geo*(||grad u||_inf ||grad w||_q
    + 2k||grad^2 u||_q), with c_geo covering the dimensional constants the
    pointwise estimates absorb.  Also evaluates the log-Gronwall envelope
    with phi = (1 + ||w||_inf)(1 + h1(g) + ||lap g||_2), constant fitted on
    the first burn_frac of the run.
    """
    kap = params.kappa
    gw = np.asarray(series.gradw_l4) if q == 4.0 else None
    if gw is None:
        raise ValueError("only q = 4 is tracked along trajectories")
    dts = np.asarray(series.step_dt)
    gl = np.asarray(series.gradu_linf)
    hq = np.asarray(series.hessu_l4)
    avg = 0.5 * (gw[1:] + gw[:-1])
    lhs = (gw[1:] - gw[:-1]) / dts + 4.0 * kap * avg
    rhs = c_geo * (0.5 * (gl[1:] + gl[:-1]) * avg + 2.0 * kap * 0.5 * (hq[1:] + hq[:-1]))
    defect = lhs - rhs
    gross = np.abs((gw[1:] - gw[:-1]) / dts) + 4.0 * kap * avg + rhs
    tol = rtol * max(float(gross.max()) if gross.size else 0.0, 1e-14)
    violations = int(np.sum(defect > tol))

    # log-Gronwall envelope for y = ||grad w||_q via z = ln(e + y)
    linfw = np.asarray(series.linf_w)
    phi = (1.0 + linfw) * (1.0 + np.asarray(series.grad_g_l2) + np.asarray(series.lap_g_l2))
    z = np.log(math.e + gw)
    n_burn = max(1, int(burn_frac * len(dts)))
    cfit = 0.0
    for k in range(n_burn):
        rate = (z[k + 1] - z[k]) / dts[k] + 4.0 * kap * gw[k] / (math.e + gw[k])
        denom = 0.5 * (phi[k] + phi[k + 1]) * z[k]
        if denom > 0:
            cfit = max(cfit, rate / denom)
    env = np.empty_like(z)
    env[0] = z[0]
    integral = 0.0
    env_viol = 0
    for k, dt in enumerate(dts):
        integral += dt * 0.5 * (phi[k] + phi[k + 1])
        env[k + 1] = z[0] * math.exp(cfit * integral)
        if z[k + 1] > env[k + 1] * (1.0 + rtol) + tol:
            env_viol += 1
    return InequalityReport(label=f"gradw_L{int(q)}", n_steps=len(dts), violations=violations,
                            max_defect=float(defect.max()) if defect.size else 0.0,
                            tolerance=tol, fitted_constant=cfit,
                            majorant_violations=env_viol)


@dataclass
class LedgerCheck:
    max_energy_defect: float
    energy_scale: float
    max_quartic_defect: float
    quartic_scale: float
    rel_tol: float

    @property
    def energy_ok(self) -> bool:
        return self.max_energy_defect <= self.rel_tol * max(self.energy_scale, 1e-12)

    @property
    def quartic_ok(self) -> bool:
        return self.max_quartic_defect <= self.rel_tol * max(self.quartic_scale, 1e-12)


def ledger_scales(series: TrajectorySeries, params) -> tuple[float, float]:
    """Max gross magnitude of the energy and quartic budgets.

    The scale sums the absolute values of each budget's constituents, so it
    measures the size of the terms whose near-cancellation the defect probes.
    """
    nu_k = params.nu + params.kappa
    kap = params.kappa
    dts = np.asarray(series.step_dt)
    if dts.size == 0:
        return 0.0, 0.0
    l2u = np.asarray(series.l2_u)
    w2 = np.asarray(series.w_lq[2.0])
    w4 = np.asarray(series.w_lq[4.0])
    gu = np.asarray(series.gradu_l2)
    e = 0.5 * (l2u**2 + w2**2)
    e_rhs = np.asarray([le.rhs for le in series.energy])
    adv_e = np.asarray(series.adv_scale_energy)
    adv_q = np.asarray(series.adv_scale_quartic)
    e_gross = (np.abs((e[1:] - e[:-1]) / dts)
               + nu_k * 0.5 * (gu[1:] ** 2 + gu[:-1] ** 2)
               + 4.0 * kap * 0.5 * (w2[1:] ** 2 + w2[:-1] ** 2) + np.abs(e_rhs)
               + 0.5 * (adv_e[1:] + adv_e[:-1]))
    q = w4**4
    q_rhs = np.asarray([le.rhs for le in series.quartic])
    q_gross = (np.abs((q[1:] - q[:-1]) / (4.0 * dts))
               + 4.0 * kap * 0.5 * (q[1:] + q[:-1]) + np.abs(q_rhs)
               + 0.5 * (adv_q[1:] + adv_q[:-1]))
    return float(e_gross.max()), float(q_gross.max())


def ledger_defect_check(series: TrajectorySeries, params, rel_tol: float = 0.02) -> LedgerCheck:
    e_scale, q_scale = ledger_scales(series, params)
    e_def = max((abs(le.defect) for le in series.energy), default=0.0)
    q_def = max((abs(le.defect) for le in series.quartic), default=0.0)
    return LedgerCheck(e_def, e_scale, q_def, q_scale, rel_tol)


# ---------------------------------------------------------------------------
# Gronwall envelopes

@dataclass
class EnvelopeReport:
    c1_fit: float
    c2_fit: float
    envelope_a1: np.ndarray
    envelope_a2: np.ndarray
    tracked_a1: np.ndarray
    tracked_a2: np.ndarray
    violations_a1: int
    violations_a2: int


def _trapezoid_cumsum(vals: np.ndarray, dts: np.ndarray) -> np.ndarray:
    out = np.zeros(len(vals))
    out[1:] = np.cumsum(dts * 0.5 * (vals[1:] + vals[:-1]))
    return out


def gronwall_envelopes(series: TrajectorySeries, params, burn_frac: float = 0.25,
                       rtol: float = 0.05, floor: float = 1e-14) -> EnvelopeReport:
    """Exponential majorants for the energy and the gradient/quartic pair.

    Rates are fitted from the measured per-step inequality slack over the
    first burn_frac of the run, then the whole run is checked against the
    integrated envelope; instability later in the run therefore registers
    as violations instead of inflating the fit.
    """
    nu_k = params.nu + params.kappa
    kap = params.kappa
    dts = np.asarray(series.step_dt)
    n_burn = max(1, int(burn_frac * len(dts)))

    e = np.asarray(series.l2_u) ** 2 + np.asarray(series.w_lq[2.0]) ** 2
    gradu2 = np.asarray(series.gradu_l2) ** 2
    w2sq = np.asarray(series.w_lq[2.0]) ** 2
    diss1 = nu_k * gradu2 + 8.0 * kap * w2sq
    c1 = 0.0
    for k in range(n_burn):
        rate = (e[k + 1] - e[k]) / dts[k] + 0.5 * (diss1[k] + diss1[k + 1])
        denom = max(0.5 * (e[k] + e[k + 1]), floor)
        c1 = max(c1, rate / denom)
    t = np.asarray(series.t)
    env1 = (e[0] + floor) * np.exp(np.minimum(c1 * t, 700.0))
    tracked1 = e + _trapezoid_cumsum(diss1, dts)
    viol1 = int(np.sum(tracked1 > env1 * (1.0 + rtol) + floor))

    y2 = np.asarray(series.grad_g_l2) ** 2 + np.asarray(series.w_lq[4.0]) ** 2
    diss2 = nu_k * np.asarray(series.lap_g_l2) ** 2 + 8.0 * kap * np.asarray(series.gradw_l4) ** 2
    phi2 = 1.0 + (np.asarray(series.l2_u) ** 2) * gradu2
    c2 = 0.0
    for k in range(n_burn):
        rate = (y2[k + 1] - y2[k]) / dts[k] + 0.5 * (diss2[k] + diss2[k + 1])
        denom = max(0.5 * (phi2[k] + phi2[k + 1]) * 0.5 * (y2[k] + y2[k + 1]), floor)
        c2 = max(c2, rate / denom)
    env2 = (y2[0] + floor) * np.exp(np.minimum(c2 * _trapezoid_cumsum(phi2, dts), 700.0))
    tracked2 = y2 + _trapezoid_cumsum(diss2, dts)
    viol2 = int(np.sum(tracked2 > env2 * (1.0 + rtol) + floor))

    return EnvelopeReport(c1, c2, env1, env2, tracked1, tracked2, viol1, viol2)


# ---------------------------------------------------------------------------
# diagnostics records (serialized by the CLI)

@dataclass
class DiagnosticsRecord:
    t: float
    l2_u: float
    h1_u: float
    l2_w: float
    l4_w: float
    linf_w: float
    l4_grad_w: float
    h1_v: float
    h1_g: float
    l2_lap_g: float
    energy_lhs: float
    energy_rhs: float
    energy_defect: float
    l4_ledger_lhs: float
    l4_ledger_rhs: float
    l4_ledger_defect: float
    g_residual: float
    vt_residual: float
    gronwall_envelope_a1: float
    gronwall_envelope_a2: float


DIAGNOSTICS_FIELDS = tuple(f.name for f in fields(DiagnosticsRecord))

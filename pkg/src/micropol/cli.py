"""Command-line driver: run simulations, fixed-point constructions, audits,
parameter sweeps, and the self-verification suite.

Configs are flat ``key = value`` files with ``#`` comments; unknown keys are
fatal and every violation is reported with its line number.  Exit codes:
0 success, 1 solver/IO failure, 2 assertion or ledger violation, 64 config
error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import dataclasses
import math
import struct
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, grid as grid_mod, profiles
from .elliptic import poisson_dirichlet
from .errors import CflCollapseError, ConfigurationError, ConvergenceError
from .fixedpoint import fixed_point_solve
from .grid import ScalarField, VelocityField, divergence, laplacian, make_grid, perp_gradient
from .micropolar import DtPolicy, FluidParams, SimState, check_compatibility, run
from .stokes import apply_A_inv_perp, log_gradient_audit, stokes_stationary

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VIOLATION = 2
EXIT_CONFIG = 64

SNAPSHOT_MAGIC = b"MPOL"
SNAPSHOT_VERSION = 1

MODES = ("run", "fixed-point", "audit", "sweep", "verify")


# ---------------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    mode: str = "run"
    nx: int = 64
    ny: int = 64
    lx: float = 1.0
    ly: float = 1.0
    nu: float = 0.1
    kappa: float = 0.1
    initial_condition: str = "vortex"
    ic_scale_u: float = 0.3
    ic_scale_w: float = 1.0
    t_final: float = 1.0
    cfl_max: float = 0.9
    dt_floor: float = 1e-8
    dt_max: float = 5e-3
    dt_fixed: float = 0.0
    diag_interval: float = 0.02
    interp: str = "cubic"
    solver_tol: float = 1e-9
    out_dir: str = "out"
    seed: int = 0
    epsilon: float = 0.0
    fp_tol: float = 1e-8
    fp_max_iter: int = 20
    sweep_nu: tuple[float, ...] = ()
    sweep_kappa: tuple[float, ...] = ()
    sweep_nx: tuple[int, ...] = ()
    ensemble_count: int = 100
    kmax: int = 8
    verify_nx: int = 32
    sabotage: str = ""


def _parse_int(s): return int(s)
def _parse_float(s): return float(s)
def _parse_str(s): return s
def _parse_int_list(s): return tuple(int(x) for x in s.split(",") if x.strip())
def _parse_float_list(s): return tuple(float(x) for x in s.split(",") if x.strip())


_KEYS = {
    "mode": (_parse_str, lambda v: v in MODES, f"must be one of {MODES}"),
    "nx": (_parse_int, lambda v: v >= 8, "must be >= 8"),
    "ny": (_parse_int, lambda v: v >= 8, "must be >= 8"),
    "lx": (_parse_float, lambda v: v > 0, "must be positive"),
    "ly": (_parse_float, lambda v: v > 0, "must be positive"),
    "nu": (_parse_float, lambda v: v > 0, "must be positive"),
    "kappa": (_parse_float, lambda v: v >= 0, "must be non-negative"),
    "initial_condition": (_parse_str,
                          lambda v: v in ("zero", "vortex", "spin") or v.startswith("snapshot:"),
                          "must be zero|vortex|spin|snapshot:PATH"),
    "ic_scale_u": (_parse_float, lambda v: True, ""),
    "ic_scale_w": (_parse_float, lambda v: True, ""),
    "t_final": (_parse_float, lambda v: v >= 0, "must be non-negative"),
    "cfl_max": (_parse_float, lambda v: v > 0, "must be positive"),
    "dt_floor": (_parse_float, lambda v: v > 0, "must be positive"),
    "dt_max": (_parse_float, lambda v: v > 0, "must be positive"),
    "dt_fixed": (_parse_float, lambda v: v >= 0, "must be non-negative (0 disables)"),
    "diag_interval": (_parse_float, lambda v: v > 0, "must be positive"),
    "interp": (_parse_str, lambda v: v in ("linear", "cubic"), "must be linear|cubic"),
    "solver_tol": (_parse_float, lambda v: v > 0, "must be positive"),
    "out_dir": (_parse_str, lambda v: bool(v), "must be non-empty"),
    "seed": (_parse_int, lambda v: v >= 0, "must be non-negative"),
    "epsilon": (_parse_float, lambda v: v >= 0, "must be non-negative (0 means grid spacing)"),
    "fp_tol": (_parse_float, lambda v: v > 0, "must be positive"),
    "fp_max_iter": (_parse_int, lambda v: v >= 1, "must be >= 1"),
    "sweep_nu": (_parse_float_list, lambda v: all(x > 0 for x in v), "entries must be positive"),
    "sweep_kappa": (_parse_float_list, lambda v: all(x >= 0 for x in v), "entries must be >= 0"),
    "sweep_nx": (_parse_int_list, lambda v: all(x >= 8 for x in v), "entries must be >= 8"),
    "ensemble_count": (_parse_int, lambda v: v >= 1, "must be >= 1"),
    "kmax": (_parse_int, lambda v: v >= 1, "must be >= 1"),
    "verify_nx": (_parse_int, lambda v: v >= 8, "must be >= 8"),
    "sabotage": (_parse_str, lambda v: v in ("", "divergence"), "unknown sabotage hook"),
}


def parse_config(text: str) -> tuple[RunConfig | None, list[str]]:
    """Parse a flat key=value config, returning all violations (not just the first)."""
    errors: list[str] = []
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _KEYS:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in values:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        parser, validator, message = _KEYS[key]
        try:
            parsed = parser(val)
        except ValueError:
            errors.append(f"line {lineno}: cannot parse value {val!r} for key {key!r}")
            continue
        if not validator(parsed):
            errors.append(f"line {lineno}: {key} = {val}: {message}")
            continue
        values[key] = parsed
        lines[key] = lineno

    cfg = dataclasses.replace(RunConfig(), **values) if not errors else None
    if cfg is not None:
        hx = cfg.lx / cfg.nx
        hy = cfg.ly / cfg.ny
        if abs(hx - hy) > 1e-12 * max(hx, hy):
            at = lines.get("ny", lines.get("nx", 0))
            errors.append(f"line {at}: non-square cells (lx/nx = {hx!r}, ly/ny = {hy!r})")
        if cfg.dt_floor >= cfg.dt_max:
            at = lines.get("dt_floor", lines.get("dt_max", 0))
            errors.append(f"line {at}: dt_floor must be below dt_max")
        if cfg.initial_condition.startswith("snapshot:"):
            path = cfg.initial_condition.split(":", 1)[1]
            if not Path(path).exists():
                at = lines.get("initial_condition", 0)
                errors.append(f"line {at}: snapshot path {path!r} does not exist")
    return (None, errors) if errors else (cfg, [])


def load_config(path: str | Path) -> tuple[RunConfig | None, list[str]]:
    return parse_config(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# persistence

def write_snapshot(path: str | Path, state: SimState) -> None:
    """Self-describing binary dump: header plus row-major little-endian f64 data."""
    g = state.u.grid
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sHII", SNAPSHOT_MAGIC, SNAPSHOT_VERSION, g.nx, g.ny))
        fh.write(struct.pack("<ddd", g.lx, g.ly, state.t))
        fh.write(state.w.data.astype("<f8").tobytes(order="C"))
        fh.write(state.u.ux.astype("<f8").tobytes(order="C"))
        fh.write(state.u.uy.astype("<f8").tobytes(order="C"))


def read_snapshot(path: str | Path) -> SimState:
    raw = Path(path).read_bytes()
    magic, version, nx, ny = struct.unpack_from("<4sHII", raw, 0)
    if magic != SNAPSHOT_MAGIC:
        raise ConfigurationError(f"{path}: not a snapshot file (bad magic {magic!r})")
    if version != SNAPSHOT_VERSION:
        raise ConfigurationError(f"{path}: unsupported snapshot version {version}")
    lx, ly, t = struct.unpack_from("<ddd", raw, 14)
    g = make_grid(nx, ny, lx, ly)
    off = 14 + 24
    n_w = nx * ny
    n_ux = (nx + 1) * ny
    n_uy = nx * (ny + 1)
    data = np.frombuffer(raw, dtype="<f8", count=n_w + n_ux + n_uy, offset=off)
    w = data[:n_w].reshape(nx, ny).copy()
    ux = data[n_w:n_w + n_ux].reshape(nx + 1, ny).copy()
    uy = data[n_w + n_ux:].reshape(nx, ny + 1).copy()
    return SimState(t, 0, VelocityField(g, ux, uy), ScalarField(g, w))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def diagnostics_row(rec: analysis.DiagnosticsRecord) -> str:
    return ",".join(_fmt(getattr(rec, name)) for name in analysis.DIAGNOSTICS_FIELDS)


def write_diagnostics(path: str | Path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(analysis.DIAGNOSTICS_FIELDS) + "\n")
        for rec in records:
            fh.write(diagnostics_row(rec) + "\n")


# ---------------------------------------------------------------------------
# run mode

def _build_state(cfg: RunConfig):
    g = make_grid(cfg.nx, cfg.ny, cfg.lx, cfg.ly)
    if cfg.initial_condition.startswith("snapshot:"):
        state = read_snapshot(cfg.initial_condition.split(":", 1)[1])
        if state.u.grid.nx != g.nx or state.u.grid.ny != g.ny:
            raise ConfigurationError("snapshot grid does not match configured grid")
        return g, state
    return g, profiles.build_initial_state(g, cfg.initial_condition, cfg.ic_scale_u, cfg.ic_scale_w)


def run_command(cfg: RunConfig, out_dir: str | Path | None = None) -> int:
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()
    try:
        g, state0 = _build_state(cfg)
        params = FluidParams(cfg.nu, cfg.kappa)
        compat = check_compatibility(state0.u, state0.w, params, tol=min(cfg.solver_tol, 1e-10))
        policy = DtPolicy(cfg.cfl_max, cfg.dt_floor, cfg.dt_max,
                          cfg.dt_fixed if cfg.dt_fixed > 0 else None)
        csv_path = out / "diagnostics.csv"
        with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(analysis.DIAGNOSTICS_FIELDS) + "\n")

            def on_record(rec):
                fh.write(diagnostics_row(rec) + "\n")
                fh.flush()

            try:
                result = run(state0, params, cfg.t_final, policy=policy,
                             diag_interval=cfg.diag_interval, tol=cfg.solver_tol,
                             interp=cfg.interp, on_record=on_record)
            except CflCollapseError as err:
                if err.state is not None:
                    write_snapshot(out / "abort_state.mpol", err.state)
                (out / "summary.txt").write_text(f"ABORTED: {err}\n", encoding="utf-8")
                print(f"micropol run: aborted, {err}", file=sys.stderr)
                return EXIT_FAILURE
    except (ConvergenceError, ConfigurationError, FloatingPointError, OSError) as err:
        print(f"micropol run: failed, {err}", file=sys.stderr)
        return EXIT_FAILURE

    write_snapshot(out / "final.mpol", result.final_state)

    series = result.series
    # coarse grids carry visibly larger O(h^2) ledger defects; tiered tolerance
    rel_tol = 0.02 if min(g.nx, g.ny) >= 48 else 0.05
    check = analysis.ledger_defect_check(series, params, rel_tol=rel_tol)
    lp_reports = analysis.lp_linf_ledger(series, params)
    gw_report = analysis.gradw_ledger(series, params)
    env = analysis.gronwall_envelopes(series, params)
    violations = {
        "energy_ledger": 0 if check.energy_ok else 1,
        "quartic_ledger": 0 if check.quartic_ok else 1,
        "lp_inequality": sum(r.violations for r in lp_reports),
        "lp_majorant": sum(r.majorant_violations for r in lp_reports),
        "gradw_inequality": gw_report.violations,
        "gradw_envelope": gw_report.majorant_violations,
        "gronwall_a1": env.violations_a1,
        "gronwall_a2": env.violations_a2,
    }
    total_violations = sum(violations.values())
    elapsed = time.perf_counter() - t_start

    lines = [
        f"grid {g.nx}x{g.ny}, nu={cfg.nu}, kappa={cfg.kappa}, T={cfg.t_final}",
        f"steps {series.n_steps}, records {len(result.records)}, wall time {elapsed:.2f} s",
        f"compatibility: div={compat.div_defect:.6e} wall_normal={compat.wall_trace_defect:.6e} "
        f"wall_tangential~{compat.tangential_trace_estimate:.6e} momentum={compat.momentum_defect:.6e}",
        f"energy ledger: max defect {check.max_energy_defect:.6e} vs scale {check.energy_scale:.6e}"
        f" -> {'ok' if check.energy_ok else 'VIOLATION'}",
        f"quartic ledger: max defect {check.max_quartic_defect:.6e} vs scale {check.quartic_scale:.6e}"
        f" -> {'ok' if check.quartic_ok else 'VIOLATION'}",
        f"gronwall fit: C1={env.c1_fit:.6e} C2={env.c2_fit:.6e} "
        f"violations a1={env.violations_a1} a2={env.violations_a2}",
    ]
    for rep in lp_reports:
        lines.append(f"{rep.label}: violations {rep.violations}, majorant {rep.majorant_violations}, "
                     f"max defect {rep.max_defect:.6e} (tol {rep.tolerance:.6e})")
    lines.append(f"{gw_report.label}: violations {gw_report.violations}, "
                 f"envelope {gw_report.majorant_violations}, fitted C {gw_report.fitted_constant:.6e}")
    lines.append("status: " + ("OK" if total_violations == 0 else
                               f"{total_violations} VIOLATION(S)"))
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for ln in lines:
        print(ln)
    return EXIT_OK if total_violations == 0 else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# verify mode

@dataclass
class CheckRow:
    check: str
    grid: str
    value: float
    threshold: float
    passed: bool
    note: str = ""


def _order(err_coarse: float, err_fine: float) -> float:
    if err_fine <= 0:
        return float("inf")
    return math.log2(err_coarse / err_fine)


def _poisson_error(n: int) -> float:
    g = make_grid(n, n, 1.0, 1.0)
    rhs = ScalarField.from_function(
        g, lambda x, y: 2 * np.pi**2 * np.sin(np.pi * x) * np.sin(np.pi * y))
    sol = poisson_dirichlet(rhs).solution
    x, y = g.cell_centers()
    return float(np.abs(sol.data - np.sin(np.pi * x) * np.sin(np.pi * y)).max())


def _stokes_error(n: int) -> float:
    g = make_grid(n, n, 1.0, 1.0)
    res = stokes_stationary(profiles.stokes_mms_forcing(g), tol=1e-9)
    exact = profiles.stokes_mms_exact(g)
    return float(max(np.abs(res.velocity.ux - exact.ux).max(),
                     np.abs(res.velocity.uy - exact.uy).max()))


def _h2_ratio(n: int, count: int, kmax: int, seed: int) -> float:
    g = make_grid(n, n, 1.0, 1.0)
    worst = 0.0
    for f in analysis.band_limited_fields(g, count, kmax, seed):
        sol = poisson_dirichlet(f, tol=1e-11).solution
        h2 = math.sqrt(analysis.lp_norm(sol, 2) ** 2
                       + analysis.sobolev_seminorm(sol, 1, 2) ** 2
                       + analysis.sobolev_seminorm(sol, 2, 2) ** 2)
        worst = max(worst, h2 / analysis.lp_norm(f, 2))
    return worst


def _ainv_ratio(n: int, count: int, kmax: int, seed: int) -> float:
    g = make_grid(n, n, 1.0, 1.0)
    worst = 0.0
    for f in analysis.band_limited_fields(g, count, kmax, seed):
        res = apply_A_inv_perp(f, 1.0, tol=1e-10)
        worst = max(worst, analysis.h1_norm(res.velocity) / analysis.lp_norm(f, 2))
    return worst


def _drift(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def verify_checks(cfg: RunConfig) -> list[CheckRow]:
    """The property suite at two grid resolutions."""
    n = cfg.verify_nx
    n2 = 2 * n
    coarse = n < 16
    tier_note = "coarse-grid tolerance tier" if coarse else ""
    order_min = 1.5 if coarse else 1.9
    rows: list[CheckRow] = []
    rng = np.random.default_rng(cfg.seed)

    for nn in (n, n2):
        g = make_grid(nn, nn, 1.0, 1.0)
        w = ScalarField(g, rng.standard_normal((nn, nn)))
        dmax = float(np.abs(grid_mod.divergence(perp_gradient(w)).data).max())
        rows.append(CheckRow("divfree_identity", f"{nn}", dmax, 1e-9, dmax <= 1e-9,
                             tier_note))
        a = ScalarField(g, rng.standard_normal((nn, nn)))
        b = ScalarField(g, rng.standard_normal((nn, nn)))
        lin = 0.0
        for op in (perp_gradient, laplacian):
            c1 = op(ScalarField(g, 2.0 * a.data - 0.5 * b.data))
            c2 = op(a)
            c3 = op(b)
            if isinstance(c1, VelocityField):
                lin = max(lin, (c1 - (2.0 * c2 - 0.5 * c3)).max_speed())
            else:
                lin = max(lin, float(np.abs(c1.data - (2.0 * c2.data - 0.5 * c3.data)).max()))
        rows.append(CheckRow("operator_linearity", f"{nn}", lin, 1e-8, lin <= 1e-8))

    pe = [_poisson_error(nn) for nn in (n, n2)]
    order = _order(pe[0], pe[1])
    rows.append(CheckRow("poisson_dirichlet_order", f"{n}->{n2}", order, order_min,
                         order >= order_min, tier_note))
    se = [_stokes_error(nn) for nn in (n, n2)]
    order = _order(se[0], se[1])
    rows.append(CheckRow("stokes_order", f"{n}->{n2}", order, order_min,
                         order >= order_min, tier_note))

    count = min(cfg.ensemble_count, 100)
    kmax = max(2, min(cfg.kmax, n // 4))  # ensemble must stay resolved on the coarse grid
    h2 = [_h2_ratio(nn, count, kmax, cfg.seed) for nn in (n, n2)]
    d = _drift(h2[0], h2[1])
    rows.append(CheckRow("elliptic_h2_drift", f"{n}->{n2}", d, 0.05, d <= 0.05))
    av = [_ainv_ratio(nn, count, kmax, cfg.seed) for nn in (n, n2)]
    d = _drift(av[0], av[1])
    rows.append(CheckRow("ainv_perp_drift", f"{n}->{n2}", d, 0.10, d <= 0.10))

    gn = [analysis.gn_audit(make_grid(nn, nn, 1.0, 1.0), count, kmax, cfg.seed)
          for nn in (n, n2)]
    for label in analysis.GN_LABELS:
        d = _drift(gn[0].max_ratios[label], gn[1].max_ratios[label])
        rows.append(CheckRow(f"gn_drift_{label}", f"{n}->{n2}", d, 0.10, d <= 0.10))

    g = make_grid(n2, n2, 1.0, 1.0)
    f = ScalarField(g, rng.standard_normal((n2, n2)))
    mono_ok = True
    worst = 0.0
    for p, q in ((1.0, 2.0), (2.0, 4.0), (4.0, math.inf)):
        lo = analysis.lp_norm(f, p)
        hi = analysis.lp_norm(f, q)
        worst = max(worst, lo / hi)
        mono_ok = mono_ok and lo <= hi * (1.0 + 1e-12)
    rows.append(CheckRow("holder_monotonicity", f"{n2}", worst, 1.0, mono_ok))

    ratios = []
    for k in (2, 4, 8):
        if k > n2 // 4:
            continue
        wk = ScalarField.from_function(
            g, lambda x, y, k=k: np.sin(k * np.pi * x) * np.sin(k * np.pi * y))
        ratios.append(log_gradient_audit(wk, q=4.0).ratio)
    spread = max(ratios) / max(min(ratios), 1e-300)
    rows.append(CheckRow("log_gradient_sweep", f"{n2}", spread, 2.0, spread <= 2.0))

    ibp = []
    for nn in (n, n2):
        gg = make_grid(nn, nn, 1.0, 1.0)
        wf = ScalarField.from_function(
            gg, lambda x, y: np.sin(np.pi * x) ** 2 * np.sin(np.pi * y) ** 2)
        uf = profiles.vortex_velocity(gg, 1.0)
        pair = (analysis.lp_norm(wf, 2) * analysis.lp_norm(uf, 2))
        ip1 = analysis.face_inner(perp_gradient(wf), uf)
        ip2 = analysis.l2_inner(wf, grid_mod.perp_divergence(uf))
        ibp.append(abs(ip1 + ip2) / pair)
    order = _order(ibp[0], ibp[1])
    rows.append(CheckRow("ibp_identity_order", f"{n}->{n2}", order, 1.5, order >= 1.5,
                         tier_note))
    return rows


def verify_command(cfg: RunConfig, out_dir: str | Path | None = None) -> int:
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    saboteur = None
    if cfg.sabotage == "divergence":
        original = grid_mod.divergence

        def broken(u):
            res = original(u)
            res.data[res.data.shape[0] // 2, :] += 1e-3
            return res

        grid_mod.divergence = broken
        saboteur = original
    try:
        rows = verify_checks(cfg)
    finally:
        if saboteur is not None:
            grid_mod.divergence = saboteur
    with open(out / "verify_report.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["check", "grid", "value", "threshold", "status", "note"])
        for r in rows:
            writer.writerow([r.check, r.grid, _fmt(r.value), _fmt(r.threshold),
                             "pass" if r.passed else "FAIL", r.note])
    failed = [r.check for r in rows if not r.passed]
    for r in rows:
        mark = "pass" if r.passed else "FAIL"
        note = f"  [{r.note}]" if r.note else ""
        print(f"{mark}  {r.check:28s} {r.grid:10s} value={r.value:.4g} thr={r.threshold:.4g}{note}")
    if failed:
        print("failing checks: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


# ---------------------------------------------------------------------------
# audit mode

def audit_command(cfg: RunConfig, out_dir: str | Path | None = None) -> int:
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n, n2 = cfg.nx, 2 * cfg.nx
    rows: list[CheckRow] = []
    gn = [analysis.gn_audit(make_grid(nn, nn, 1.0, 1.0), cfg.ensemble_count, cfg.kmax, cfg.seed)
          for nn in (n, n2)]
    for label in analysis.GN_LABELS:
        d = _drift(gn[0].max_ratios[label], gn[1].max_ratios[label])
        rows.append(CheckRow(f"gn_drift_{label}", f"{n}->{n2}", d, 0.10, d <= 0.10))
    h2 = [_h2_ratio(nn, cfg.ensemble_count, cfg.kmax, cfg.seed) for nn in (n, n2)]
    rows.append(CheckRow("elliptic_h2_drift", f"{n}->{n2}", _drift(h2[0], h2[1]), 0.05,
                         _drift(h2[0], h2[1]) <= 0.05))
    av = [_ainv_ratio(nn, cfg.ensemble_count, cfg.kmax, cfg.seed) for nn in (n, n2)]
    rows.append(CheckRow("ainv_perp_drift", f"{n}->{n2}", _drift(av[0], av[1]), 0.10,
                         _drift(av[0], av[1]) <= 0.10))
    with open(out / "audit_report.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["check", "grid", "value", "threshold", "status"])
        for r in rows:
            writer.writerow([r.check, r.grid, _fmt(r.value), _fmt(r.threshold),
                             "pass" if r.passed else "FAIL"])
    for r in rows:
        print(f"{'pass' if r.passed else 'FAIL'}  {r.check:28s} value={r.value:.4g}")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# sweep mode

def _sweep_cell(payload: tuple[RunConfig, str]) -> dict:
    cfg, cell_dir = payload
    code = run_command(cfg, out_dir=cell_dir)
    summary = {"exit": code, "nu": cfg.nu, "kappa": cfg.kappa, "nx": cfg.nx}
    try:
        g, state0 = _build_state(cfg)
        params = FluidParams(cfg.nu, cfg.kappa)
        policy = DtPolicy(cfg.cfl_max, cfg.dt_floor, cfg.dt_max,
                          cfg.dt_fixed if cfg.dt_fixed > 0 else None)
        res = run(state0, params, cfg.t_final, policy=policy,
                  diag_interval=cfg.diag_interval, tol=cfg.solver_tol, interp=cfg.interp)
        check = analysis.ledger_defect_check(res.series, params)
        env = analysis.gronwall_envelopes(res.series, params)
        winf = np.asarray(res.series.linf_w)
        summary.update(
            max_energy_defect=check.max_energy_defect,
            envelope_violations=env.violations_a1 + env.violations_a2,
            c1_fit=env.c1_fit, c2_fit=env.c2_fit,
            winf_monotone=bool(np.all(np.diff(winf) <= 1e-14)),
        )
    except Exception as err:  # cell failures are recorded, not fatal to the sweep
        summary.update(exit=max(summary["exit"], EXIT_FAILURE), error=str(err))
    return summary


def sweep_command(cfg: RunConfig, out_dir: str | Path | None = None) -> int:
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    nus = cfg.sweep_nu or (cfg.nu,)
    kappas = cfg.sweep_kappa or (cfg.kappa,)
    nxs = cfg.sweep_nx or (cfg.nx,)
    cells = []
    for nu in nus:
        for kap in kappas:
            for nx in nxs:
                ny = round(nx * cfg.ny / cfg.nx)
                sub = dataclasses.replace(cfg, mode="run", nu=nu, kappa=kap, nx=nx, ny=ny)
                cells.append(sub)
    payloads = [(sub, str(out / f"cell_{i:03d}")) for i, sub in enumerate(cells)]
    if len(payloads) == 1:
        results = [_sweep_cell(payloads[0])]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=min(4, len(payloads))) as pool:
            results = list(pool.map(_sweep_cell, payloads))
    fieldnames = ["cell", "nu", "kappa", "nx", "exit", "max_energy_defect",
                  "envelope_violations", "c1_fit", "c2_fit", "winf_monotone", "error"]
    with open(out / "sweep_summary.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for i, summary in enumerate(results):
            row = {"cell": i, **{k: summary.get(k, "") for k in fieldnames[1:]}}
            writer.writerow(row)
    worst = max(s["exit"] for s in results)
    print(f"sweep: {len(results)} cells, worst exit {worst}")
    return EXIT_OK if worst == 0 else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# fixed-point mode

def fixed_point_command(cfg: RunConfig, out_dir: str | Path | None = None) -> int:
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        g, state0 = _build_state(cfg)
        params = FluidParams(cfg.nu, cfg.kappa)
        eps = cfg.epsilon if cfg.epsilon > 0 else g.h
        dt = cfg.dt_fixed if cfg.dt_fixed > 0 else cfg.dt_max
        u_traj, w_traj, report = fixed_point_solve(
            state0.u, state0.w, params, cfg.t_final, eps, tol=cfg.fp_tol,
            max_iter=cfg.fp_max_iter, dt=dt, solver_tol=cfg.solver_tol, interp=cfg.interp)
        direct = run(state0, params, cfg.t_final, policy=DtPolicy(fixed_dt=dt),
                     tol=cfg.solver_tol, interp=cfg.interp, record_states=True)
    except (ConvergenceError, ConfigurationError, CflCollapseError) as err:
        print(f"micropol fixed-point: failed, {err}", file=sys.stderr)
        return EXIT_FAILURE
    sup = max(analysis.lp_norm(a - s.u, 2) for a, s in zip(u_traj, direct.states))
    bound = 5.0 * (eps + dt)
    with open(out / "fixed_point_report.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "distance"])
        for i, d in enumerate(report.distances, start=1):
            writer.writerow([i, _fmt(d)])
    r0 = report.r0_check
    lines = [
        f"iterations {report.iterations}, converged {report.converged}",
        f"smallness check: r0={r0.r0:.6e} c_fit={r0.c_fit:.6e} lhs={r0.lhs:.6e} "
        f"satisfied={r0.satisfied}" if r0 else "smallness check: n/a",
        f"direct-solver distance (sup-in-time L2): {sup:.6e}, bound {bound:.6e}",
    ]
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for ln in lines:
        print(ln)
    ok = report.converged and sup <= bound
    return EXIT_OK if ok else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# entry point

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="micropol",
        description="Micropolar flow solver and estimate-audit harness")
    parser.add_argument("command", choices=MODES)
    parser.add_argument("--config", required=True, help="path to key = value config file")
    parser.add_argument("--out-dir", default=None, help="override the configured output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the configured seed")
    args = parser.parse_args(argv)

    try:
        cfg, errors = load_config(args.config)
    except OSError as err:
        print(f"micropol: cannot read config: {err}", file=sys.stderr)
        return EXIT_CONFIG
    if errors:
        for e in errors:
            print(f"micropol: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    dispatch = {
        "run": run_command,
        "fixed-point": fixed_point_command,
        "audit": audit_command,
        "sweep": sweep_command,
        "verify": verify_command,
    }
    return dispatch[args.command](cfg, out_dir=args.out_dir)


if __name__ == "__main__":
    sys.exit(main())

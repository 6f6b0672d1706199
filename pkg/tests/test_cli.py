import numpy as np
import pytest

from micropol.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_VIOLATION,
    RunConfig,
    fixed_point_command,
    main,
    parse_config,
    read_snapshot,
    run_command,
    sweep_command,
    verify_command,
    write_snapshot,
)
from micropol.grid import ScalarField, VelocityField, make_grid
from micropol.micropolar import SimState

from conftest import vortex_state


# ---------------------------------------------------------------------------
# config parsing

def test_parse_minimal_config_fills_defaults():
    cfg, errors = parse_config("nx = 32\nny = 32\n")
    assert errors == []
    assert cfg.nx == 32
    assert cfg.mode == "run"
    assert cfg.nu == pytest.approx(0.1)
    assert cfg.cfl_max == pytest.approx(0.9)


def test_parse_empty_config_is_valid():
    cfg, errors = parse_config("# nothing but a comment\n")
    assert errors == []
    assert cfg == RunConfig()


def test_parse_nonsquare_cells_reports_offending_line():
    cfg, errors = parse_config("nx = 64\nny = 32\nlx = 1.0\nly = 1.0\n")
    assert cfg is None
    assert len(errors) == 1
    assert "non-square" in errors[0]
    assert errors[0].startswith("line 2")


def test_parse_range_violation():
    cfg, errors = parse_config("kappa = -1\n")
    assert cfg is None
    assert "kappa" in errors[0]
    assert errors[0].startswith("line 1")


def test_parse_unknown_key_fatal():
    cfg, errors = parse_config("wibble = 3\n")
    assert cfg is None
    assert "unknown key" in errors[0]


def test_parse_collects_all_violations():
    text = "kappa = -1\nbogus = 2\nnu = not_a_number\n"
    cfg, errors = parse_config(text)
    assert cfg is None
    assert len(errors) == 3


def test_parse_duplicate_key():
    cfg, errors = parse_config("nx = 32\nnx = 64\nny = 32\n")
    assert cfg is None
    assert "duplicate" in errors[0]


def test_parse_missing_snapshot_path(tmp_path):
    cfg, errors = parse_config("initial_condition = snapshot:/nonexistent/file.mpol\n")
    assert cfg is None
    assert "does not exist" in errors[0]


# ---------------------------------------------------------------------------
# snapshot format

def test_snapshot_roundtrip_bytes(tmp_path):
    g = make_grid(16, 16, 2.0, 2.0)
    rng = np.random.default_rng(0)
    state = SimState(0.375, 7,
                     VelocityField(g, rng.standard_normal((17, 16)), rng.standard_normal((16, 17))),
                     ScalarField(g, rng.standard_normal((16, 16))))
    p1 = tmp_path / "a.mpol"
    write_snapshot(p1, state)
    loaded = read_snapshot(p1)
    assert loaded.t == 0.375
    assert np.array_equal(loaded.w.data, state.w.data)
    assert np.array_equal(loaded.u.ux, state.u.ux)
    p2 = tmp_path / "b.mpol"
    write_snapshot(p2, loaded)
    assert p1.read_bytes() == p2.read_bytes()


def test_snapshot_header_layout(tmp_path):
    g = make_grid(8, 8, 1.0, 1.0)
    state = SimState(0.0, 0, VelocityField.zeros(g), ScalarField.zeros(g))
    path = tmp_path / "s.mpol"
    write_snapshot(path, state)
    raw = path.read_bytes()
    assert raw[:4] == b"MPOL"
    assert int.from_bytes(raw[4:6], "little") == 1
    assert int.from_bytes(raw[6:10], "little") == 8
    assert len(raw) == 14 + 24 + 8 * (64 + 72 + 72)


# ---------------------------------------------------------------------------
# commands

def _base_cfg(tmp_path, **kwargs):
    defaults = dict(nx=32, ny=32, t_final=0.05, dt_max=0.005, diag_interval=0.02,
                    out_dir=str(tmp_path / "out"))
    defaults.update(kwargs)
    return RunConfig(**defaults)


def test_run_zero_ic(tmp_path):
    cfg = _base_cfg(tmp_path, initial_condition="zero", t_final=0.1)
    assert run_command(cfg) == EXIT_OK
    rows = (tmp_path / "out" / "diagnostics.csv").read_text().strip().splitlines()
    assert len(rows) >= 3
    for row in rows[1:]:
        vals = [float(v) for v in row.split(",")]
        assert all(v == 0.0 for v in vals[1:17])


def test_run_reference_short(tmp_path):
    cfg = _base_cfg(tmp_path)
    assert run_command(cfg) == EXIT_OK
    out = tmp_path / "out"
    assert (out / "final.mpol").exists()
    assert (out / "summary.txt").exists()


def test_run_determinism(tmp_path):
    cfg = _base_cfg(tmp_path)
    run_command(cfg, out_dir=tmp_path / "a")
    run_command(cfg, out_dir=tmp_path / "b")
    assert (tmp_path / "a" / "diagnostics.csv").read_bytes() == \
        (tmp_path / "b" / "diagnostics.csv").read_bytes()


def test_run_adversarial_cfl_flags_violations(tmp_path):
    cfg = _base_cfg(tmp_path, nx=64, ny=64, nu=0.002, kappa=0.002, ic_scale_u=1.0,
                    cfl_max=2.0, dt_max=0.05, t_final=0.3, diag_interval=0.1,
                    interp="linear")
    assert run_command(cfg) == EXIT_VIOLATION


def test_run_restart_from_snapshot(tmp_path):
    cfg = _base_cfg(tmp_path)
    assert run_command(cfg) == EXIT_OK
    snap = str(tmp_path / "out" / "final.mpol")
    cfg2 = _base_cfg(tmp_path, initial_condition=f"snapshot:{snap}",
                     out_dir=str(tmp_path / "restart"))
    assert run_command(cfg2) == EXIT_OK


def test_verify_default(tmp_path):
    cfg = RunConfig(verify_nx=32, ensemble_count=30, out_dir=str(tmp_path))
    assert verify_command(cfg) == EXIT_OK
    report = (tmp_path / "verify_report.csv").read_text()
    assert "poisson_dirichlet_order" in report
    assert "FAIL" not in report


def test_verify_coarse_grid_tier(tmp_path):
    cfg = RunConfig(verify_nx=8, ensemble_count=20, out_dir=str(tmp_path))
    assert verify_command(cfg) == EXIT_OK
    report = (tmp_path / "verify_report.csv").read_text()
    assert "coarse-grid tolerance tier" in report


def test_verify_sabotage_negative(tmp_path):
    cfg = RunConfig(verify_nx=32, ensemble_count=20, sabotage="divergence",
                    out_dir=str(tmp_path))
    assert verify_command(cfg) == EXIT_VIOLATION
    report = (tmp_path / "verify_report.csv").read_text()
    assert "divfree_identity" in report and "FAIL" in report


def test_sweep_single_cell_equals_run(tmp_path):
    cfg = _base_cfg(tmp_path, mode="sweep", out_dir=str(tmp_path / "sweep"))
    assert sweep_command(cfg) == EXIT_OK
    run_command(_base_cfg(tmp_path), out_dir=tmp_path / "single")
    assert (tmp_path / "sweep" / "cell_000" / "diagnostics.csv").read_bytes() == \
        (tmp_path / "single" / "diagnostics.csv").read_bytes()


def test_sweep_cardinality_and_kappa_zero_column(tmp_path):
    cfg = _base_cfg(tmp_path, mode="sweep", sweep_kappa=(0.0, 0.1), sweep_nu=(0.1, 0.2),
                    out_dir=str(tmp_path / "sw"))
    code = sweep_command(cfg)
    assert code in (EXIT_OK, EXIT_VIOLATION)
    rows = (tmp_path / "sw" / "sweep_summary.csv").read_text().strip().splitlines()
    assert len(rows) == 5  # header + 4 cells
    header = rows[0].split(",")
    ik = header.index("kappa")
    im = header.index("winf_monotone")
    for row in rows[1:]:
        cells = row.split(",")
        if float(cells[ik]) == 0.0:
            assert cells[im] == "True"


def test_fixed_point_command(tmp_path):
    cfg = _base_cfg(tmp_path, mode="fixed-point", ic_scale_u=0.05, ic_scale_w=0.1,
                    t_final=0.125, dt_fixed=1.0 / 64, fp_tol=1e-8,
                    out_dir=str(tmp_path / "fp"))
    assert fixed_point_command(cfg) == EXIT_OK
    assert (tmp_path / "fp" / "fixed_point_report.csv").exists()


def test_main_config_error(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("kappa = -1\n")
    assert main(["run", "--config", str(bad)]) == EXIT_CONFIG


def test_main_verify_roundtrip(tmp_path):
    cfgfile = tmp_path / "v.cfg"
    cfgfile.write_text(f"verify_nx = 32\nensemble_count = 20\nout_dir = {tmp_path}\n")
    assert main(["verify", "--config", str(cfgfile)]) == EXIT_OK

import numpy as np
import pytest

from kbf import ParseError, ValidationError, report_from_csv
from kbf.cli import emit_config, parse_config, run_cli

TWO_PI = 2.0 * np.pi

FULL_CONFIG = """\
# canonical demonstration setup: every mechanism switched on
nu = 1
mu = 1.0
gamma = 1.0
eps_conv = 1
eps_react = 1
n_modes = 256
dt = 0.125
t_final = 1
ic.kind = paper
"""

HEAT_CONFIG = """\
nu = 1
mu = 0
gamma = 0
eps_conv = 0
eps_react = 0
n_modes = 64
dt = 0.1
t_final = 1
ic.kind = paper
"""


def read_rows(path):
    xs, ys = [], []
    for line in path.read_text().splitlines():
        if line.startswith("#") or line == "x,y" or not line.strip():
            continue
        x, y = line.split(",")
        xs.append(float(x))
        ys.append(float(y))
    return np.array(xs), np.array(ys)


# ----- config parsing -----

def test_defaults_applied():
    cfg = parse_config("", {
        "nu": "1", "mu": "0", "gamma": "0", "eps_conv": "0", "eps_react": "0",
        "n_modes": "16", "dt": "0.5", "t_final": "1", "ic.kind": "constant",
    })
    assert cfg.grid.domain_start == 0.0
    assert cfg.grid.domain_length == pytest.approx(TWO_PI)
    assert cfg.solve.scheme == "strang"
    assert cfg.solve.nonlinear_cfg.substeps == 1
    assert cfg.solve.nonlinear_cfg.dealias == "none"
    assert cfg.norm.kind == "l2"


def test_full_config_file():
    cfg = parse_config(FULL_CONFIG)
    p = cfg.params
    assert (p.nu, p.mu, p.gamma, p.eps_conv, p.eps_react) == (1.0, 1.0, 1.0, 1.0, 1.0)
    assert cfg.grid.n_modes == 256
    assert cfg.solve.t_final == 1.0
    assert cfg.ic.kind == "paper"


def test_flags_override_file():
    cfg = parse_config(FULL_CONFIG, {"nu": "0.5", "scheme": "lie_trotter"})
    assert cfg.params.nu == 0.5
    assert cfg.solve.scheme == "lie_trotter"


def test_ic_flag_alias(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(HEAT_CONFIG)
    out = tmp_path / "out"
    code = run_cli([
        "solve", "--config", str(cfg_file), "--ic", "constant", "--ic-c", "1",
        "--output", str(out),
    ])
    assert code == 0
    _, ys = read_rows(out / "final.csv")
    np.testing.assert_allclose(ys, 1.0, atol=1e-12)


def test_negative_nu_rejected():
    with pytest.raises(ValidationError) as info:
        parse_config(FULL_CONFIG, {"nu": "-1"})
    assert info.value.key == "nu"


def test_unknown_key_rejected():
    with pytest.raises(ValidationError) as info:
        parse_config(FULL_CONFIG + "viscosity = 2\n")
    assert info.value.key == "viscosity"


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as info:
        parse_config("nu = 1\nthis is not a pair\n")
    assert info.value.line == 2


def test_missing_required_key():
    with pytest.raises(ValidationError) as info:
        parse_config("nu = 1\n")
    assert info.value.key in ("mu", "gamma", "eps_conv", "eps_react", "n_modes", "dt", "t_final", "ic.kind")


def test_config_round_trip():
    cfg = parse_config(FULL_CONFIG, {"output": "/tmp/out", "norm": "h2", "substeps": "3"})
    again = parse_config(emit_config(cfg))
    assert again == cfg


# ----- CLI dispatch -----

def test_unknown_subcommand_exits_1(capsys):
    assert run_cli(["frobnicate"]) == 1
    err = capsys.readouterr().err
    assert "usage" in err.lower()
    assert "kbf: error:" in err


def test_missing_subcommand_exits_1(capsys):
    assert run_cli([]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_solve_heat_snapshot(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(HEAT_CONFIG)
    out = tmp_path / "out"
    code = run_cli(["solve", "--config", str(cfg_file), "--output", str(out)])
    assert code == 0
    xs, ys = read_rows(out / "final.csv")
    exact = 0.5 + 0.25 * np.exp(-1.0) * np.sin(xs)
    assert np.max(np.abs(ys - exact)) < 1e-10


def test_solve_snapshot_reparses_to_in_memory_values(tmp_path, capsys):
    from kbf import build_initial, evolve, to_physical
    from kbf.cli import parse_config as pc

    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(HEAT_CONFIG)
    out = tmp_path / "out"
    assert run_cli(["solve", "--config", str(cfg_file), "--output", str(out)]) == 0

    cfg = pc(HEAT_CONFIG)
    initial = build_initial(cfg.ic, cfg.grid)
    traj = evolve(initial, cfg.params, cfg.solve)
    expected = to_physical(traj.final)
    _, ys = read_rows(out / "final.csv")
    assert np.max(np.abs(ys - expected)) <= 1e-15 * max(1.0, np.max(np.abs(expected)))


def test_solve_with_stride_writes_snapshots(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(HEAT_CONFIG + "snapshot_stride = 5\n")
    out = tmp_path / "out"
    assert run_cli(["solve", "--config", str(cfg_file), "--output", str(out)]) == 0
    names = sorted(p.name for p in out.glob("snapshot_*.csv"))
    assert names == ["snapshot_000000.csv", "snapshot_000005.csv", "snapshot_000010.csv"]


def test_solve_is_bit_identical_across_runs(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(HEAT_CONFIG)
    out = tmp_path / "a"
    assert run_cli(["solve", "--config", str(cfg_file), "--output", str(out)]) == 0
    first = (out / "final.csv").read_bytes()
    assert run_cli(["solve", "--config", str(cfg_file), "--output", str(out)]) == 0
    assert (out / "final.csv").read_bytes() == first


def test_blow_up_exits_2(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        "nu = 0\nmu = 0\ngamma = 0\neps_conv = 0\neps_react = 1\n"
        "n_modes = 16\ndt = 0.05\nt_final = 2\nic.kind = constant\nic.c = -0.5\n"
    )
    out = tmp_path / "out"
    code = run_cli(["solve", "--config", str(cfg_file), "--output", str(out)])
    assert code == 2
    err = capsys.readouterr().err
    assert err.startswith("kbf: error: BlowUp:")
    assert len(err.strip().splitlines()) == 1


def test_validation_failure_exits_1(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(HEAT_CONFIG)
    code = run_cli(["solve", "--config", str(cfg_file), "--nu", "-3", "--output", str(tmp_path / "o")])
    assert code == 1
    assert "kbf: error: ValidationError" in capsys.readouterr().err


def test_converge_time_matches_target_orders(tmp_path, capsys, full_params):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(FULL_CONFIG)
    out = tmp_path / "out"
    code = run_cli(["converge-time", "--config", str(cfg_file), "--output", str(out)])
    assert code == 0
    report = report_from_csv((out / "convergence_time.csv").read_text())
    # frozen regression targets for this configuration
    targets = [2.0693, 2.0063, 2.0381, 2.0024, 1.9899]
    assert len(report.orders) == len(targets)
    for ours, theirs in zip(report.orders, targets):
        assert abs(ours - theirs) <= 0.15


def test_converge_space_runs(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(FULL_CONFIG)
    out = tmp_path / "out"
    code = run_cli([
        "converge-space", "--config", str(cfg_file), "--output", str(out),
        "--modes", "8,16", "--study-dt", "0.0078125",
    ])
    assert code == 0
    report = report_from_csv((out / "convergence_space.csv").read_text())
    assert report.axis == (8, 16)
    assert report.errors[1] < report.errors[0]


def test_oracle_check_passes(capsys):
    assert run_cli(["oracle-check"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 5
    assert all(line.startswith("PASS") for line in lines)

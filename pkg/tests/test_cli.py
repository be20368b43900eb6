"""Configuration loading, subcommand behavior, exit codes, and byte-stable
output."""

import json
import math

import numpy as np
import pytest

from sbparity import cli
from sbparity.errors import ConfigError

from conftest import bare_fock_ground_energy


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


SINGLE_MODE_THEOREM = {
    "model": {"delta": 0.2, "omega_c": 1.0, "s": 1.0, "alpha": 0.0,
              "modes": [[1.0, 1.0]]},
    "trunc": {"policy": "per-mode", "cap": 40},
}


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

def test_minimal_config_gets_defaults(tmp_path):
    path = write_config(tmp_path, {"delta": 0.1, "omega_c": 1, "s": 1, "alpha": 0.2})
    cfg = cli.load_config(path)
    assert cfg.delta == 0.1
    assert cfg.n_modes == 30
    assert cfg.lambda_disc == 2.0
    assert cfg.cap == 20
    assert cfg.tol == 1e-10
    assert cfg.epsilon == 0.01
    assert cfg.m_ref == 0
    assert cfg.policy is None


def test_negative_s_names_field_and_bound(tmp_path):
    path = write_config(tmp_path, {"delta": 0.1, "omega_c": 1, "s": -1, "alpha": 0.2})
    with pytest.raises(ConfigError) as err:
        cli.load_config(path)
    message = str(err.value)
    assert '"model.s"' in message
    assert "s > 0" in message


def test_duplicate_key_is_a_parse_error(tmp_path):
    path = tmp_path / "dup.json"
    path.write_text('{"delta": 0.1, "delta": 0.2, "omega_c": 1, "s": 1, "alpha": 0}')
    with pytest.raises(ConfigError) as err:
        cli.load_config(str(path))
    assert "duplicate" in str(err.value)


def test_unknown_key_rejected(tmp_path):
    path = write_config(
        tmp_path, {"delta": 0.1, "omega_c": 1, "s": 1, "alpha": 0.2, "bogus": 1}
    )
    with pytest.raises(ConfigError) as err:
        cli.load_config(path)
    assert "bogus" in str(err.value)


def test_shorthand_and_model_key_conflict(tmp_path):
    path = write_config(
        tmp_path,
        {"delta": 0.1, "omega_c": 1, "s": 1, "alpha": 0.2, "model": {"delta": 0.3}},
    )
    with pytest.raises(ConfigError):
        cli.load_config(path)


def test_malformed_json_reports_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"delta": 0.1,,}')
    with pytest.raises(ConfigError) as err:
        cli.load_config(str(path))
    assert "line 1" in str(err.value)


def test_missing_required_field(tmp_path):
    path = write_config(tmp_path, {"delta": 0.1, "omega_c": 1, "s": 1})
    with pytest.raises(ConfigError) as err:
        cli.load_config(path)
    assert "model.alpha" in str(err.value)


# ---------------------------------------------------------------------------
# theorem
# ---------------------------------------------------------------------------

def test_theorem_degenerate_at_zero_delta(tmp_path, capsys):
    path = write_config(
        tmp_path,
        {
            "model": {"delta": 0.0, "omega_c": 1.0, "s": 1.0, "alpha": 0.2},
            "disc": {"n_modes": 1, "lambda_disc": 2.0},
            "trunc": {"cap": 10},
        },
    )
    code = cli.main(["theorem", "--config", path])
    out = capsys.readouterr().out
    assert code == 0
    report = json.loads(out)
    assert report["verdict"] == "degenerate-at-delta-zero"
    assert report["config"]["model"]["delta"] == 0


def test_theorem_decoupled_limit(tmp_path, capsys):
    path = write_config(
        tmp_path,
        {
            "model": {"delta": 0.4, "omega_c": 1.0, "s": 1.0, "alpha": 0.0,
                      "modes": [[1.0, 0.0]]},
            "trunc": {"cap": 6},
        },
    )
    code = cli.main(["theorem", "--config", path])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["e_gs"] == pytest.approx(-0.2, abs=1e-12)
    assert report["margin"] == pytest.approx(0.2, abs=1e-12)
    assert report["measured_gap"] == pytest.approx(0.4, abs=1e-12)


def test_theorem_single_mode_against_oracle(tmp_path, capsys):
    path = write_config(tmp_path, SINGLE_MODE_THEOREM)
    code = cli.main(["theorem", "--config", path])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["verdict"] == "strictly-below"
    oracle = -0.25 - bare_fock_ground_energy(1.0, 1.0, 0.2, 200)
    assert report["margin"] == pytest.approx(oracle, abs=1e-8)
    assert report["versions"]["sbparity"]


def test_theorem_json_round_trips_bytes(tmp_path, capsys):
    path = write_config(tmp_path, SINGLE_MODE_THEOREM)
    cli.main(["theorem", "--config", path])
    out = capsys.readouterr().out
    assert cli.dumps(json.loads(out)) == out


def test_theorem_solver_failure_exits_3(tmp_path, capsys):
    config = {
        "model": SINGLE_MODE_THEOREM["model"],
        "trunc": SINGLE_MODE_THEOREM["trunc"],
        "solver": {"tol": 1e-30},
    }
    path = write_config(tmp_path, config)
    code = cli.main(["theorem", "--config", path])
    out = json.loads(capsys.readouterr().out)
    assert code == 3
    assert out["error"]["type"] == "SolverError"


def test_theorem_writes_out_file(tmp_path, capsys):
    path = write_config(tmp_path, SINGLE_MODE_THEOREM)
    out_file = tmp_path / "report.json"
    code = cli.main(["theorem", "--config", path, "--out", str(out_file)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out_file.read_text())["verdict"] == "strictly-below"


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def test_spectrum_zero_delta_matches_ladder(tmp_path, capsys):
    path = write_config(
        tmp_path,
        {
            "model": {"delta": 0.0, "omega_c": 1.0, "s": 1.0, "alpha": 0.0,
                      "modes": [[1.0, 1.0]]},
            "trunc": {"cap": 4},
            "solver": {"k_levels": 5},
        },
    )
    code = cli.main(["spectrum", "--config", path])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    ladder = [n - 0.25 for n in range(5)]
    assert out["plus"]["values"] == pytest.approx(ladder, abs=1e-12)
    assert out["minus"]["values"] == pytest.approx(ladder, abs=1e-12)
    assert out["degenerate_energy_set"] == pytest.approx(ladder, abs=1e-15)
    assert len(out["plus"]["vectors"]) == 5


def test_spectrum_dump_matrix(tmp_path, capsys):
    path = write_config(
        tmp_path,
        {
            "model": {"delta": 0.3, "omega_c": 1.0, "s": 1.0, "alpha": 0.0,
                      "modes": [[1.0, 1.0]]},
            "trunc": {"cap": 2},
        },
    )
    prefix = str(tmp_path / "mat")
    code = cli.main(["spectrum", "--config", path, "--dump-matrix", prefix])
    capsys.readouterr()
    assert code == 0
    for name in ("hplus", "hminus"):
        lines = (tmp_path / f"mat_{name}.csv").read_text().splitlines()
        assert lines[0] == "i,j,value"
        assert len(lines) == 1 + 6  # lower triangle of a 3x3 matrix


# ---------------------------------------------------------------------------
# parity-audit
# ---------------------------------------------------------------------------

def test_parity_audit_zero_coupling(tmp_path, capsys):
    path = write_config(
        tmp_path,
        {
            "model": {"delta": 0.1, "omega_c": 1.0, "s": 1.0, "alpha": 0.0},
            "disc": {"n_modes": 2, "lambda_disc": 2.0},
            "trunc": {"cap": 3},
        },
    )
    code = cli.main(["parity-audit", "--config", path])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["deficiency"] == 0
    assert all(v == 0 for v in out["d2_diag_residuals"])
    assert out["m"] == [0, 0]
    assert out["n_tr"] == 3


def test_parity_audit_dump_tables(tmp_path, capsys):
    path = write_config(
        tmp_path,
        {
            "model": {"delta": 0.1, "omega_c": 1.0, "s": 1.0, "alpha": 0.0,
                      "modes": [[1.0, 1.0]]},
            "trunc": {"cap": 1},
        },
    )
    prefix = str(tmp_path / "tab")
    code = cli.main(["parity-audit", "--config", path, "--dump-tables", prefix])
    capsys.readouterr()
    assert code == 0
    l_lines = (tmp_path / "tab_l.csv").read_text().splitlines()
    d_lines = (tmp_path / "tab_d.csv").read_text().splitlines()
    assert l_lines[0] == "row,col,value"
    assert d_lines[0] == "row,col,value"
    # D = exp(-2 q^2) * L entry by entry.
    for l_row, d_row in zip(l_lines[1:], d_lines[1:]):
        li, lj, lv = l_row.split(",")
        di, dj, dv = d_row.split(",")
        assert (li, lj) == (di, dj)
        assert float(dv) == pytest.approx(math.exp(-0.5) * float(lv), rel=1e-12)


# ---------------------------------------------------------------------------
# alpha-c and closure
# ---------------------------------------------------------------------------

def test_alpha_c_command(tmp_path, capsys):
    path = write_config(
        tmp_path,
        {
            "model": {"delta": 0.1, "omega_c": 1.0, "s": 0.5, "alpha": 0.1},
            "disc": {"n_modes": 10, "lambda_disc": 2.0},
            "trunc": {"cap": 10},
        },
    )
    code = cli.main(["alpha-c", "--config", path])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["alpha_c"] > 0.0
    assert out["epsilon"] == 0.01
    assert out["n_tr"] == 10
    assert out["m_ref"] == [0] * 10


def test_alpha_c_epsilon_override(tmp_path, capsys):
    base = {
        "model": {"delta": 0.1, "omega_c": 1.0, "s": 0.5, "alpha": 0.1},
        "disc": {"n_modes": 10, "lambda_disc": 2.0},
        "trunc": {"cap": 10},
    }
    path = write_config(tmp_path, base)
    cli.main(["alpha-c", "--config", path])
    small = json.loads(capsys.readouterr().out)
    cli.main(["alpha-c", "--config", path, "--epsilon", "0.05"])
    large = json.loads(capsys.readouterr().out)
    assert large["epsilon"] == 0.05
    assert large["alpha_c"] > small["alpha_c"]


def test_closure_command(tmp_path, capsys):
    path = write_config(
        tmp_path,
        {
            "model": {"delta": 0.1, "omega_c": 1.0, "s": 1.0, "alpha": 0.1},
            "disc": {"n_modes": 100, "lambda_disc": 2.0},
            "trunc": {"cap": 9},
        },
    )
    code = cli.main(["closure", "--config", path])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["ratio_value"] == 10.0
    assert out["ratio"] == "10/1"
    assert out["unknowns_discarded"] == 100 * 10 ** 99
    assert out["independent_equations"] == 10 ** 100


# ---------------------------------------------------------------------------
# phase-diagram
# ---------------------------------------------------------------------------

PHASE_CONFIG = {
    "model": {"delta": 0.1, "omega_c": 1.0, "s": 1.0, "alpha": 0.1},
    "disc": {"n_modes": 10, "lambda_disc": 2.0},
    "trunc": {"cap": 10},
    "sweep": {"variable": "s", "from": 0.4, "to": 1.0, "steps": 4},
}


def test_phase_diagram_runs_and_repeats_byte_identically(tmp_path, capsys):
    path = write_config(tmp_path, PHASE_CONFIG)
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    assert cli.main(["phase-diagram", "--config", path, "--out", str(out_a)]) == 0
    assert cli.main(["phase-diagram", "--config", path, "--out", str(out_b)]) == 0
    capsys.readouterr()
    assert out_a.read_bytes() == out_b.read_bytes()
    lines = out_a.read_text().splitlines()
    assert lines[0] == "s,alpha_c,epsilon,n_tr,n_modes,lambda_disc,beta,o_value,m_ref"
    assert len(lines) == 5
    for line in lines[1:]:
        cells = line.split(",")
        assert float(cells[1]) > 0.0
        assert cells[8] == "0"
    assert not out_a.read_text().endswith("\r\n")


def test_phase_diagram_jobs_do_not_change_bytes(tmp_path, capsys):
    path = write_config(tmp_path, PHASE_CONFIG)
    out_a = tmp_path / "serial.csv"
    out_b = tmp_path / "parallel.csv"
    assert cli.main(["phase-diagram", "--config", path, "--out", str(out_a)]) == 0
    assert cli.main(
        ["phase-diagram", "--config", path, "--jobs", "3", "--out", str(out_b)]
    ) == 0
    capsys.readouterr()
    assert out_a.read_bytes() == out_b.read_bytes()


def test_phase_diagram_reference_column(tmp_path, capsys):
    path = write_config(tmp_path, PHASE_CONFIG)
    ref = tmp_path / "ref.csv"
    ref.write_text("s,alpha_c,label\n0.5,0.1,qmc\n1.0,0.3,qmc\n")
    out = tmp_path / "with_ref.csv"
    code = cli.main(
        ["phase-diagram", "--config", path, "--reference", str(ref), "--out", str(out)]
    )
    capsys.readouterr()
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].endswith(",alpha_c_ref")
    first = lines[1].split(",")   # s = 0.4 lies outside the reference range
    assert first[-1] == "NaN"
    last = lines[-1].split(",")   # s = 1.0 hits the reference node exactly
    assert float(last[-1]) == pytest.approx(0.3)
    mid = lines[2].split(",")     # s = 0.6 interpolates linearly
    assert float(mid[-1]) == pytest.approx(0.1 + (0.6 - 0.5) / 0.5 * 0.2)


def test_phase_diagram_unbracketable_point_gives_nan_and_exit_4(tmp_path, capsys):
    config = {
        "model": {"delta": 0.1, "omega_c": 1.0, "s": 1.0, "alpha": 0.1},
        "disc": {"n_modes": 1, "lambda_disc": 2.0},
        "trunc": {"cap": 40000},
        "parity": {"epsilon": 0.5},
        "sweep": {"variable": "s", "from": 1.0, "to": 1.0, "steps": 1},
    }
    path = write_config(tmp_path, config)
    out = tmp_path / "nan.csv"
    code = cli.main(["phase-diagram", "--config", path, "--out", str(out)])
    capsys.readouterr()
    assert code == 4
    row = out.read_text().splitlines()[1].split(",")
    assert row[1] == "NaN"
    assert math.isfinite(float(row[6]))  # beta is still reported


def test_phase_diagram_range_validation(tmp_path, capsys):
    config = dict(PHASE_CONFIG)
    config["sweep"] = {"variable": "s", "from": 0.4, "to": 1.5, "steps": 3}
    path = write_config(tmp_path, config)
    code = cli.main(["phase-diagram", "--config", path])
    out = json.loads(capsys.readouterr().out)
    assert code == 1
    assert "(0, 1.2]" in out["error"]["message"]


def test_reference_curve_validation(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("s,alpha_c,label\n1.0,0.3,qmc\n0.5,0.1,qmc\n")
    with pytest.raises(ConfigError):
        cli.load_reference_curve(str(bad))
    mixed = tmp_path / "mixed.csv"
    mixed.write_text("s,alpha_c,label\n0.5,0.1,a\n1.0,0.3,b\n")
    with pytest.raises(ConfigError):
        cli.load_reference_curve(str(mixed))


# ---------------------------------------------------------------------------
# exit codes and serialization details
# ---------------------------------------------------------------------------

def test_usage_error_exits_1(capsys):
    code = cli.main(["theorem"])  # missing --config
    capsys.readouterr()
    assert code == 1
    code = cli.main([])  # missing subcommand
    capsys.readouterr()
    assert code == 1


def test_theorem_output_is_byte_stable(tmp_path, capsys):
    path = write_config(tmp_path, SINGLE_MODE_THEOREM)
    cli.main(["theorem", "--config", path])
    first = capsys.readouterr().out
    cli.main(["theorem", "--config", path])
    second = capsys.readouterr().out
    assert first == second


def test_invariant_violation_exits_2(tmp_path, capsys, monkeypatch):
    from sbparity.errors import InvariantViolation

    def broken(params, tol=1e-10):
        raise InvariantViolation("forced for the exit-code contract")

    monkeypatch.setattr(cli, "theorem_report", broken)
    path = write_config(tmp_path, SINGLE_MODE_THEOREM)
    code = cli.main(["theorem", "--config", path])
    out = json.loads(capsys.readouterr().out)
    assert code == 2
    assert "invariant_violation" in out or out.get("error", {}).get("type") == "InvariantViolation"


def test_config_error_exits_1(tmp_path, capsys):
    path = write_config(tmp_path, {"delta": 0.1, "omega_c": 1, "s": -2, "alpha": 0.2})
    code = cli.main(["theorem", "--config", path])
    out = json.loads(capsys.readouterr().out)
    assert code == 1
    assert out["error"]["type"] == "ConfigError"


def test_capacity_error_exits_1(tmp_path, capsys):
    # Default disc (30 modes) with a per-mode cap is far beyond the basis guard.
    path = write_config(
        tmp_path,
        {"delta": 0.1, "omega_c": 1, "s": 1, "alpha": 0.2,
         "trunc": {"policy": "per-mode", "cap": 20}},
    )
    code = cli.main(["theorem", "--config", path])
    out = json.loads(capsys.readouterr().out)
    assert code == 1
    assert out["error"]["type"] == "CapacityError"


def test_format_float_round_trip():
    values = [0.1, -0.0, 1.0, math.pi, 1e-300, 2.0 ** -52, 12345.6789]
    for v in values:
        text = cli.format_float(v)
        assert float(text) == v or (v == 0.0 and float(text) == 0.0)
    assert cli.format_float(float("nan")) == "NaN"
    assert cli.format_float(float("inf")) == "inf"
    assert cli.format_float(-0.0) == "0"


def test_dumps_is_parseable_and_stable():
    payload = {"a": 0.1, "b": [1, 2.5, None, True], "c": {"nested": "x"}}
    text = cli.dumps(payload)
    assert cli.dumps(json.loads(text)) == text

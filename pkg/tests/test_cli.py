"""
Tests for the command-line front end
Run with pytest, or directly: python tests/test_cli.py
"""

import json

import numpy as np
import pytest

from src.cli import EXIT_INPUT_ERROR, EXIT_NUMERICAL_FAILURE, EXIT_OK, run
from src.cli.handlers import HANDLERS
from src.utils.errors import NumericalFailure

M2_SAMPLE = ["sample", "--model", "m2", "--omega", "1", "--gamma", "0.2",
             "--theta-i", "0.7854", "--theta-m", "0", "--points", "50", "--shots", "1000", "--seed", "7"]


def csv_rows(text):
    lines = text.strip().splitlines()
    return lines[0].split(","), [[float(cell) for cell in line.split(",")] for line in lines[1:]]


def test_trace_csv(capsys):
    code = run(["trace", "--model", "m1z", "--omega", "6.283", "--gamma", "0.5",
                "--theta-i", "1.5708", "--theta-m", "1.5708", "--t-max", "3", "--points", "50"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    header, rows = csv_rows(out)
    assert header == ["time", "p"]
    assert len(rows) == 50
    assert rows[0][0] == 0.0
    assert rows[0][1] == pytest.approx(1.0, abs=1e-12)
    assert rows[-1][0] == 3.0
    print("✓ trace subcommand emits (t, p)")


def test_trace_multiple_models_json(capsys):
    code = run(["trace", "--model", "m1x,m2", "--omega", "1", "--gamma", "0.2",
                "--theta-i", "0.7854", "--theta-m", "0", "--points", "20", "--format", "json"])
    data = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert list(data) == ["time", "p_m1x", "p_m2"]
    assert len(data["p_m2"]) == 20


def test_sample_is_byte_identical(capsys):
    assert run(M2_SAMPLE) == EXIT_OK
    first = capsys.readouterr().out
    assert run(M2_SAMPLE) == EXIT_OK
    second = capsys.readouterr().out
    assert first == second
    header, rows = csv_rows(first)
    assert header == ["time", "p_estimate", "shots"]
    assert all(row[2] == 1000 for row in rows)


def test_seed_defaults_to_environment(capsys, monkeypatch):
    without_seed = [arg for arg in M2_SAMPLE if arg not in ("--seed", "7")]
    monkeypatch.setenv("BLOCHID_SEED", "7")
    assert run(without_seed) == EXIT_OK
    from_env = capsys.readouterr().out
    assert run(M2_SAMPLE) == EXIT_OK
    assert capsys.readouterr().out == from_env


def test_sample_then_discriminate(tmp_path, capsys):
    trace_path = tmp_path / "trace.csv"
    assert run(M2_SAMPLE + ["--out", str(trace_path)]) == EXIT_OK
    assert trace_path.exists()
    code = run(["discriminate", "--in", str(trace_path), "--candidates", "m1x,m2",
                "--theta-i", "0.7854", "--theta-m", "0"])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert report["verdict"] == "m2"
    assert [fit["kind"] for fit in report["fits"]] == ["m1x", "m2"]
    print("✓ sample | discriminate selects m2")


def test_fit_with_config(tmp_path, capsys):
    trace_path = tmp_path / "trace.json"
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({
        "compute_profile_flags": False,
        "fixed_geometry": {"theta_I": 0.7854, "theta_M": 0.0},
    }))
    assert run(M2_SAMPLE + ["--out", str(trace_path)]) == EXIT_OK
    code = run(["fit", "--model", "m2", "--in", str(trace_path), "--config", str(config_path)])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert report["geom_hat"]["fixed"] is True
    assert report["profile_flags"] == {}
    assert report["params_hat"]["omega"] == pytest.approx(1.0, rel=0.1)


def test_identifiability_example(capsys):
    code = run(["identifiability", "--model", "m2", "--theta-i", "1.5708", "--theta-m", "0.3"])
    assert code == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"omega": "unidentified", "gamma": "identified"}


def test_identifiability_degrees_and_reasons(capsys):
    code = run(["identifiability", "--model", "m1z", "--theta-i", "90", "--theta-m", "90",
                "--degrees", "--reasons"])
    data = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert data["omega"]["status"] == "identified"
    assert data["gamma"]["reason"]


def test_bloch_columns_and_engines(capsys):
    base = ["bloch", "--model", "m3", "--omega", "1.5", "--gamma", "0.4", "--theta-i", "0.6",
            "--t-max", "8", "--points", "30"]
    assert run(base) == EXIT_OK
    header, analytic = csv_rows(capsys.readouterr().out)
    assert header == ["time", "vx", "vy", "vz"]
    assert len(analytic) == 30
    assert run(base + ["--engine", "expm"]) == EXIT_OK
    _, numeric = csv_rows(capsys.readouterr().out)
    np.testing.assert_allclose(np.array(numeric), np.array(analytic), atol=1e-8)


def test_help_lists_units(capsys):
    assert run(["--help"]) == EXIT_OK
    assert "rad/time" in capsys.readouterr().out
    for command in HANDLERS:
        assert run([command, "--help"]) == EXIT_OK
        assert "1/time" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["trace", "--model", "m1z", "--omega", "1", "--gamma", "0.1", "--theta-i", "0", "--theta-m", "0", "--bogus"],
    ["trace", "--model", "m1z", "--omega", "1", "--theta-i", "0", "--theta-m", "0"],
    ["trace", "--model", "m9", "--omega", "1", "--gamma", "0.1", "--theta-i", "0", "--theta-m", "0"],
    ["trace", "--model", "m1z", "--omega", "1", "--gamma", "-0.1", "--theta-i", "0", "--theta-m", "0"],
    ["fit", "--model", "m2", "--in", "does-not-exist.csv"],
    ["discriminate", "--in", "x.csv", "--candidates", "m2", "--theta-i", "0.1"],
])
def test_input_errors_exit_one(argv, capsys):
    assert run(argv) == EXIT_INPUT_ERROR
    captured = capsys.readouterr()
    assert captured.out == ""
    assert len(captured.err.strip().splitlines()) == 1


def test_bad_config_key_exits_one(tmp_path, capsys):
    trace_path = tmp_path / "trace.csv"
    config_path = tmp_path / "config.json"
    config_path.write_text('{"startz": 3}')
    assert run(M2_SAMPLE + ["--out", str(trace_path)]) == EXIT_OK
    assert run(["fit", "--model", "m2", "--in", str(trace_path), "--config", str(config_path)]) == EXIT_INPUT_ERROR


def test_numerical_failure_exits_two(monkeypatch, capsys):
    def explode(args):
        raise NumericalFailure("integrator step size underflow")

    monkeypatch.setitem(HANDLERS, "trace", explode)
    code = run(["trace", "--model", "m1z", "--omega", "1", "--gamma", "0.1",
                "--theta-i", "0", "--theta-m", "0"])
    assert code == EXIT_NUMERICAL_FAILURE
    assert "step size underflow" in capsys.readouterr().err


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-v"]))

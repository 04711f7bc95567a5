import json
import math

import pytest

from expmoments.cli import main, parse_model_literal


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_model_literal():
    m = parse_model_literal("1,2^3,-0.5")
    assert m.weights == (1.0, 2.0, -0.5)
    assert m.shapes == (1.0, 3.0, 1.0)
    m = parse_model_literal("1e-2^2")
    assert m.weights == (0.01,)
    with pytest.raises(ValueError):
        parse_model_literal("")
    with pytest.raises(ValueError):
        parse_model_literal("1,,2")
    with pytest.raises(ValueError):
        parse_model_literal("1^-2")


def test_moment_command_values(capsys):
    code, out, _ = run(capsys, "moment", "-m", "1,-1", "-p", "1.5", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == pytest.approx(math.gamma(2.5), rel=1e-9)
    assert payload["schema_version"] == 1

    code, out, _ = run(capsys, "moment", "-m", "1,2", "-p", "2", "--format", "json")
    assert json.loads(out)["value"] == 14.0

    code, out, _ = run(capsys, "moment", "-m", "1", "-p", "1", "--shift", "1", "--format", "json")
    assert json.loads(out)["value"] == pytest.approx(2.0 / math.e, rel=1e-8)


def test_moment_exit_codes(capsys):
    code, _, err = run(capsys, "moment", "-m", "1,,2", "-p", "2")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "moment", "-m", "1", "-p", "-2")
    assert code == 3 and "error" in err


def test_json_output_is_deterministic(capsys):
    args = ("schur", "-p", "2", "-n", "3", "--trials", "15", "--seed", "4", "--format", "json")
    _, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    assert out1 == out2


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "hunter", "--trials", "50", "--format", "json")
    assert code == 0
    assert json.loads(out)["pass"] is True
    code, out, _ = run(capsys, "verify", "mrtt", "-p", "0.5", "--trials", "20", "--format", "json")
    assert code == 0


def test_verify_remaining_suites(capsys):
    for argv in (
        ("verify", "theorem1", "-p", "3", "--trials", "40"),
        ("verify", "all-equal",),
        ("verify", "gamma", "--trials", "8"),
        ("verify", "claim", "--trials", "500"),
        ("verify", "stepII-bound", "--trials", "10"),
    ):
        code, _, _ = run(capsys, *argv, "--format", "json")
        assert code == 0, argv


def test_schur_report_carries_certificate_note(capsys):
    code, out, _ = run(capsys, "schur", "-p", "3", "-n", "2", "--trials", "10", "--format", "json")
    assert code == 0
    notes = json.loads(out)["notes"]
    assert any("concav" in n.lower() for n in notes)


def test_schur_command(capsys):
    code, out, _ = run(capsys, "schur", "-p", "5", "-n", "2", "--trials", "120", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "neither"
    assert len(payload["rows"]) == 120

    code, out, _ = run(capsys, "schur", "-p", "2", "-n", "3", "--trials", "60", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("trial,x,y,")
    assert len(lines) == 61


def test_failure_command(capsys):
    code, out, _ = run(capsys, "failure", "-p", "5", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["critical_point"] is not None
    assert payload["d2_at_right"] == pytest.approx(3.5355339059327378, rel=1e-4)
    code, out, _ = run(capsys, "failure", "-p", "5", "--format", "csv")
    assert out.splitlines()[0] == "x,f,fprime"


def test_solve_command(capsys):
    code, out, _ = run(capsys, "solve", "pstar", "--format", "json")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(2.9414, abs=5e-3)
    code, out, _ = run(capsys, "solve", "p0", "--format", "json")
    assert json.loads(out)["value"] == pytest.approx(-0.565, abs=5e-3)


def test_minimize_command(capsys):
    code, out, _ = run(capsys, "minimize", "-n", "2", "-p", "3", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == pytest.approx(2.1213203435596424, rel=1e-6)
    assert payload["crux_residual"] < 1e-3


def test_reproduce_subset(capsys):
    code, out, _ = run(capsys, "reproduce", "--only", "1,2,12")
    assert code == 0
    assert out.count("[PASS]") == 3


def test_out_file(tmp_path, capsys):
    target = tmp_path / "est.json"
    code, out, _ = run(
        capsys, "moment", "-m", "1,2", "-p", "2", "--format", "json", "--out", str(target)
    )
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["value"] == 14.0


def test_env_seed_default(capsys, monkeypatch):
    monkeypatch.setenv("EXPMOMENTS_SEED", "77")
    code, out, _ = run(
        capsys, "moment", "-m", "1,2", "-p", "2.3", "--engine", "montecarlo",
        "--count", "20000", "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["seed"] == 77

"""CLI: subcomandos, exit codes y reporte JSON."""

import json

import pytest

from analyzer import EXIT_INPUT, EXIT_OK, EXIT_STRICT, build_parser, run
from core.config import SystemConfig

BAD_INTEGRAL = "system bad\nvars x\ndx/dt = x\nintegral I = x\n"


def _system(name: str) -> str:
    return str(SystemConfig.SYSTEMS_DIR / f"{name}.sys")


def _json(path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def test_empty_file_is_a_parse_error(tmp_path, capsys):
    empty = tmp_path / "empty.sys"
    empty.write_text("", encoding="utf-8")
    assert run(["analyze", str(empty)]) == EXIT_INPUT
    assert "missing 'system <name>' line" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert run(["painleve", str(tmp_path / "nowhere.sys")]) == EXIT_INPUT


def test_bad_point_is_an_input_error(capsys):
    argv = ["index", _system("lorenz"), "--chart", "U1", "--point", "0,zz,0"]
    assert run(argv) == EXIT_INPUT
    assert "invalid Gaussian rational" in capsys.readouterr().err


def test_index_at_lorenz_vertex(tmp_path):
    out = tmp_path / "index.json"
    argv = ["index", _system("lorenz"), "--chart", "U1", "--point", "0,0,0", "--json", str(out)]
    assert run(argv) == EXIT_OK
    (point,) = _json(out)["census"]["singularities"]
    assert [v["value"] for v in point["local_index"]] == ["0", "i", "-i"]
    assert point["classification"] == "vertical_only"


def test_painleve_json_on_stdout(capsys):
    assert run(["painleve", _system("lorenz"), "--json", "-"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    coefficients = [[c["value"] for c in b["coefficients"]] for b in report["painleve"]["balances"]]
    assert coefficients == [["2*i", "-2*i", "-2"], ["-2*i", "2*i", "-2"]]
    assert report["discrepancies"]


def test_verify_integrals_and_strict(tmp_path):
    assert run(["verify-integrals", _system("system41"), "--strict"]) == EXIT_OK

    bad = tmp_path / "bad.sys"
    bad.write_text(BAD_INTEGRAL, encoding="utf-8")
    out = tmp_path / "bad.json"
    assert run(["verify-integrals", str(bad), "--json", str(out)]) == EXIT_OK
    assert _json(out)["integrals"] == [{"name": "I", "passed": False, "detail": "L_v(I) = x"}]
    assert run(["verify-integrals", str(bad), "--strict"]) == EXIT_STRICT


def test_reductions(capsys):
    assert run(["reduction", "all", "--json", "-"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert len(report["reductions"]) == 4
    assert all(r["passed"] for r in report["reductions"])
    assert run(["reduction", "ince_viii_31", "--perturb", "1", "--strict"]) == EXIT_STRICT


def test_atlas_theorem31(tmp_path):
    out = tmp_path / "atlas.json"
    assert run(["atlas", _system("system21"), "--atlas", "theorem31", "--strict",
                "--json", str(out)]) == EXIT_OK
    (atlas,) = _json(out)["atlases"]
    assert atlas["passed"]
    assert [c["chart"] for c in atlas["charts"]] == ["U0", "U1", "U2"]


def test_uniqueness_uses_declared_params(tmp_path):
    out = tmp_path / "unique.json"
    assert run(["uniqueness", _system("system21"), "--atlas", "theorem31",
                "--json", str(out)]) == EXIT_OK
    report = _json(out)
    assert report["params"] == {"epsilon": "3"}
    (section,) = report["uniqueness"]
    assert section["unique"] and section["matches_system"]


def test_numeric_with_trajectory(tmp_path):
    out, csv = tmp_path / "numeric.json", tmp_path / "traj.csv"
    argv = ["numeric", _system("system31"), "--t", "1", "--step", "1e-3",
            "--traj", str(csv), "--json", str(out), "--strict"]
    assert run(argv) == EXIT_OK
    (drift,) = _json(out)["numeric"]
    assert drift["name"] == "drift I"
    assert drift["value"]["exact"] is False
    assert csv.read_text(encoding="utf-8").startswith("t,re_x,im_x")


def test_analyze_is_deterministic(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for out in (first, second):
        argv = ["analyze", _system("system31"), "--charts", "standard", "--skip-numeric",
                "--seed", "3", "--json", str(out)]
        assert run(argv) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    report = _json(first)
    assert report["seed"] == 3
    assert report["census"]["charts"] == ["U1", "U2", "U3"]
    assert report["integrals"][0]["passed"]


def test_schema(capsys):
    assert run(["schema"]) == EXIT_OK
    schema = json.loads(capsys.readouterr().out)
    assert schema["version"] == SystemConfig.REPORT_SCHEMA_VERSION


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])

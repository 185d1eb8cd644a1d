import json

import pytest

from errors import ClassificationError, ConfigError
from hamiltonian import BumpPotential, Quadratic, ShiftedEikonal, ZeroPotential
from main import _dotted_overrides, main
from runner import (EXIT_CHECK_FAILED, EXIT_CONFIG_ERROR, EXIT_OK, EXIT_RUNTIME_ERROR, OUTPUT_ENV, SCHEMA_VERSION,
                    Checks, CheckVerdict, GridConfig, ReportWriter, RunConfig, RunReport, Scenarios, SolverSettings,
                    build_inline, list_scenarios, load_config, parse_value, run)
from sublevel import CaseTag

INLINE_E0 = {"family": "eikonal", "theta": 0.0, "U": {"kind": "cos"}}


def test_builtin_scenarios(scenarios):
    assert scenarios.names() == ["E0", "E1", "E2", "E2b", "E3", "appendix"]
    assert scenarios.get("E2b").expected_tag == CaseTag.II_B
    assert "tightness" in scenarios.get("E1").checks
    assert scenarios.get("appendix").checks == ("critical_constants", "appendix")
    with pytest.raises(ConfigError):
        scenarios.get("nope")
    table = list_scenarios()
    assert table.splitlines()[0].split() == ["name", "case", "description"]
    assert all(name in table for name in scenarios.names())


def test_check_names():
    assert Checks.names() == ["critical_constants", "effective_hamiltonian", "classification",
                              "closed_form_discounted", "convergence", "comparison", "curves", "tightness", "pairing",
                              "mather_lp", "envelope_audit", "appendix"]


def test_build_inline():
    spec = build_inline({"family": "eikonal", "theta": 2.0,
                         "V": {"center": 0.25, "half_width": 0.1, "amplitude": 0.5, "sign": "-"}})
    assert isinstance(spec.family, ShiftedEikonal)
    assert spec.family.theta == 2.0
    assert isinstance(spec.potential, BumpPotential)
    assert spec.potential.amplitude == -0.5
    assert isinstance(build_inline({"family": "quadratic"}).potential, ZeroPotential)
    assert isinstance(build_inline({"family": "quadratic"}).family, Quadratic)


@pytest.mark.parametrize("params", [
    {"colour": "red"},
    {"family": "cubic"},
    {"U": {"kind": "square"}},
    {"V": {"half_width": 0.1}},
    {"V": {"center": 0.5, "half_width": 0.1, "sign": "*"}},
    {"V": {"center": 0.5, "half_width": -0.1}},
])
def test_build_inline_rejects(params):
    with pytest.raises(ConfigError):
        build_inline(params)


def test_config_defaults():
    config = load_config(environ={})
    assert config == RunConfig()
    assert config.scenario == "E3"
    assert config.outputs == "outputs"
    assert config.sweep_lambdas == tuple(sorted(set(config.lambdas), reverse=True))


def test_config_layers(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"scenario": "E1", "grid": {"dx": 0.0625}, "lambdas": [0.4, 0.2],
                                "outputs": "from_file"}))
    config = load_config(str(path), environ={})
    assert config.scenario == "E1"
    assert config.grid.dx == 0.0625
    assert config.lambdas == (0.4, 0.2)
    assert config.outputs == "from_file"

    config = load_config(str(path), {"solver.velocity_points": 101, "outputs": "flag"}, {OUTPUT_ENV: "env"})
    assert config.solver.velocity_points == 101
    # dotted overrides win over the environment
    assert config.outputs == "flag"
    assert load_config(str(path), environ={OUTPUT_ENV: "env"}).outputs == "env"


def test_config_inline_scenario_overrides():
    config = load_config(overrides={"scenario": dict(INLINE_E0), "scenario.theta": 2.0}, environ={})
    assert config.scenario["theta"] == 2.0
    with pytest.raises(ConfigError):
        load_config(overrides={"scenario.theta": 2.0}, environ={})


@pytest.mark.parametrize("overrides", [{"colour": 1}, {"grid.colour": 1}, {"solver.closure": "mirror"},
                                       {"workers": "many"}, {"grid.n": 10}, {"lambdas": []},
                                       {"window": [1.0, 0.0]}, {"workers": 0}])
def test_config_rejects(overrides):
    with pytest.raises(ConfigError):
        load_config(overrides=overrides, environ={})


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"), environ={})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(bad), environ={})
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(str(bad), environ={})
    bad.write_text(json.dumps({"grid": 3}))
    with pytest.raises(ConfigError):
        load_config(str(bad), environ={})


def test_sweep_lambdas():
    config = RunConfig(lambdas=(0.1, 0.4, 0.2, 0.4), lambda_min=0.15)
    assert config.sweep_lambdas == (0.4, 0.2, 0.15)
    assert RunConfig(lambdas=(0.4, 0.2), lambda_min=0.2).sweep_lambdas == (0.4, 0.2)
    assert RunConfig(lambdas=(0.4,), lambda_min=0.8).sweep_lambdas == (0.8,)


def test_grid_and_solver_settings():
    with pytest.raises(ConfigError):
        GridConfig(x_lo=0.0, x_hi=1.0)
    with pytest.raises(ConfigError):
        GridConfig(dx=0.0)
    grid = GridConfig(x_lo=0.0, x_hi=1.0, n=5).build()
    assert grid.dx == 0.25
    with pytest.raises(ConfigError):
        GridConfig(x_lo=1.0, x_hi=0.0, n=5).build()
    assert SolverSettings(closure="state_constraint").to_solver_config().closure.value == "state_constraint"


def test_parse_value():
    assert parse_value("0.25") == 0.25
    assert parse_value("[0.4, 0.2]") == [0.4, 0.2]
    assert parse_value("null") is None
    assert parse_value("state_constraint") == "state_constraint"


def test_dotted_overrides():
    assert _dotted_overrides(["--grid.dx", "0.01", "--solver.closure=state_constraint"]) == {
        "grid.dx": 0.01, "solver.closure": "state_constraint"}
    with pytest.raises(ConfigError):
        _dotted_overrides(["--grid.dx"])
    with pytest.raises(ConfigError):
        _dotted_overrides(["stray"])


def test_report_exit_codes():
    passing = RunReport("x", (CheckVerdict("a", True), CheckVerdict("b", True, {"skipped": True})))
    assert passing.exit_code == EXIT_OK
    assert "skipped" in passing.summary()
    failing = RunReport("x", (CheckVerdict("a", True), CheckVerdict("b", False)))
    assert failing.exit_code == EXIT_CHECK_FAILED
    assert "FAIL" in failing.summary()
    broken = RunReport("x", (), {"error": "CaseError", "message": "boom", "context": {}})
    assert broken.exit_code == EXIT_RUNTIME_ERROR
    assert "CaseError: boom" in broken.summary()


def test_csv_writer_keeps_full_precision(tmp_path):
    writer = ReportWriter(tmp_path)
    writer.write_csv("t.csv", ("x", "kind"), [(0.1 + 0.2, "a")])
    assert writer.files == ("t.csv",)
    assert (tmp_path / "t.csv").read_text().splitlines() == ["x,kind", f"{0.1 + 0.2!r},a"]
    writer.write_json("r.json", {"value": float("nan")})
    assert json.loads((tmp_path / "r.json").read_text()) == {"value": None}


def test_run_writes_report(tmp_path):
    config = RunConfig(scenario="E0", checks=("critical_constants", "classification"), outputs=str(tmp_path))
    report = run(config)
    assert report.passed
    assert report.exit_code == EXIT_OK
    assert report.files == ("report.json",)
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["schema_version"] == SCHEMA_VERSION
    assert data["scenario"] == "E0"
    assert data["case_report"]["case_tag"] == "III"
    assert [c["name"] for c in data["checks"]] == ["critical_constants", "classification"]
    assert data["checks"][0]["details"]["c_f_H_oracle"] == pytest.approx(1.0, abs=1e-9)
    assert data["config"]["outputs"] == str(tmp_path)


def test_run_is_deterministic(tmp_path):
    reports = []
    for name in ("a", "b"):
        config = RunConfig(scenario="E2", checks=("critical_constants", "classification"),
                           outputs=str(tmp_path / name))
        run(config)
        data = json.loads((tmp_path / name / "report.json").read_text())
        data.pop("config")
        reports.append(data)
    assert reports[0] == reports[1]


def test_run_without_outputs(tmp_path):
    config = RunConfig(scenario="E0", checks=("classification",), outputs=str(tmp_path / "never"))
    report = run(config, write_outputs=False)
    assert report.passed
    assert report.files == ()
    assert not (tmp_path / "never").exists()


def test_run_rejects_unknown_check(tmp_path):
    with pytest.raises(ConfigError):
        run(RunConfig(scenario="E0", checks=("nope",), outputs=str(tmp_path)))


def test_runtime_error_is_reported(tmp_path, monkeypatch):
    def broken(spec):
        raise ClassificationError("inconsistent constants", {"c_H": 1.0})

    monkeypatch.setattr("runner.checks.classify", broken)
    report = run(RunConfig(scenario="E0", checks=("classification",), outputs=str(tmp_path)))
    assert report.exit_code == EXIT_RUNTIME_ERROR
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["error"]["error"] == "ClassificationError"
    assert data["error"]["context"] == {"constants": {"c_H": 1.0}}
    assert data["exit_code"] == EXIT_RUNTIME_ERROR


def test_inline_run(tmp_path):
    config = load_config(overrides={"scenario": dict(INLINE_E0), "grid.dx": 1.0 / 64, "lambdas": [0.4, 0.2],
                                    "window": [0.0, 1.0], "curves": 4, "outputs": str(tmp_path)}, environ={})
    report = run(config)
    assert report.scenario == "inline"
    assert [v.name for v in report.verdicts] == ["critical_constants", "classification", "convergence",
                                                 "comparison", "curves"]
    assert report.verdicts[1].passed
    assert {"profiles.csv", "u0_G.dat", "convergence.csv", "measures.csv", "report.json"} <= set(report.files)
    assert "u_lambda_0.4.dat" in report.files
    data = json.loads((tmp_path / "report.json").read_text())
    assert [row["lambda"] for row in data["convergence"]["rows"]] == [0.4, 0.2]
    assert set(data["bounds"]) == {"0.4", "0.2"}


def test_cli_list(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "appendix" in out and "E2b" in out


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["run", "--scenario", "nope", "--outputs", str(tmp_path)]) == EXIT_CONFIG_ERROR
    assert "unknown scenario" in capsys.readouterr().err
    assert main(["run", "--scenario", "E0", "--outputs", str(tmp_path), "--grid.colour", "1"]) == EXIT_CONFIG_ERROR
    assert main(["check", "classification", "--scenario", "E0"]) == EXIT_OK
    assert "classification" in capsys.readouterr().out


def test_cli_run(tmp_path):
    code = main(["run", "--scenario", "E2", "--outputs", str(tmp_path), "--checks", '["classification"]'])
    assert code == EXIT_OK
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["checks"][0]["details"] == {"case_tag": "II_A", "expected": "II_A"}


def test_explicit_grid_needs_margin_around_the_bump():
    config = load_config(overrides={"scenario": "E3", "grid.x_lo": -1.0, "grid.x_hi": 2.0, "grid.n": 193,
                                    "window": [0.0, 1.0], "checks": ["convergence"]}, environ={})
    assert config.grid.explicit
    with pytest.raises(ConfigError):
        run(config, write_outputs=False)

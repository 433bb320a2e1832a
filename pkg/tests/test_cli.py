import json

import pytest

from app.main import load_operator, main, parse_floats, parse_range
from app.modules.errors import ValidationError
from app.modules.exporter import read_csv


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.lstrip().startswith("{") else out


def test_homogenize_formula_reports_shifted_and_raw_values(capsys, data_dir):
    code, payload = _run(capsys, "homogenize", "--op", "max2lin", "--Q=-1", "--method", "formula")
    assert code == 0
    assert payload["result"]["hbar"] == pytest.approx(-2 / 3)
    assert payload["result"]["hbar_raw"] == pytest.approx(1 / 3)
    assert payload["run_id"]

    code, payload = _run(capsys, "homogenize", "--op", "max2lin", "--Q=-1", "--no-subtract-constant", "--no-store")
    assert payload["result"]["hbar"] == pytest.approx(1 / 3)
    assert "run_id" not in payload


@pytest.mark.parametrize("method", ["pde", "lp"])
def test_homogenize_routes_agree(capsys, data_dir, method):
    code, payload = _run(capsys, "homogenize", "--op", "max2lin", "--Q", "1", "--method", method, "--no-store")
    assert code == 0
    assert payload["result"]["hbar_raw"] == pytest.approx(41 / 11, abs=1e-7)
    assert payload["result"]["method"] == method
    assert payload["config"]["grid_n"] == 20


def test_homogenize_stripes_by_eigenvalues(capsys, data_dir):
    code, payload = _run(capsys, "homogenize", "--op", "stripes", "--eigs=-1,-2", "--phi", "0.3", "--no-store")
    assert code == 0
    assert payload["result"]["hbar"] == pytest.approx(-3.0)
    assert payload["result"]["lower_bound"] is True


def test_invalid_operator_exits_with_validation_code(capsys, data_dir):
    code, payload = _run(capsys, "homogenize", "--op", "nope", "--Q", "1")
    assert code == 2
    assert payload["error"]["type"] == "ValidationError"
    code, payload = _run(capsys, "homogenize", "--op", "stripes", "--Q", "1")
    assert code == 2


def test_solver_failure_exits_with_solver_code(capsys, data_dir, monkeypatch):
    monkeypatch.setenv("HJB_HOMOG_MAX_ITER", "1")
    code, payload = _run(capsys, "homogenize", "--op", "quad", "--Q", "4", "--method", "pde")
    assert code == 3
    assert payload["error"]["type"] == "NonConvergenceError"


def test_bad_setting_exits_with_config_code(capsys, data_dir, monkeypatch):
    monkeypatch.setenv("HJB_HOMOG_TOL_1D", "loose")
    code, payload = _run(capsys, "homogenize", "--op", "quad", "--Q", "4")
    assert code == 2
    assert payload["error"]["type"] == "ConfigError"


def test_runs_and_rerun_round_trip(capsys, data_dir, tmp_path):
    _, first = _run(capsys, "homogenize", "--op", "quad", "--Q", "4", "--method", "pde", "--grid-n", "16")
    code, listing = _run(capsys, "runs")
    assert code == 0
    assert listing["result"][0]["run_id"] == first["run_id"]
    assert listing["result"][0]["command"] == "homogenize"

    code, again = _run(capsys, "rerun", first["run_id"], "--no-store")
    assert code == 0
    assert again["rerun_of"] == first["run_id"]
    assert again["result"]["hbar_raw"] == pytest.approx(first["result"]["hbar_raw"], abs=1e-12)
    assert again["config"]["grid_n"] == 16

    config_file = tmp_path / "emitted.json"
    config_file.write_text(json.dumps(first), encoding="utf-8")
    code, replayed = _run(capsys, "rerun", "--config", str(config_file), "--no-store")
    assert code == 0
    assert replayed["result"]["hbar_raw"] == pytest.approx(5.0, abs=1e-8)

    code, payload = _run(capsys, "rerun", "missing-id")
    assert code == 2


def test_measure_reports_closed_form_density(capsys, data_dir):
    code, payload = _run(capsys, "measure", "--op", "quad", "--Q", "4", "--n-alpha", "81", "--no-store")
    assert code == 0
    result = payload["result"]
    assert result["hbar_raw"] == pytest.approx(5.0, abs=1e-6)
    assert result["hbar"] == pytest.approx(6.0, abs=1e-6)
    assert result["analytic"]["alpha"] == pytest.approx(2.0)
    assert result["analytic"]["max_density_gap"] <= 2 / 20
    assert result["adjoint_residual"] <= 1e-7


def test_sweep_stays_inside_envelopes(capsys, data_dir):
    code, payload = _run(capsys, "sweep", "--op", "max2lin", "--q-list=-2:2:5", "--no-store")
    assert code == 0
    points = payload["result"]["points"]
    assert [p["Q"] for p in points] == [-2.0, -1.0, 0.0, 1.0, 2.0]
    for p in points:
        assert p["envelope_lower"] - 1e-12 <= p["hbar"] <= p["envelope_upper"] + 1e-12
    assert points[3]["hbar"] == pytest.approx(30 / 11)


def test_errormap_writes_csv(capsys, data_dir, tmp_path):
    out = tmp_path / "errormap.csv"
    code, payload = _run(capsys, "errormap", "--op", "stripes", "--lambdas=-1,1", "--grid-n", "8", "--out", str(out),
                         "--format", "csv", "--no-store")
    assert code == 0
    assert payload["result"]["summary"]["points"] == 4
    rows = read_csv(str(out))
    assert len(rows) == 4
    assert all(row["status"] == "ok" for row in rows)
    third_quadrant = [row for row in rows if float(row["lambda1"]) < 0 and float(row["lambda2"]) < 0]
    assert float(third_quadrant[0]["abs_error"]) <= 1e-6


def test_errormap_rejects_other_operators(capsys, data_dir):
    code, _ = _run(capsys, "errormap", "--op", "quad", "--lambdas", "1,2")
    assert code == 2


def test_rates_csv_to_stdout(capsys, data_dir):
    code, out = _run(capsys, "rates", "--op", "max2lin", "--eps-list", "1/10,1/20,1/40", "--format", "csv",
                     "--no-store")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "eps,sample,norm,error"
    assert len(lines) == 1 + 3 * 5


def test_input_helpers():
    assert parse_floats("1/10, 0.5") == [0.1, 0.5]
    assert parse_range("-1:1:3") == [-1.0, 0.0, 1.0]
    with pytest.raises(ValidationError):
        parse_floats("a,b")
    with pytest.raises(ValidationError):
        parse_range("0:1")
    assert load_operator("quad").alpha_cap == 10.0
    assert load_operator('{"kind": "quad_1d", "a": 1, "b": 2, "c": 0}').c == 0.0


def test_alpha_cap_setting_reaches_the_quadratic_operator(capsys, data_dir, monkeypatch):
    assert load_operator("quad", alpha_cap=8.0).alpha_cap == 8.0
    inline = '{"kind": "quad_1d", "a": 1, "b": {"breakpoints": [0, 0.5], "values": [0, 1]}, "c": 1, "alpha_cap": 5}'
    assert load_operator(inline, alpha_cap=8.0).alpha_cap == 5.0

    monkeypatch.setenv("HJB_HOMOG_ALPHA_CAP", "8")
    code, payload = _run(capsys, "measure", "--op", "quad", "--Q", "4", "--n-alpha", "33", "--no-store")
    assert code == 0
    assert payload["result"]["control_marginal"][-1]["alpha"] == pytest.approx(8.0)
    assert payload["result"]["hbar_raw"] == pytest.approx(5.0, abs=1e-6)


def test_dirichlet_writes_solution_fields(capsys, data_dir, tmp_path):
    out = tmp_path / "fields.csv"
    code, payload = _run(capsys, "dirichlet", "--op", "quad", "--eps", "1/40", "--format", "csv", "--out", str(out),
                         "--no-store")
    assert code == 0
    result = payload["result"]
    assert result["cells"] == 40
    assert result["errors"]["sup"] < 2e-3
    rows = read_csv(str(out))
    assert list(rows[0]) == ["x", "u", "ubar"]
    assert len(rows) == 42
    assert float(rows[0]["u"]) == float(rows[-1]["u"]) == 0.0
    worst = max(abs(float(row["u"]) - float(row["ubar"])) for row in rows)
    assert worst == pytest.approx(result["errors"]["sup"], abs=1e-12)


def test_dirichlet_random_medium_is_seeded(capsys, data_dir):
    argv = ("dirichlet", "--op", "max2lin", "--eps", "1/20", "--arrangement", "random", "--seed", "4", "--no-store")
    _, first = _run(capsys, *argv)
    _, second = _run(capsys, *argv)
    assert first["result"]["labels"] == second["result"]["labels"]
    assert first["result"]["errors"] == second["result"]["errors"]
    code, _ = _run(capsys, "dirichlet", "--op", "stripes", "--no-store")
    assert code == 2


@pytest.mark.parametrize("method", ["pde", "lp"])
def test_twenty_cell_preset_matches_formula(capsys, data_dir, method):
    code, payload = _run(capsys, "homogenize", "--op", "max2lin20", "--Q", "1", "--method", method, "--no-store")
    assert code == 0
    assert payload["result"]["hbar_raw"] == pytest.approx(41 / 11, abs=1e-6)


def test_subtract_constant_accepts_explicit_values(capsys, data_dir):
    _, payload = _run(capsys, "homogenize", "--op", "max2lin", "--Q=-1", "--subtract-constant=false", "--no-store")
    assert payload["result"]["hbar"] == pytest.approx(1 / 3)
    _, payload = _run(capsys, "homogenize", "--op", "max2lin", "--Q=-1", "--subtract-constant=true", "--no-store")
    assert payload["result"]["hbar"] == pytest.approx(-2 / 3)
    with pytest.raises(SystemExit) as exc:
        main(["homogenize", "--op", "max2lin", "--Q=-1", "--subtract-constant=maybe"])
    assert exc.value.code == 2


def test_malformed_inputs_exit_with_validation_code(capsys, data_dir, tmp_path):
    code, payload = _run(capsys, "rerun", "--config", str(tmp_path / "missing.json"))
    assert code == 2
    assert payload["error"]["type"] == "ValidationError"
    code, _ = _run(capsys, "sweep", "--op", "max2lin", "--q-list=-1:1:three", "--no-store")
    assert code == 2
    bad = '{"kind": "quad_1d", "a": 1, "b": {"breakpoints": [0, 0.5], "values": ["x", 1]}}'
    code, payload = _run(capsys, "homogenize", "--op", bad, "--Q", "1", "--no-store")
    assert code == 2
    assert payload["error"]["type"] == "ValidationError"
    with pytest.raises(ValidationError):
        parse_range("0:1:0")

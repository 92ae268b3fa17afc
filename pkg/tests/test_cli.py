"""CLI exit codes, artifacts and determinism."""

import json

import pytest

from weylcalc.cli import main

D_MINUS_Z = '{"d":[[0,0],[1,0]],"a":[1,0]}'
D2_MINUS_Z = '{"d":[[0,0],[0,0],[1,0]],"a":[1,0]}'
TARGETS = '[{"coeffs":[[1,0]],"label":"1"},{"coeffs":[[0,0],[1,0]],"label":"z"}]'


@pytest.fixture(autouse=True)
def fixed_timestamp(monkeypatch):
    monkeypatch.setenv("WEYLCALC_TIMESTAMP", "2026-01-01T00:00:00+00:00")


def test_usage_error_exits_2(capsys):
    assert main(["nonsense"]) == 2


def test_missing_required_flag_exits_2():
    assert main(["kernel"]) == 2


def test_malformed_operator_exits_2(tmp_path, capsys):
    code = main(["kernel", "--op", '{"a":[1,0]}', "--outdir", str(tmp_path)])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_zero_operator_exits_2(tmp_path):
    assert main(["kernel", "--op", '{"d":[[0,0]]}', "--outdir", str(tmp_path)]) == 2


def test_kernel_artifacts(tmp_path, capsys):
    code = main(["kernel", "--op", D2_MINUS_Z, "--terms", "40",
                 "--outdir", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "kernel_basis.json").read_text())
    assert len(doc["solutions"]) == 2
    assert max(doc["residuals"]) <= 1e-10
    assert doc["manifest"]["command"] == "kernel"
    csv_lines = (tmp_path / "kernel_residuals.csv").read_text().splitlines()
    assert csv_lines[0] == "solution_index,residual"
    assert len(csv_lines) == 3
    assert (tmp_path / "kernel_residuals.csv.manifest.json").exists()


def test_kernel_convolution_case_exits_1(tmp_path, capsys):
    code = main(["kernel", "--op", '{"d":[[0,0],[1,0]]}',
                 "--outdir", str(tmp_path)])
    assert code == 1
    assert (tmp_path / "kernel_error.json").exists()


def test_commutator_check_report(tmp_path, capsys):
    code = main(["commutator-check", "--op", D_MINUS_Z, "--ncap", "32",
                 "--outdir", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "commutator_check.json").read_text())
    assert doc["a_estimate"] == [1.0, 0.0]
    assert doc["offdiag_max"] <= 1e-12
    assert doc["diag_spread"] <= 1e-12


def test_eigencheck_with_composite(tmp_path):
    op = '{"d":[[0,0],[1,0]],"a":[1,0],"L":[[0,0],[1,0],[1,0]]}'
    code = main(["eigencheck", "--op", op, "--outdir", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "eigencheck.json").read_text())
    assert doc["worst_eigen_residual"] <= 1e-6
    assert doc["worst_composite_residual"] <= 1e-5
    header = (tmp_path / "eigencheck_grid.csv").read_text().splitlines()[0]
    assert header == "lam_re,lam_im,eigen_residual,composite_residual"


def test_complete_fit_curve(tmp_path):
    code = main(["complete-fit", "--op", D_MINUS_Z, "--targets", TARGETS,
                 "--ridge", "0", "--outdir", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "residual_curve.csv").read_text().splitlines()
    # header + 2 targets x 4 counts
    assert len(lines) == 9
    doc = json.loads((tmp_path / "complete_fit.json").read_text())
    assert all(fit["status"] == "ok" for fit in doc["fits"])


def test_complete_fit_bad_counts_exits_2(tmp_path):
    code = main(["complete-fit", "--op", D_MINUS_Z, "--targets", TARGETS,
                 "--counts", "", "--outdir", str(tmp_path)])
    assert code == 2


def test_construct_orbit_artifacts(tmp_path):
    problem = json.dumps({
        "operator": {"d": [[0, 0], [1, 0]], "a": [1, 0], "L": [[0, 0], [1, 0]]},
        "targets": json.loads(TARGETS),
        "radius": 1.0,
        "epsilon": 0.1,
    })
    code = main(["construct-orbit", "--problem", problem,
                 "--outdir", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "orbit.json").read_text())
    assert doc["report"]["all_targets_met"] is True
    assert doc["schedule"] == sorted(doc["schedule"])
    lines = (tmp_path / "orbit_errors.csv").read_text().splitlines()
    assert lines[0] == "j,n_j,achieved_error,leakage_bound"
    assert len(lines) == 3


def test_construct_orbit_budget_failure_exits_1(tmp_path):
    problem = json.dumps({
        "operator": {"d": [[0, 0], [1, 0]], "a": [1, 0]},
        "targets": [{"coeffs": [[1, 0]]}],
        "epsilon": 1e-4,
    })
    code = main(["construct-orbit", "--problem", problem,
                 "--lambda-count", "4", "--outdir", str(tmp_path)])
    assert code == 1
    err = json.loads((tmp_path / "construct_orbit_error.json").read_text())
    assert err["error"]["type"] == "BudgetExceeded"
    assert err["error"]["target_index"] == 0


def test_decompose_round_trip_via_cli(tmp_path):
    code = main(["decompose", "--op", D2_MINUS_Z, "--ncap", "32",
                 "--outdir", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "decompose.json").read_text())
    assert doc["a"] == [1.0, 0.0]
    assert doc["order"] == 2


def test_decompose_non_weyl_matrix_exits_1(tmp_path):
    # multiplication by z^2 on monomials up to degree 8
    entries = [[[0.0, 0.0]] * 9 for _ in range(11)]
    for n in range(9):
        entries[n + 2][n] = [1.0, 0.0]
    code = main(["decompose", "--matrix", json.dumps({"entries": entries}),
                 "--outdir", str(tmp_path)])
    assert code == 1
    err = json.loads((tmp_path / "decompose_error.json").read_text())
    assert err["error"]["type"] == "NotWeyl"


def test_decompose_requires_exactly_one_source(tmp_path):
    assert main(["decompose", "--outdir", str(tmp_path)]) == 2
    assert main(["decompose", "--op", D_MINUS_Z, "--matrix", "{}",
                 "--outdir", str(tmp_path)]) == 2


def test_workdir_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("WEYLCALC_WORKDIR", str(tmp_path / "w"))
    code = main(["commutator-check", "--op", D_MINUS_Z, "--ncap", "16"])
    assert code == 0
    assert (tmp_path / "w" / "commutator_check.json").exists()


def test_byte_identical_artifacts(tmp_path):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        code = main(["complete-fit", "--op", D_MINUS_Z, "--targets", TARGETS,
                     "--ridge", "0", "--outdir", str(d)])
        assert code == 0
    for name in ("complete_fit.json", "residual_curve.csv",
                 "residual_curve.csv.manifest.json"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()

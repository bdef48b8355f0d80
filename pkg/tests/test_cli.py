"""End-to-end command-line behavior: verbs, formats, exit codes."""

import json

import numpy as np
import pytest

from qfratio.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def heavy_tail_problem(tmp_path, capsys):
    path = tmp_path / "problem.json"
    code, _, _ = run_cli(
        capsys, "build", "--kind", "ratio_n2", "--mu", "0.2,2", "--out", str(path)
    )
    assert code == 0
    return str(path)


def test_build_round_trip(heavy_tail_problem):
    doc = json.loads(open(heavy_tail_problem).read())
    assert np.allclose(doc["A"], [[0.0, 0.5], [0.5, 0.0]])
    assert np.allclose(doc["B"], [[1.0, 0.0], [0.0, 0.0]])
    assert doc["mu"] == [0.2, 2.0]


def test_analyze_heavy_tail_instance(heavy_tail_problem, capsys):
    code, out, err = run_cli(capsys, "analyze", "--problem", heavy_tail_problem)
    assert code == 0
    doc = json.loads(out)
    assert doc["case_tag"] == "Case2c-infinite"
    assert doc["in_CR"] is True and doc["in_CL"] is True
    assert doc["edges"]["right"]["m"] == 1
    assert doc["edges"]["right"]["nu0"][0] == pytest.approx(2.0, abs=1e-6)


def test_cdf_json_records(heavy_tail_problem, capsys):
    code, out, _ = run_cli(
        capsys, "cdf", "--problem", heavy_tail_problem, "--points=-1,0,2", "--format", "json"
    )
    assert code == 0
    records = [json.loads(line) for line in out.strip().splitlines()]
    assert [rec["r"] for rec in records] == [-1.0, 0.0, 2.0]
    for rec in records:
        assert 0.0 <= rec["value"] <= 1.0
        assert rec["branch"] in ("regular", "mean", "boundary")


def test_cdf_csv_parses(heavy_tail_problem, capsys):
    code, out, _ = run_cli(
        capsys, "cdf", "--problem", heavy_tail_problem, "--grid=-2:2:5", "--format", "csv"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "r,value,s_hat,w_hat,u_hat,branch"
    assert len(lines) == 6
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(0.0 <= v <= 1.0 for v in values)


def test_pdf_seventeen_digit_serialization(heavy_tail_problem, capsys):
    code, out, _ = run_cli(
        capsys, "pdf", "--problem", heavy_tail_problem, "--points", "1.0", "--format", "csv"
    )
    assert code == 0
    value = out.strip().splitlines()[1].split(",")[1]
    # round-trips exactly through float parsing
    assert format(float(value), ".17g") == value


def test_tail_limit_beta(tmp_path, capsys):
    path = tmp_path / "beta.json"
    code, _, _ = run_cli(
        capsys, "build", "--kind", "beta", "--n", "2", "--m", "1",
        "--mu", "2", "--out", str(path),
    )
    assert code == 0
    code, out, _ = run_cli(capsys, "tail-limit", "--problem", str(path), "--side", "right")
    assert code == 0
    doc = json.loads(out)
    assert doc["right"]["RE_cdf"] == pytest.approx(0.8222, abs=5e-4)


def test_oracle_reproducible(heavy_tail_problem, capsys):
    args = ("oracle", "--problem", heavy_tail_problem, "--points=-3,1", "--format", "csv",
            "--draws", "20000", "--seed", "7")
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_figure_writes_three_csvs(heavy_tail_problem, tmp_path, capsys):
    out_dir = tmp_path / "figs"
    code, out, _ = run_cli(
        capsys, "figure", "--out", str(out_dir), "--grid=-10:10:21"
    )
    assert code == 0
    for name in ("density_comparison.csv", "density_ratios.csv", "cdf_tail_ratios.csv"):
        lines = (out_dir / name).read_text().strip().splitlines()
        assert lines[0] == "r,exact,approx,ratio,se"
        assert len(lines) > 2


def test_empty_grid_is_usage_error(heavy_tail_problem, capsys):
    code, _, err = run_cli(capsys, "cdf", "--problem", heavy_tail_problem)
    assert code == 1
    doc = json.loads(err)
    assert doc["error"]["exit_code"] == 1


def test_malformed_problem_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(capsys, "cdf", "--problem", str(bad), "--points", "1")
    assert code == 1
    assert json.loads(err)["error"]["type"] == "InvalidInputError"


def test_unsupported_instance_exit_2(tmp_path, capsys):
    path = tmp_path / "f11.json"
    path.write_text(json.dumps({
        "A": [[1.0, 0.0], [0.0, 0.0]],
        "B": [[0.0, 0.0], [0.0, 1.0]],
        "mu": [0.0, 0.0],
    }))
    code, _, err = run_cli(capsys, "tail-limit", "--problem", str(path), "--side", "right")
    assert code == 2
    assert json.loads(err)["error"]["type"] == "UnsupportedInstanceError"


def test_sigma_whitening_accepted(tmp_path, capsys):
    path = tmp_path / "sig.json"
    path.write_text(json.dumps({
        "A": [[1.0, 0.0], [0.0, 0.0]],
        "B": [[1.0, 0.0], [0.0, 1.0]],
        "mu": [1.0, 0.0],
        "sigma": [[4.0, 0.0], [0.0, 4.0]],
    }))
    code, out, _ = run_cli(capsys, "analyze", "--problem", str(path))
    assert code == 0
    assert json.loads(out)["case_tag"] == "Case1"


def test_tol_override_round_trip(heavy_tail_problem, capsys):
    code, out, _ = run_cli(
        capsys, "cdf", "--problem", heavy_tail_problem, "--points", "1",
        "--tol", "tol_quad=1e-8",
    )
    assert code == 0
    code, _, err = run_cli(
        capsys, "cdf", "--problem", heavy_tail_problem, "--points", "1", "--tol", "bogus=1"
    )
    assert code == 1

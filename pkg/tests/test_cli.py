import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from volsel.cli import (RunConfig, ingest_csv, load_fixture, main, run)
from volsel.errors import (DomainError, NonFinite, NonRectangular,
                           ParseError)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run_cli(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_ingest_csv_plain(tmp_path):
    path = write(tmp_path, "m.csv", "1,0\n0,1\n")
    assert_allclose(ingest_csv(path), np.eye(2))


def test_ingest_csv_header_skipped(tmp_path):
    path = write(tmp_path, "m.csv", "a,b\n1,2\n3,4\n")
    assert_allclose(ingest_csv(path), [[1.0, 2.0], [3.0, 4.0]])


def test_ingest_csv_blank_lines_and_spaces(tmp_path):
    path = write(tmp_path, "m.csv", "\n 1 , 2 \n\n3,4\n\n")
    assert_allclose(ingest_csv(path), [[1.0, 2.0], [3.0, 4.0]])


def test_ingest_csv_ragged(tmp_path):
    path = write(tmp_path, "m.csv", "1,2\n3,4,5\n")
    with pytest.raises(NonRectangular, match="row 2"):
        ingest_csv(path)


def test_ingest_csv_bad_cell_coordinates(tmp_path):
    path = write(tmp_path, "m.csv", "1,2\n3,oops\n")
    with pytest.raises(ParseError) as info:
        ingest_csv(path)
    assert info.value.row == 2
    assert info.value.col == 2
    assert "row 2" in str(info.value)


def test_ingest_csv_non_finite(tmp_path):
    path = write(tmp_path, "m.csv", "1,2\n3,nan\n")
    with pytest.raises(NonFinite, match="row 2, column 2"):
        ingest_csv(path)


def test_ingest_csv_empty(tmp_path):
    path = write(tmp_path, "m.csv", "\n\n")
    with pytest.raises(ParseError):
        ingest_csv(path)


def test_load_fixture_shape():
    a = load_fixture()
    assert a.shape == (7, 4)
    assert np.all(np.isfinite(a))


def test_run_config_validation():
    with pytest.raises(DomainError):
        RunConfig(command="nope")
    with pytest.raises(DomainError):
        RunConfig(command="sample", k=0)
    with pytest.raises(DomainError):
        RunConfig(command="sample", subroutine="lu")
    with pytest.raises(DomainError):
        run(RunConfig(command="verify", output="csv"))


def test_select_diagonal(tmp_path, capsys):
    path = write(tmp_path, "d.csv", "3,0,0\n0,2,0\n0,0,1\n")
    code, out, _ = run_cli(capsys, ["select", "--input", path, "--k", "2"])
    assert code == 0
    report = json.loads(out)
    assert report["indices"] == [1, 2]
    assert_allclose(report["frobenius_residual_sq"], 1.0, rtol=1e-12)
    assert report["frobenius_certified"] and report["spectral_certified"]
    assert_allclose(report["expectations"], [1.6, 1.0], rtol=1e-12)


def test_sample_deterministic_bytes(tmp_path, capsys):
    path = write(tmp_path, "m.csv", "\n".join(
        ",".join(f"{x:.6f}" for x in row)
        for row in np.random.default_rng(0).standard_normal((6, 3))))
    argv = ["sample", "--input", path, "--k", "2", "--seed", "4"]
    code1, out1, _ = run_cli(capsys, argv)
    code2, out2, _ = run_cli(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2
    report = json.loads(out1)
    assert len(report["indices"]) == 2
    assert len(report["per_round_marginals"]) == 2
    for probs in report["per_round_marginals"]:
        assert abs(sum(probs) - 1.0) < 1e-12


def test_sample_csv_output(tmp_path, capsys):
    path = write(tmp_path, "d.csv", "3,0,0\n0,2,0\n0,0,1\n")
    code, out, _ = run_cli(capsys, ["select", "--input", path, "--k", "2",
                                    "--output", "csv"])
    assert code == 0
    assert out.strip() == "1,2"


def test_sample_threads_equivalent(tmp_path, capsys, monkeypatch):
    rows = "\n".join(",".join(f"{x:.5f}" for x in row)
                     for row in np.random.default_rng(1).standard_normal(
                         (12, 5)))
    path = write(tmp_path, "m.csv", rows)
    argv = ["sample", "--input", path, "--k", "3", "--seed", "0"]
    _, base, _ = run_cli(capsys, argv)
    _, fast, _ = run_cli(capsys, argv + ["--threads", "3"])
    monkeypatch.setenv("VOLSEL_THREADS", "2")
    _, env, _ = run_cli(capsys, argv)
    assert base == fast == env


def test_verify_small_exit_zero(capsys):
    code, out, _ = run_cli(capsys, ["verify", "--k", "1",
                                    "--trials", "20000"])
    assert code == 0
    report = json.loads(out)
    assert report["passed"] is True
    assert report["tv_distance"] <= 0.02
    assert len(report["table"]) == 7
    subsets = [row["subset"] for row in report["table"]]
    assert subsets == sorted(subsets)
    assert_allclose(sum(r["exact"] for r in report["table"]), 1.0,
                    rtol=1e-12)


def test_verify_pair_subsets(capsys):
    # trimmed-trials variant of the documented 200000-draw run
    code, out, _ = run_cli(capsys, ["verify", "--k", "2",
                                    "--trials", "60000"])
    assert code == 0
    report = json.loads(out)
    assert report["tv_distance"] <= 0.02
    assert len(report["table"]) == 21


def test_approx_sample(tmp_path, capsys):
    rows = "\n".join(",".join(f"{x:.5f}" for x in row)
                     for row in np.random.default_rng(2).standard_normal(
                         (3, 30)))
    path = write(tmp_path, "m.csv", rows)
    code, out, _ = run_cli(capsys, ["approx-sample", "--input", path,
                                    "--k", "1", "--eps", "0.5"])
    assert code == 0
    report = json.loads(out)
    assert report["sketched"] is True
    assert report["sketch_dim"] == 18
    assert len(report["indices"]) == 1


def test_lowerbound(capsys):
    code, out, _ = run_cli(capsys, ["lowerbound", "--n", "4",
                                    "--eps", "0.1"])
    assert code == 0
    report = json.loads(out)
    assert report["passed"] is True
    assert report["min_ratio"] >= report["bound"]
    assert_allclose(report["min_ratio"], report["ratio_closed_form"],
                    rtol=1e-6)
    assert_allclose(report["sigma1"], report["sigma1_closed_form"],
                    rtol=1e-8)


def test_bench_report_shape(capsys):
    code, out, _ = run_cli(capsys, ["bench"])
    assert code == 0
    report = json.loads(out)
    assert len(report["sizes"]) == 4
    for entry in report["sizes"]:
        assert len(entry["per_round"]) == 4
        for r in entry["per_round"]:
            assert r["gram_s"] >= 0.0 and r["svd_s"] >= 0.0
    assert "crossover_cols" in report


def test_missing_input_exits_one(capsys):
    code, _, err = run_cli(capsys, ["sample", "--input", "/no/such.csv",
                                    "--k", "1"])
    assert code == 1
    assert "error" in err


def test_bad_k_exits_one(tmp_path, capsys):
    path = write(tmp_path, "d.csv", "1,0\n0,1\n")
    code, _, err = run_cli(capsys, ["sample", "--input", path, "--k", "5"])
    assert code == 1
    assert "error" in err


def test_csv_output_rejected_for_verify(capsys):
    code, _, err = run_cli(capsys, ["verify", "--k", "1", "--trials", "10",
                                    "--output", "csv"])
    assert code == 1
    assert "csv" in err

import csv
import io
import json

import pytest

from etacone.cli import RunConfig, dump_json, main
from etacone.errors import ContractViolation


def run(*argv):
    out = io.StringIO()
    code = main(list(map(str, argv)), out)
    return code, out.getvalue()


def test_verify_exit_codes(fixture_dir, tmp_path):
    assert run("verify", fixture_dir / "three_point_cone.tbl")[0] == 0
    assert run("verify", "three_point_cone", "--param", "alpha=1")[0] == 0
    code, text = run("verify", fixture_dir / "three_point_cone_3401.tbl")
    assert code == 1 and "violation d3 at ('1', '2', '3')" in text
    bad = tmp_path / "bad.tbl"
    bad.write_text("points: 1 2\nd 1 x 5\n")
    assert run("verify", bad)[0] == 2
    assert run("verify", tmp_path / "missing.tbl")[0] == 2


def test_verify_reports_binding_checks():
    code, text = run("verify", "three_point_cone")
    assert "(1,2,3): (1000, 0) <= 5 * ... = (3400, 0)" in text
    assert "(1,3,2): (80, 0) <= 4 * ... = (6400, 0)" in text
    assert "tolerance consumed: 0" in text


def test_verify_json():
    code, text = run("verify", "eta_metric_3pt", "--format", "json")
    data = json.loads(text)
    assert code == 0 and data["ok"] is True
    assert dump_json(json.loads(text)) + "\n" == text


def test_classify(fixture_dir, tmp_path):
    code, text = run("classify", fixture_dir / "eta_metric_3pt.tbl")
    assert code == 0
    assert "classification: metric-type L=1.1111111111111112" in text
    assert "witness: (1, 2, 3)" in text
    eq = tmp_path / "eq.tbl"
    eq.write_text("points: a b c\nd a b 1\nd b c 1\nd a c 1\n")
    assert "classification: metric\n" in run("classify", eq)[1]
    assert "L=1.4705882352941" in run("classify", "three_point_cone")[1]


def test_min_eta_csv():
    code, text = run("min-eta", "eta_metric_3pt", "--format", "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["", "1", "2", "3"]
    assert float(rows[1][3]) == 10 / 9


def test_solve_exit_codes():
    code, text = run("solve", "half_map", "--scheme", "banach", "--x0", "1")
    assert code == 0 and "status: converged" in text
    code, text = run("solve", "square_map", "--scheme", "hardy-rogers", "--alpha", "0.25", "--x0", "0.25")
    assert code == 0
    assert run("solve", "half_map", "--x0", "1", "--max-iter", "5", "--tail-window", "3")[0] == 4
    code, text = run("solve", "half_map", "--x0", "1", "--max-iter", "2")
    # the truncated tail still holds x0, where eta = 4 = 1/k: left unverified, not failed
    assert code == 4 and "orbit_eta: unverified" in text
    assert run("solve", "square_map", "--scheme", "hardy-rogers", "--delta", "0.4")[0] == 3


def test_solve_json_round_trip():
    code, text = run("solve", "half_map", "--x0", "1", "--tol", "1e-18", "--format", "json")
    data = json.loads(text)
    assert data["status"] == "converged" and abs(data["fixed_point"]) < 1e-8
    assert dump_json(data) + "\n" == text


def test_solve_with_map_file(fixture_dir, tmp_path):
    m = tmp_path / "t.map"
    m.write_text("map 1 1\nmap 2 1\nmap 3 1\n")
    code, text = run("solve", fixture_dir / "eta_metric_3pt.tbl", "--map", m, "--x0", "3",
                     "--scheme", "strict")
    assert code == 0 and "fixed point: 1" in text


def test_solve_usage_errors():
    assert run("solve", "three_point_cone", "--x0", "1")[0] == 2  # no map
    assert run("solve", "half_map", "--map", "warp 3")[0] == 2
    assert run("solve", "half_map", "--x0", "-1")[0] == 2
    assert run("solve", "half_map", "--tol", "0")[0] == 2
    assert run("bogus")[0] == 2


def test_trace():
    code, text = run("trace", "half_map", "--x0", "1", "--max-iter", "6")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0 and len(rows) == 6
    assert float(rows[1]["d_n"]) == 1 / 16
    assert rows[0]["S_n"] == "" and float(rows[1]["S_n"]) > 0
    code, text = run("trace", "half_map", "--map", "const 0", "--x0", "0")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 1 and float(rows[0]["d_n"]) == 0.0
    code, text = run("trace", "square_map", "--max-iter", "5")
    d = [float(r["d_n"]) for r in csv.DictReader(io.StringIO(text))]
    assert all(b < a * a * 100 for a, b in zip(d, d[1:])) and d == sorted(d, reverse=True)


def test_csv_uses_17_digits():
    code, text = run("trace", "half_map", "--max-iter", "3", "--map", "affine 0.3 0")
    assert "0.089999999999999997" in text  # x_2 = 0.3 * 0.3, printed losslessly


def test_export_fixture(tmp_path):
    target = tmp_path / "e.tbl"
    assert run("export-fixture", "eta_metric_3pt", "-o", target)[0] == 0
    assert run("verify", target)[0] == 0
    assert run("export-fixture", "half_map")[0] == 2
    assert run("export-fixture", "nope")[0] == 2


def test_run_config_validation():
    with pytest.raises(ContractViolation):
        RunConfig(tolerance=0)
    with pytest.raises(ContractViolation):
        RunConfig(max_iter=0)
    with pytest.raises(ContractViolation):
        RunConfig(tail_window=1)

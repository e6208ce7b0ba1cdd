import csv
import json
import re

import pytest

from covert_route.cli import main, parse_values
from covert_route.scenario import load


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def scenario_file(tmp_path, capsys):
    path = tmp_path / "s.json"
    code, out, _ = run(capsys, "gen", "--seed", "7", "--nodes", "30", "--wardens", "30",
                       "--dim", "100", "--alpha", "3", "--out", str(path))
    assert code == 0 and out.strip() == str(path)
    return path


def test_gen_is_deterministic(tmp_path, capsys, scenario_file):
    other = tmp_path / "t.json"
    run(capsys, "gen", "--seed", "7", "--nodes", "30", "--wardens", "30", "--out", str(other))
    assert other.read_bytes() == scenario_file.read_bytes()
    assert load(other).n_nodes == 32


def test_gen_rejects_small_alpha(tmp_path, capsys):
    code, _, err = run(capsys, "gen", "--seed", "1", "--alpha", "1", "--out", str(tmp_path / "x"))
    assert code == 2 and "alpha < 2" in err


def test_snapshot_all_regimes(scenario_file, capsys, tmp_path):
    out_csv = tmp_path / "snap.csv"
    code, out, _ = run(capsys, "snapshot", "--scenario", str(scenario_file), "--delta", "0.05",
                       "--regime", "all", "--n", "10000", "--out", str(out_csv))
    assert code == 0
    blocks = re.findall(r"^\[(\S+)\] path ([\d-]+)", out, re.M)
    assert [b[0] for b in blocks] == ["mt-sk", "md-sk", "mt-ik", "md-ik"]
    assert out.count("D_exact ≤ δ=0.05: PASS") == 4
    assert "/√n" in out and "·√n" in out
    rows = list(csv.DictReader(out_csv.open()))
    rate = {r["regime"]: float(r["rate_coeff"]) for r in rows}
    assert rate["mt-ik"] >= rate["mt-sk"]
    assert all(r["certified"] == "PASS" for r in rows)


def test_snapshot_single_regime(scenario_file, capsys):
    code, out, _ = run(capsys, "snapshot", "--scenario", str(scenario_file), "--delta", "0.05",
                       "--regime", "md-ik")
    assert code == 0 and out.count("] path") == 1 and "certificate" not in out


def test_snapshot_two_nodes(tmp_path, capsys):
    path = tmp_path / "two.json"
    run(capsys, "gen", "--seed", "2", "--nodes", "0", "--wardens", "3", "--out", str(path))
    code, out, _ = run(capsys, "snapshot", "--scenario", str(path), "--delta", "0.05",
                       "--regime", "mt-sk,mt-ik")
    assert code == 0
    assert re.findall(r"path ([\d-]+)", out) == ["0-1", "0-1"]


def test_snapshot_bad_regime(scenario_file, capsys):
    code, _, err = run(capsys, "snapshot", "--scenario", str(scenario_file), "--delta", "0.05",
                       "--regime", "fast")
    assert code == 2 and "unknown regime" in err


def test_snapshot_missing_file(tmp_path, capsys):
    code, _, _ = run(capsys, "snapshot", "--scenario", str(tmp_path / "none.json"), "--delta", "0.1")
    assert code == 2


def test_snapshot_invalid_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"alpha": 1.5}))
    code, _, err = run(capsys, "snapshot", "--scenario", str(bad), "--delta", "0.1")
    assert code == 2 and "error" in err


def test_sweep_row_counts(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, stdout, _ = run(capsys, "sweep", "--axis", "delta", "--values", "0.01:0.1:10",
                          "--trials", "3", "--nodes", "8", "--wardens", "6", "--out", str(out))
    assert code == 0
    summary = tmp_path / "sweep.summary.csv"
    assert stdout.split() == [str(out), str(summary)]
    rows = list(csv.DictReader(summary.open()))
    assert len(rows) == 10 * 4
    by_value = {}
    for r in rows:
        by_value.setdefault(r["axis_value"], {})[r["regime"]] = float(r["mean_rate_coeff"])
    for cell in by_value.values():
        assert cell["mt-ik"] >= cell["mt-sk"]
    assert len(out.read_text().splitlines()) == 1 + 10 * 4 * 3


def test_sweep_rerun_is_byte_identical(tmp_path, capsys, monkeypatch):
    args = ["sweep", "--axis", "n_wardens", "--values", "2,4,8", "--trials", "4",
            "--nodes", "6", "--regimes", "mt-sk,md-ik"]
    run(capsys, *args, "--out", str(tmp_path / "a.csv"), "--jobs", "1")
    monkeypatch.setenv("COVERT_ROUTE_JOBS", "2")
    run(capsys, *args, "--out", str(tmp_path / "b.csv"))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.summary.csv").read_bytes() == (tmp_path / "b.summary.csv").read_bytes()


def test_sweep_bad_values(tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--axis", "n_nodes", "--values", "1.5,2",
                       "--out", str(tmp_path / "x.csv"))
    assert code == 2 and "integers" in err
    code, _, _ = run(capsys, "sweep", "--axis", "delta", "--values", "0.1,0.05",
                     "--out", str(tmp_path / "x.csv"))
    assert code == 2


def test_parse_values():
    assert parse_values("1,2,3") == [1.0, 2.0, 3.0]
    assert parse_values("0:30:4", integer=True) == [0, 10, 20, 30]


def test_verify_pass(capsys):
    code, out, _ = run(capsys, "verify", "--cases", "10")
    assert code == 0
    assert out.strip().endswith("3 suites, 10 cases each: PASS")


def test_verify_detects_injected_fault(capsys):
    code, out, _ = run(capsys, "verify", "--cases", "10", "--inject-fault", "0.5")
    assert code == 1
    assert "FAIL" in out and re.search(r"seed=\d+", out)


def test_verify_size_cap_limit(capsys):
    code, _, err = run(capsys, "verify", "--size-cap", "13")
    assert code == 2 and "size-cap" in err


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2

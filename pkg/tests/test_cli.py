"""End-to-end command line tests, driven through main(argv)."""
import csv
import json

import pytest

from vcauction import GenConfig, config_to_dict, scenario_loads
from vcauction.cli import main

TINY_CFG = GenConfig(job_types=(1,), sp_count=2, vms_per_sp=(1, 2))


@pytest.fixture()
def tiny_config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config_to_dict(TINY_CFG)))
    return str(path)


@pytest.fixture()
def tiny_scenario_file(tmp_path, tiny_config_file):
    path = tmp_path / "scenario.json"
    assert main(["generate", "--config", tiny_config_file, "--seed", "0", "--out", str(path)]) == 0
    return str(path)


def test_generate_deterministic(tmp_path):
    a, b, c = (tmp_path / n for n in ("a.json", "b.json", "c.json"))
    assert main(["generate", "--preset", "small", "--seed", "7", "--out", str(a)]) == 0
    assert main(["generate", "--preset", "small", "--seed", "7", "--out", str(b)]) == 0
    assert main(["generate", "--preset", "small", "--seed", "8", "--out", str(c)]) == 0
    assert a.read_text() == b.read_text()
    assert a.read_text() != c.read_text()


def test_generate_stdout_parses(capsys):
    assert main(["generate", "--preset", "small", "--seed", "0"]) == 0
    s = scenario_loads(capsys.readouterr().out)
    assert len(s.buyers) == 7


def test_generate_rejects_bad_config(tmp_path):
    bad = tmp_path / "bad.json"
    doc = config_to_dict(TINY_CFG)
    doc["epsilon_range"] = [0.9, 1.2]
    bad.write_text(json.dumps(doc))
    assert main(["generate", "--config", str(bad), "--out", str(tmp_path / "x.json")]) == 2


def test_solve_matching(tmp_path, tiny_scenario_file, capsys):
    out = tmp_path / "run.json"
    assert main(["solve", tiny_scenario_file, "--mechanism", "maxuosg", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "maxuosg: ok" in printed
    doc = json.loads(out.read_text())
    assert doc["mechanism"] == "maxuosg"
    assert doc["success"]
    assert len(doc["pairs"]) == 3
    assert doc["validated"]


def test_solve_exact(tiny_scenario_file, capsys):
    assert main(["solve", tiny_scenario_file, "--mechanism", "opt"]) == 0
    printed = capsys.readouterr().out
    assert "opt: ok" in printed
    assert "winner" in printed


def test_solve_seeded_baseline_reproducible(tmp_path, tiny_scenario_file):
    outs = []
    for name in ("r1.json", "r2.json"):
        out = tmp_path / name
        assert main(
            ["solve", tiny_scenario_file, "--mechanism", "rmm", "--seed", "9", "--out", str(out)]
        ) == 0
        outs.append(json.loads(out.read_text()))
    assert outs[0]["pairs"] == outs[1]["pairs"]


def test_solve_bad_inputs(tmp_path, tiny_scenario_file, capsys):
    assert main(["solve", tiny_scenario_file, "--mechanism", "vcg"]) == 2
    assert main(["solve", str(tmp_path / "missing.json"), "--mechanism", "opt"]) == 2
    garbled = tmp_path / "bad.json"
    garbled.write_text("{not json")
    assert main(["solve", str(garbled), "--mechanism", "opt"]) == 2
    capsys.readouterr()


def test_verify_matching(tmp_path, tiny_scenario_file, capsys):
    out = tmp_path / "report.json"
    assert main(["verify", tiny_scenario_file, "--out", str(out)]) == 0
    assert "0 sweep rows" not in capsys.readouterr().out
    report = json.loads(out.read_text())
    assert report["violations"] == []
    with out.with_suffix(".csv").open() as f:
        rows = list(csv.DictReader(f))
    assert rows
    assert {"seller", "bid", "won", "payment", "utility"} <= set(rows[0])


def test_verify_exact(tiny_scenario_file):
    assert main(["verify", tiny_scenario_file, "--mechanism", "opt"]) == 0


def test_verify_infeasible_is_not_a_violation(tmp_path, tiny_config_file, capsys):
    path = tmp_path / "dead.json"
    # seed 3 draws a scenario with no complete feasible allocation
    assert main(["generate", "--config", tiny_config_file, "--seed", "3", "--out", str(path)]) == 0
    assert main(["verify", str(path)]) == 0
    assert "nothing to verify" in capsys.readouterr().out


def test_experiment_writes_summary_and_rows(tmp_path, tiny_config_file, capsys):
    out = tmp_path / "exp.json"
    code = main(
        ["experiment", "--config", tiny_config_file, "--trials", "4", "--out", str(out)]
    )
    assert code == 0
    assert "maxuosg" in capsys.readouterr().out
    summary = json.loads(out.read_text())
    assert summary["trials"] == 4
    assert summary["ir_violations"] == []
    with out.with_suffix(".csv").open() as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 20  # 4 trials x 5 mechanisms


def test_bench_table(tmp_path, capsys):
    out = tmp_path / "bench.json"
    assert main(["bench", "--job-type", "1", "--sp-range", "1:2", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "providers" in printed and "enumeration" in printed
    rows = json.loads(out.read_text())
    assert [r["sp_count"] for r in rows] == [1, 2]
    assert all(r["enum_completed"] for r in rows)
    assert out.with_suffix(".csv").exists()


def test_bench_rejects_bad_range(tmp_path, capsys):
    assert main(["bench", "--sp-range", "3", "--out", str(tmp_path / "b.json")]) == 2
    capsys.readouterr()


def test_help_and_missing_command(capsys):
    assert main(["--help"]) == 0
    assert main([]) == 2
    capsys.readouterr()

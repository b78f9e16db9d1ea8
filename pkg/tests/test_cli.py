import csv
import json
import math

import pytest

from subgauss import cli
from subgauss.directional import example42_closed_form
from subgauss.report import BoundReport

SQRT_LN2 = math.sqrt(math.log(2.0))


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    status = cli.main([*argv, "--out", str(out), "-q"])
    return status, out


def read_reports(out):
    return [json.loads(line) for line in (out / "reports.jsonl").read_text().splitlines()]


def test_list_scenarios(capsys):
    assert cli.main(["list"]) == 0
    text = capsys.readouterr().out
    rows = {line.split()[0]: line for line in text.splitlines()}
    assert "Eq (4.2)" in rows["thm4_1"]
    assert "Eq (A.25)" in rows["thmA_7"]
    assert "Eq (5.8)" in rows["prop5_3"]
    assert set(rows) == set(cli.SCENARIOS)


def test_list_table_entries():
    table = {name: anchor for name, anchor, _ in cli.list_scenarios()}
    assert table["thm4_1"] == "Eq (4.2)"
    assert table["thmA_7"] == "Eq (A.25)"
    assert table["prop5_3"] == "Eq (5.8)"


def test_unknown_scenario_is_config_error(tmp_path):
    status, out = run(tmp_path, "no_such_scenario")
    assert status == 2
    assert not (out / "reports.jsonl").exists()


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert run(tmp_path, "fact3_3", "--config", str(cfg))[0] == 2
    cfg.write_text(json.dumps({"scenario": "fact3_3", "bogus_key": 1}))
    assert run(tmp_path, "--config", str(cfg))[0] == 2
    cfg.write_text(json.dumps({"scenario": "fact3_3", "vector": {"kind": "nope"}}))
    assert run(tmp_path, "--config", str(cfg))[0] == 2


def test_scenario_mismatch(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scenario": "fact3_3"}))
    assert run(tmp_path, "eq4_36", "--config", str(cfg))[0] == 2


def test_capacity_error(tmp_path):
    assert run(tmp_path, "thm4_1", "--n", "30")[0] == 3


def test_missing_required_params(tmp_path):
    assert run(tmp_path, "prop5_3")[0] == 2


def test_violation_status(tmp_path, monkeypatch):
    bad = BoundReport("fake", "none", 2.0, 1.0)
    monkeypatch.setitem(cli.SCENARIOS, "fake", ("none", "", lambda cfg: ([bad], None)))
    assert run(tmp_path, "fake")[0] == 1


@pytest.mark.parametrize("scenario", ["fact3_3", "eq4_36", "prop2_2", "prop2_3", "prop4_3", "cor4_4",
                                      "cor4_5", "prop4_8", "thm4_1", "prop3_1", "factA_1", "factA_2",
                                      "propA_4", "thmA_7", "remarkA_9"])
def test_random_fixture_scenarios_pass(tmp_path, scenario):
    status, out = run(tmp_path, scenario, "--seed", "7")
    assert status == 0
    rows = read_reports(out)
    assert rows and all(r["scenario"] == scenario for r in rows)
    assert all(r["holds"] in (True, None) for r in rows)


def test_good_set_theorem_auto_K(tmp_path):
    status, out = run(tmp_path, "thm4_1", "--K", "auto", "--eta", "0.1", "--seed", "3")
    assert status == 0
    (row,) = [r for r in read_reports(out) if r["name"] == "thm4_1"]
    assert row["lhs"] >= row["rhs"] - 1e-12
    assert row["rhs"] == pytest.approx(row["params"]["p"] - 0.1)


def test_explicit_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "scenario": "fact3_3",
        "vector": {"kind": "product", "marginals": [{"atoms": [[-1, 0.5], [1, 0.5]]}] * 3},
        "direction": [1.0, 2.0, -1.0],
        "measure": {"p": 0.3},
    }))
    status, out = run(tmp_path, "--config", str(cfg))
    assert status == 0
    rows = read_reports(out)
    assert rows and all(r["holds"] for r in rows)


def test_partial_scenario_cli(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "scenario": "prop5_3",
        "vector": {"kind": "product", "marginals": [{"atoms": [[-1, 0.5], [1, 0.5]]}] * 4},
        "direction": [1, 1, 1, 1],
        "measure": {"p": 0.5},
    }))
    status, out = run(tmp_path, "--config", str(cfg), "--K", "1.5", "--tau", "9", "--alpha", "0.5")
    assert status == 0
    names = {r["name"] for r in read_reports(out)}
    assert "eq5_10" in names


def test_vanishing_hypergraph_cli(tmp_path):
    status, out = run(tmp_path, "example5_1", "--n", "6", "--d", "2", "--p", "0.5")
    assert status == 0


def test_cancellation_spectrum_cli(tmp_path):
    status, out = run(tmp_path, "example4_2", "--n", "20", "--p", "0.5", "--C", "3")
    assert status == 0
    with open(out / "spectrum.csv") as fh:
        rows = sum(1 for _ in csv.reader(fh)) - 1
    assert rows == 2 ** 21
    (meas,) = [r for r in read_reports(out) if r["name"] == "example4_2_measure"]
    expected = example42_closed_form(20, 0.5, 3.0, 1 / SQRT_LN2)
    assert meas["lhs"] == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(0.5 + 0.5 * sum(math.comb(20, k) for k in range(7)) / 2 ** 20, abs=1e-15)


def test_determinism(tmp_path):
    a = run(tmp_path, "suite", "--seed", "11", "--fixtures", "4", name="a")[1]
    b = run(tmp_path, "suite", "--seed", "11", "--fixtures", "4", name="b")[1]
    assert (a / "reports.jsonl").read_bytes() == (b / "reports.jsonl").read_bytes()
    c = run(tmp_path, "suite", "--seed", "11", "--fixtures", "4", "--threads", "3", name="c")[1]
    assert (a / "reports.jsonl").read_bytes() == (c / "reports.jsonl").read_bytes()


def test_reports_sorted_and_seventeen_digits(tmp_path):
    out = run(tmp_path, "suite", "--seed", "5", "--fixtures", "2")[1]
    rows = read_reports(out)
    keys = [(r["scenario"], r["name"]) for r in rows]
    assert keys == sorted(keys)
    text = (out / "reports.jsonl").read_text()
    for r in rows:
        if isinstance(r["lhs"], float) and math.isfinite(r["lhs"]):
            assert f'"lhs": {r["lhs"]:.17g}' in text


def test_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SUBGAUSS_THREADS", "2")
    assert run(tmp_path, "fact3_3", "--seed", "1")[0] == 0

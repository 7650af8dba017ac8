import csv
import io
import json
import subprocess
import sys

import pytest

from searchtime.cli import main, to_json


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def run_json(argv, capsys):
    code, out, _ = run(argv + ["--format", "json"], capsys)
    assert code == 0
    return json.loads(out)


def test_estimate_sgl_tree(capsys):
    res = run_json(["estimate", "--model", "tree", "--depth", "14", "--goal-level", "8", "--goal-prob", "0.01",
                    "--conditioned"], capsys)["result"]
    assert res["bfs"]["mean"] == pytest.approx(333.85, rel=1e-4)
    assert res["dfs"]["mean"] == pytest.approx(9967, abs=2)
    assert res["recommendation"] == "BFS"
    assert "bfs_sgl" in res["formula"]["bfs"]


def test_estimate_gaussian_tree(capsys):
    res = run_json(["estimate", "--model", "tree", "--depth", "14", "--mu", "5", "--sigma2", "0.1"], capsys)["result"]
    assert res["bfs"]["mean"] == pytest.approx(37.0, abs=0.4)
    assert res["dfs"]["mean"] == pytest.approx(5949.04, rel=2e-3)
    assert res["recommendation"] == "BFS"


def test_estimate_binary_grammar_bounds(capsys):
    res = run_json(["estimate", "--model", "binary-grammar", "--depth", "14", "--goal-level", "14",
                    "--goal-prob", "0.1", "--condition-on-goal"], capsys)["result"]
    assert res["dfs"]["lower"] == pytest.approx(3.99, abs=0.01)
    assert res["dfs"]["upper"] == pytest.approx(36.12, abs=0.01)
    assert res["dfs"]["mean"] == pytest.approx(20.06, abs=0.01)
    assert res["recommendation"] == "DFS"


def test_estimate_text_output(capsys):
    code, out, _ = run(["estimate", "--depth", "14", "--goal-level", "14", "--goal-prob", "0.1"], capsys)
    assert code == 0
    assert "verdict: DFS" in out


@pytest.mark.parametrize("argv", [
    ["estimate", "--depth", "14"],
    ["estimate", "--depth", "14", "--goal-level", "3", "--goal-prob", "0.1", "--mu", "3", "--sigma2", "1"],
    ["estimate", "--depth", "14", "--goal-level", "20", "--goal-prob", "0.1"],
    ["estimate", "--depth", "14", "--goal-level", "3", "--goal-prob", "1.5"],
    ["estimate", "--depth", "14", "--mu", "3"],
    ["table", "nope"],
    ["table", "sgl", "--trials", "-1"],
    ["nonsense"],
    [],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_capacity_error_exits_3(capsys):
    code, _, err = run(["simulate", "--depth", "45", "--goal-level", "3", "--goal-prob", "0.1", "--trials", "1"], capsys)
    assert code == 3
    assert err


def test_json_round_trip():
    payload = {"params": {"a": 1, "b": [1.5, None]}, "cells": [{"x": 0.1, "y": "z"}], "meta": {"seed": 3}}
    assert json.loads(to_json(payload)) == payload


def test_table_analytical_only(capsys):
    data = run_json(["table", "sgl", "--trials", "0"], capsys)
    assert set(data) == {"params", "cells", "meta"}
    cells = {(c["g"], c["p_g"], c["method"]): c for c in data["cells"]}
    assert len(cells) == 24
    assert cells[(8, 0.01, "BFS")]["analytical"] == pytest.approx(333.85, rel=1e-4)
    assert cells[(5, 0.001, "BFS")]["blank"] is True
    assert cells[(8, 0.01, "BFS")]["empirical"] is None


def test_table_bg_csv(capsys, tmp_path):
    out = tmp_path / "bg.csv"
    assert main(["table", "bg", "--trials", "0", "--format", "csv", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    dfs = [r for r in rows if r["g"] == "11" and r["p_g"] == "0.01" and r["method"] == "DFS"][0]
    assert float(dfs["analytical"]) == pytest.approx(5805.72, rel=5e-3)


def test_table_empirical_cell(capsys):
    data = run_json(["table", "sgl", "--trials", "300", "--seed", "4"], capsys)
    cell = [c for c in data["cells"] if (c["g"], c["p_g"], c["method"]) == (8, 0.01, "BFS")][0]
    assert cell["error_pct"] < 10
    assert data["meta"]["trials"] == 300


def test_csv_is_byte_identical_for_same_seed(tmp_path):
    outs = []
    for name in ("a", "b"):
        path = tmp_path / f"{name}.csv"
        assert main(["table", "mgl", "--trials", "50", "--seed", "9", "--format", "csv", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    path = tmp_path / "c.csv"
    main(["table", "mgl", "--trials", "50", "--seed", "10", "--format", "csv", "--out", str(path)])
    assert path.read_bytes() != outs[0]


def test_dataset_small(tmp_path):
    path = tmp_path / "d.csv"
    assert main(["dataset", "--count", "12", "--seed", "1", "--out", str(path)]) == 0
    text = path.read_text()
    assert text.startswith("#")
    rows = list(csv.DictReader(line for line in text.splitlines() if not line.startswith("#")))
    assert len(rows) == 12
    for r in rows:
        assert 5 <= int(r["num_rules"]) <= 9
        assert 11 <= int(r["max_depth"]) <= 15
        bfs, dfs = int(r["bfs_time"]), int(r["dfs_time"])
        assert r["winner"] == ("BFS" if bfs <= dfs else "DFS")
    again = tmp_path / "e.csv"
    main(["dataset", "--count", "12", "--seed", "1", "--out", str(again)])
    assert again.read_bytes() == path.read_bytes()


def test_boundary_small(capsys):
    data = run_json(["boundary", "sgl-fig", "--samples", "10", "--seed", "2", "--grid-points", "5"], capsys)
    assert set(data) == {"params", "grid", "rows", "accuracy", "meta"}
    assert len(data["rows"]) == 10
    assert data["accuracy"] == sum(r["correct"] for r in data["rows"]) / 10
    assert all(r["winner"] == ("BFS" if r["bfs_time"] <= r["dfs_time"] else "DFS") for r in data["rows"])


def test_simulate_tree_matches_oracle(capsys):
    res = run_json(["simulate", "--depth", "6", "--goal-level", "3", "--goal-prob", "0.2", "--trials", "10000",
                    "--seed", "1"], capsys)["result"]
    stats = res["stats"]
    assert abs(stats["mean"] - res["oracle"]) <= 4 * stats["stderr"]


def test_simulate_binary_grammar_dfs_bracket(capsys):
    res = run_json(["simulate", "--model", "binary-grammar", "--depth", "10", "--goal-level", "10",
                    "--goal-prob", "0.1", "--method", "dfs", "--trials", "2000"], capsys)["result"]
    est = res["analytical"]
    assert est["lower"] - 4 * res["stats"]["stderr"] <= res["stats"]["mean"] <= est["upper"] + 11


def test_simulate_single_trial_reproducible(capsys):
    argv = ["simulate", "--depth", "8", "--goal-level", "5", "--goal-prob", "0.3", "--trials", "1", "--seed", "5"]
    first = run_json(argv, capsys)["result"]["stats"]
    assert first == run_json(argv, capsys)["result"]["stats"]


def test_export_graph(capsys):
    code, out, err = run(["export-graph", "--model", "binary-grammar", "--depth", "2"], capsys)
    assert code == 0
    nodes, edges = out.split("\n\n")
    assert len(nodes.splitlines()) == 7
    assert "rule ids" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "searchtime", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip().startswith("searchtime")

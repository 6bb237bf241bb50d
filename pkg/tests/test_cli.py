import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from paretomtl.cli import main
from paretomtl.config import ConfigError, load_config, parse_config

SMALL = {
    "problem": {"kind": "synthetic", "d": 20},
    "preferences": {"count": 5},
    "linear_weights": {"mode": "random", "count": 6},
    "mgda_runs": 3,
    "solver": {"max_iters": 40},
}


def _write(path, data):
    path.write_text(json.dumps(data, indent=2))
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def small_run(tmp_path):
    cfg = _write(tmp_path / "cfg.json", SMALL)
    out = tmp_path / "out"
    assert main(["run", str(cfg), "-o", str(out)]) == 0
    return out


def test_run_writes_expected_rows(small_run):
    rows = _rows(small_run / "front.csv")
    by_algo = {a: [r for r in rows if r["algorithm"] == a] for a in ("pareto-mtl", "mgda", "linear")}
    assert [len(v) for v in by_algo.values()] == [5, 3, 6]
    assert [int(r["k_or_seed"]) for r in by_algo["pareto-mtl"]] == list(range(5))
    assert set(rows[0]) >= {"algorithm", "run_id", "k_or_seed", "loss_1", "loss_2", "terminal_status"}
    traj = _rows(small_run / "trajectory.csv")
    assert {r["phase"] for r in traj} <= {"init", "main"}
    weights = _rows(small_run / "weights.csv")
    assert weights and all(r["phase"] == "main" for r in weights if "phase" in r)
    assert not (small_run / "RUN_INCOMPLETE").exists()


def test_summary_embeds_config_and_svg_is_well_formed(small_run):
    summary = json.loads((small_run / "summary.json").read_text())
    assert summary["config"]["solver"]["max_iters"] == 40
    assert summary["config"]["preferences"]["count"] == 5
    assert set(summary["algorithms"]) == {"pareto-mtl", "mgda", "linear"}
    best = summary["algorithms"]["pareto-mtl"]["per_task_best"]
    # u=(1,0) points along loss_1, so that sector holds the best loss_2 and vice versa
    assert [b["index"] for b in best] == [4, 0]
    root = ET.parse(small_run / "front.svg").getroot()
    assert root.tag.endswith("svg")


def test_rerun_is_byte_identical(tmp_path, small_run):
    again = tmp_path / "again"
    assert main(["run", str(tmp_path / "cfg.json"), "-o", str(again)]) == 0
    for name in ("front.csv", "trajectory.csv", "weights.csv"):
        assert (small_run / name).read_bytes() == (again / name).read_bytes()


def test_negative_eta_rejected_before_any_output(tmp_path, capsys):
    cfg = _write(tmp_path / "bad.json", {**SMALL, "solver": {"eta": -0.1}})
    out = tmp_path / "never"
    assert main(["run", str(cfg), "-o", str(out)]) == 2
    err = capsys.readouterr().err
    assert "solver.eta" in err and "bad.json:" in err
    assert not out.exists()


def test_unknown_key_reports_line(tmp_path, capsys):
    text = '{\n  "problem": {"kind": "synthetic"},\n  "solvr": {}\n}\n'
    (tmp_path / "c.json").write_text(text)
    assert main(["run", str(tmp_path / "c.json")]) == 2
    assert "c.json:3: solvr" in capsys.readouterr().err


def test_invalid_json_reports_line(tmp_path):
    (tmp_path / "c.json").write_text('{\n  "problem": {,\n}')
    with pytest.raises(ConfigError) as info:
        load_config(tmp_path / "c.json")
    assert info.value.line == 2


@pytest.mark.parametrize(
    "data, key",
    [
        ({"problem": {"kind": "nope"}}, "problem.kind"),
        ({"preferences": {"count": 1}}, "preferences.count"),
        ({"linear_weights": {"mode": "explicit", "weights": [[0.3, 0.3]]}}, "linear_weights.weights"),
        ({"seeds": [1, 1]}, "seeds"),
        ({"solver": {"max_iters": 1.5}}, "solver.max_iters"),
    ],
)
def test_config_validation_messages(data, key):
    with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
        parse_config(data)


def test_logistic_defaults_and_env_override(tmp_path, monkeypatch):
    cfg = parse_config({"problem": {"kind": "logistic3"}})
    assert cfg.solver.max_iters == 500 and cfg.solver.eta_decay == 1.0
    monkeypatch.setenv("PARETOMTL_OUTPUT_DIR", str(tmp_path / "env"))
    assert load_config(_write(tmp_path / "c.json", SMALL)).output_path() == tmp_path / "env"


def test_env_var_redirects_run(tmp_path, monkeypatch):
    monkeypatch.setenv("PARETOMTL_OUTPUT_DIR", str(tmp_path / "env"))
    cfg = _write(tmp_path / "c.json", {**SMALL, "algorithms": ["mgda"]})
    assert main(["run", str(cfg)]) == 0
    assert len(_rows(tmp_path / "env" / "front.csv")) == 3


def test_preference_file_input(tmp_path):
    (tmp_path / "prefs.csv").write_text("# three directions\n1,0\n0.7071067811865476,0.7071067811865476\n0,1\n")
    cfg = _write(tmp_path / "c.json", {**SMALL, "algorithms": ["pareto-mtl"], "preferences": {"file": "prefs.csv"}})
    out = tmp_path / "out"
    assert main(["run", str(cfg), "-o", str(out)]) == 0
    assert len(_rows(out / "front.csv")) == 3


def test_compare_identical_files(tmp_path, small_run):
    out = tmp_path / "cmp.json"
    front = str(small_run / "front.csv")
    assert main(["compare", front, front, "--prefs", "5", "--ref", "1.1", "1.1", "-o", str(out)]) == 0
    report = json.loads(out.read_text())
    rows = [r for r in report["sources"] if r["algorithm"] == "pareto-mtl"]
    assert len(rows) == 2
    assert rows[0]["hypervolume"] == rows[1]["hypervolume"]
    assert rows[0]["pooled_nondominated"] == rows[1]["pooled_nondominated"]


def test_compare_empty_and_mismatched(tmp_path, small_run, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("algorithm,run_id,k_or_seed,loss_1,loss_2,terminal_status\n")
    front = str(small_run / "front.csv")
    assert main(["compare", front, str(empty), "-o", str(tmp_path / "c.json")]) == 0
    report = json.loads((tmp_path / "c.json").read_text())
    assert any(r["n_points"] == 0 and r["hypervolume"] is None for r in report["sources"])
    three = tmp_path / "three.csv"
    three.write_text("algorithm,run_id,k_or_seed,loss_1,loss_2,loss_3,terminal_status\nmgda,0,0,1,1,1,max-iters\n")
    assert main(["compare", front, str(three), "-o", str(tmp_path / "d.json")]) == 2
    with pytest.raises(SystemExit):
        main(["compare", front])


def test_ablate_init_pairs_runs(tmp_path):
    cfg = _write(tmp_path / "c.json", {**SMALL, "algorithms": ["pareto-mtl"], "seeds": [0, 1]})
    out = tmp_path / "abl"
    assert main(["ablate-init", str(cfg), "-o", str(out)]) == 0
    report = json.loads((out / "ablation.json").read_text())
    assert len(report["coverage"]["with_init"]) == len(report["coverage"]["without_init"]) == 2
    with_rows = _rows(out / "with_init" / "front.csv")
    without_rows = _rows(out / "without_init" / "front.csv")
    assert [r["k_or_seed"] for r in with_rows] == [r["k_or_seed"] for r in without_rows]
    assert not any(r["phase"] == "init" for r in _rows(out / "without_init" / "trajectory.csv"))


def test_check_subcommand(capsys):
    assert main(["check"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 3


def test_front_values_round_trip(small_run):
    from paretomtl.artifacts import read_front

    rows, m = read_front(small_run / "front.csv")
    assert m == 2
    L = np.array([r["losses"] for r in rows])
    assert np.all(np.isfinite(L)) and np.all(L >= 0)

import json
import subprocess
import sys

import pytest

from rifsquant.cli import main
from rifsquant.examples import example_text


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_kappa_example_two(tmp_path, capsys):
    assert run(tmp_path, "kappa", "--example", "2", "--r", "1") == 0
    assert "kappa_r = 0.430677" in capsys.readouterr().out
    report = json.loads((tmp_path / "kappa.json").read_text())
    assert round(report["kappa"], 6) == 0.430677


def test_kappa_from_file(tmp_path):
    spec = {"dimension": 1, "ambient": {"lo": [0], "hi": [1]}, "zeta": [1.0],
            "components": [{"maps": [{"ratio": 0.5, "translation": [0.0]},
                                     {"ratio": 0.5, "translation": [0.5]}], "probs": [0.5, 0.5]}]}
    path = tmp_path / "halves.json"
    path.write_text(json.dumps(spec))
    assert run(tmp_path, "kappa", "--spec", str(path)) == 0
    assert json.loads((tmp_path / "kappa.json").read_text())["kappa"] == pytest.approx(1.0, abs=1e-10)


def test_invalid_spec_exit_code(tmp_path, capsys):
    data = json.loads(example_text(1))
    data["components"][0]["probs"] = [0.4, 0.5]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data, indent=2))
    assert run(tmp_path, "kappa", "--spec", str(path)) == 2
    err = capsys.readouterr().err
    assert "component 0" in err and "line" in err


def test_missing_file_exit_code(tmp_path):
    assert run(tmp_path, "kappa", "--spec", str(tmp_path / "nope.json")) == 2


def test_budget_exit_code(tmp_path, monkeypatch):
    monkeypatch.setenv("FRACTAL_QUANT_BUDGET", "100")
    assert run(tmp_path, "pipeline", "--example", "1", "--n-max", "64") == 3


def test_pipeline_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["pipeline", "--example", "3", "--n-max", "64", "--seed", "4", "--out", str(out)]) == 0
    assert (a / "pipeline.csv").read_bytes() == (b / "pipeline.csv").read_bytes()
    assert (a / "quantizers.csv").read_bytes() == (b / "quantizers.csv").read_bytes()
    assert (a / "pipeline.csv").read_text().splitlines()[0] == "n;V;e_n"


def test_shallow_depth_warns(tmp_path, capsys):
    assert run(tmp_path, "pipeline", "--example", "1", "--n-max", "32", "--depth", "6") == 0
    assert "resolution rule" in capsys.readouterr().err
    assert json.loads((tmp_path / "pipeline.json").read_text())["resolution_ok"] is False


@pytest.mark.parametrize("k,bound", [(1, 0.1), (2, 0.05)])
def test_pipeline_accuracy(tmp_path, k, bound):
    assert run(tmp_path, "pipeline", "--example", str(k), "--seed", "0", "--r", "1") == 0
    summary = json.loads((tmp_path / "pipeline.json").read_text())
    assert summary["abs_error"] <= bound and summary["resolution_ok"]


def test_lloyd_pipeline_runs(tmp_path):
    assert run(tmp_path, "pipeline", "--example", "2", "--n-max", "32", "--depth", "7", "--lloyd",
               "--restarts", "2") == 0


def test_reproduce_example_one(tmp_path):
    assert run(tmp_path, "reproduce", "--example", "1") == 0
    rep = json.loads((tmp_path / "reproduce_1.json").read_text())
    assert rep["holds_uessc"] and rep["holds_suosc"]
    assert rep["beta_max"] == pytest.approx(2 / 3)


def test_reproduce_example_two(tmp_path):
    assert run(tmp_path, "reproduce", "--example", "2", "--n-max", "2000") == 0
    rep = json.loads((tmp_path / "reproduce_2.json").read_text())
    assert rep["max_deviation"] <= 1e-12 and rep["verdict"] == "consistent"


def test_reproduce_example_three(tmp_path):
    assert run(tmp_path, "reproduce", "--example", "3") == 0
    rep = json.loads((tmp_path / "reproduce_3.json").read_text())
    assert rep["verdict"] == "inconsistent"
    assert rep["drift_detected"] >= 95
    assert rep["letter_count_identity_error"] <= 1e-9


def test_reproduce_needs_example(tmp_path):
    assert run(tmp_path, "reproduce") == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "rifsquant", "kappa", "--example", "2", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "0.430677" in proc.stdout

"""Command-line interface."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

import solvereval.cli as cli
from solvereval.cli import main

RUNS_CSV = """instance_id,solver_id,status,time_s
i1,a,ok,10.0
i1,b,timeout,100.0
i2,a,ok,20.0
i2,b,ok,5.0
"""

# b beats a narrowly on three instances and blows up on the fourth, so a is
# the single best solver overall yet every 2-instance fold keeps vbs < sbs
FOLD_CSV = """instance_id,solver_id,status,time_s
f1,a,ok,10.0
f1,b,ok,9.9
f2,a,ok,10.0
f2,b,ok,9.9
f3,a,ok,10.0
f3,b,ok,9.9
f4,a,ok,10.0
f4,b,timeout,100.0
"""


@pytest.fixture
def runs_file(tmp_path):
    p = tmp_path / "runs.csv"
    p.write_text(RUNS_CSV)
    return p


class TestArgHandling:
    def test_no_arguments(self, capsys):
        assert main([]) == 1
        assert "error:" in capsys.readouterr().err

    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert "solvereval" in capsys.readouterr().out

    def test_help(self):
        assert main(["--help"]) == 0

    def test_unknown_metric(self, runs_file, capsys):
        code = main(["score", str(runs_file), "--timeout", "100", "--metric", "nope"])
        assert code == 1
        assert "invalid choice" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        code = main(["score", str(tmp_path / "absent.csv"), "--timeout", "100"])
        assert code == 1

    def test_unexpected_error_returns_2(self, runs_file, monkeypatch, capsys):
        def boom(*args, **kwargs):
            raise RuntimeError("internal")

        monkeypatch.setattr(cli, "parse_runs", boom)
        assert main(["score", str(runs_file), "--timeout", "100"]) == 2
        assert "RuntimeError" in capsys.readouterr().err


class TestScore:
    def test_table_output(self, runs_file, capsys):
        assert main(["score", str(runs_file), "--timeout", "100"]) == 0
        out = capsys.readouterr().out
        assert "par" in out and "a" in out and "b" in out

    def test_json_output(self, runs_file, capsys):
        code = main(["score", str(runs_file), "--timeout", "100",
                     "--metric", "par", "--metric", "closed-gap",
                     "--format", "json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["metric"] == ["par", "closed-gap"]
        assert payload["scores"][0]["b"] == pytest.approx(502.5)

    def test_output_file(self, runs_file, tmp_path, capsys):
        dest = tmp_path / "report.json"
        code = main(["score", str(runs_file), "--timeout", "100",
                     "--format", "json", "-o", str(dest)])
        assert code == 0
        assert json.loads(dest.read_text())["scenario"]["id"] == "runs"
        assert capsys.readouterr().out == ""

    def test_folded_scoring(self, tmp_path, capsys):
        p = tmp_path / "folds.csv"
        p.write_text(FOLD_CSV)
        code = main(["score", str(p), "--timeout", "100",
                     "--metric", "closed-gap", "--folds", "2", "--seed", "7",
                     "--format", "json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["provenance"]["fold_plan"] == {"k": 2, "repeats": 1, "seed": 7}
        assert payload["baselines"]

    def test_custom_lambda(self, runs_file, capsys):
        code = main(["score", str(runs_file), "--timeout", "100",
                     "--metric", "par", "--lambda", "2", "--format", "json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["scores"][0]["b"] == pytest.approx(102.5)
        assert payload["params"][0]["lambda"] == 2.0


class TestRank:
    def test_text(self, runs_file, capsys):
        assert main(["rank", str(runs_file), "--timeout", "100"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("1.")
        assert "a" in lines[0]

    def test_json(self, runs_file, capsys):
        assert main(["rank", str(runs_file), "--timeout", "100",
                     "--metric", "solved-count", "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["metric"] == "solved-count"
        assert payload["ranking"][0] == {
            "solver": "a", "score": 2.0, "position": 1, "tied": False,
        }


class TestHeadToHead:
    def test_named_pair(self, runs_file, capsys):
        assert main(["head2head", str(runs_file), "--timeout", "100",
                     "--solvers", "a,b"]) == 0
        out = capsys.readouterr().out
        assert "a" in out and "b" in out

    def test_all_pairs_json(self, runs_file, capsys):
        assert main(["head2head", str(runs_file), "--timeout", "100",
                     "--format", "json"]) == 0
        rows = json.loads(capsys.readouterr().out)["pairs"]
        assert len(rows) == 1
        assert rows[0]["a_faster"] == 1
        assert rows[0]["b_faster"] == 1
        assert rows[0]["ties"] == 0


class TestSweepDelta:
    def test_default_grid(self, runs_file, capsys):
        assert main(["sweep-delta", str(runs_file), "--timeout", "100"]) == 0
        assert "delta" in capsys.readouterr().out

    def test_json_and_flip(self, runs_file, capsys):
        assert main(["sweep-delta", str(runs_file), "--timeout", "100",
                     "--deltas", "0,1,10", "--flip", "b,a",
                     "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert [e["delta"] for e in payload["sweep"]] == [0, 1, 10]
        assert set(payload["sweep"][0]["scores"]) == {"a", "b"}
        assert payload["flip"]["solver_a"] == "b"
        assert payload["flip"]["solver_b"] == "a"

    def test_negative_delta_rejected(self, runs_file, capsys):
        assert main(["sweep-delta", str(runs_file), "--timeout", "100",
                     "--deltas", "-1,0"]) == 1


class TestRuntimeDist:
    def test_text(self, runs_file, capsys):
        assert main(["runtime-dist", str(runs_file), "--timeout", "100",
                     "--solver", "a"]) == 0
        out = capsys.readouterr().out
        assert "10.000" in out and "20.000" in out

    def test_unknown_solver(self, runs_file, capsys):
        assert main(["runtime-dist", str(runs_file), "--timeout", "100",
                     "--solver", "zz"]) == 1


class TestValidate:
    def test_valid_file(self, runs_file, capsys):
        assert main(["validate", str(runs_file), "--timeout", "100"]) == 0
        out = capsys.readouterr().out
        assert "2 instances" in out and "2 solvers" in out

    def test_invalid_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("instance_id,solver_id,status,time_s\ni1,a,ok,1.0\ni2,b,ok,2.0\n")
        assert main(["validate", str(bad), "--timeout", "100"]) == 1
        assert "MissingOutcome" in capsys.readouterr().err


class TestGen:
    def test_default_generation(self, tmp_path, capsys):
        dest = tmp_path / "synth.csv"
        code = main(["gen", "-o", str(dest), "--instances", "30", "--seed", "9"])
        assert code == 0
        assert dest.exists()
        assert str(dest) in capsys.readouterr().out

    def test_generated_file_validates_and_scores(self, tmp_path, capsys):
        dest = tmp_path / "synth.csv"
        assert main(["gen", "-o", str(dest), "--instances", "25", "--seed", "3",
                     "--timeout", "60"]) == 0
        assert main(["validate", str(dest), "--timeout", "60"]) == 0
        assert main(["score", str(dest), "--timeout", "60",
                     "--metric", "closed-gap", "--format", "json"]) == 0
        capsys.readouterr()

    def test_custom_solver_specs(self, tmp_path):
        dest = tmp_path / "synth.csv"
        code = main([
            "gen", "-o", str(dest), "--instances", "20", "--timeout", "50",
            "--solver", "quick:p=0.9,runtime=uniform(1,10)",
            "--solver", "slow:p=0.7,runtime=uniform(20,45)",
        ])
        assert code == 0
        text = dest.read_text()
        assert "quick" in text and "slow" in text

    def test_bad_solver_spec(self, tmp_path, capsys):
        code = main(["gen", "-o", str(tmp_path / "x.csv"),
                     "--solver", "broken"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_optimization_fraction(self, tmp_path):
        dest = tmp_path / "opt.csv"
        assert main(["gen", "-o", str(dest), "--instances", "15", "--seed", "1",
                     "--opt-fraction", "1.0"]) == 0
        header = dest.read_text().splitlines()[0]
        assert header.endswith(",obj")


class TestEntryPoint:
    def test_installed_script(self):
        proc = subprocess.run(
            [sys.executable, "-m", "solvereval.cli", "--version"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "solvereval" in proc.stdout

import json
import subprocess
import sys

import pytest

from taskgraph_works.cli import build_parser, main

SUBCOMMANDS = ("simulate", "capacity", "lpp", "coord", "analyze")


def run(*argv):
    return main([str(a) for a in argv])


class TestSimulate:
    @pytest.mark.parametrize("tag,code", [("d0", 0), ("golden", 0), ("d1", 2)])
    def test_example_one(self, data_dir, tag, code, capsys):
        assert run("simulate", data_dir / f"handoff_{tag}.json", data_dir / "handoff_assignment.json",
                   data_dir / "handoff_pool.json") == code
        out = capsys.readouterr().out
        assert ("FEASIBLE" in out) and (("INFEASIBLE" in out) == (code == 2))

    def test_outputs(self, data_dir, tmp_path):
        run("simulate", data_dir / "handoff_golden.json", data_dir / "handoff_assignment.json",
            data_dir / "handoff_pool.json", "--out", tmp_path / "o")
        assert json.loads((tmp_path / "o" / "feasibility.json").read_text())["feasible"] is True
        assert (tmp_path / "o" / "trace.csv").read_text().count("\n") == 4

    def test_malformed_json(self, data_dir, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run("simulate", bad, data_dir / "handoff_assignment.json", data_dir / "handoff_pool.json") == 1
        assert "invalid JSON" in capsys.readouterr().err

    def test_invalid_graph(self, data_dir, tmp_path):
        bad = tmp_path / "cycle.json"
        bad.write_text(json.dumps({"nodes": [{"id": "a", "size": 1, "d": 0}, {"id": "b", "size": 1, "d": 0}],
                                   "edges": [{"from": "a", "to": "b", "d": 0}, {"from": "b", "to": "a", "d": 0}]}))
        assert run("simulate", bad, data_dir / "handoff_assignment.json", data_dir / "handoff_pool.json") == 1


class TestCapacity:
    def test_single_node(self, data_dir, capsys):
        assert run("capacity", data_dir / "single_node.json", "--t", "10", "--e", "1", "--epsilon", "0.1") == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["capacity"] == 20
        assert rep["thresholds"][0]["workers"] == 5

    def test_unbounded(self, data_dir, capsys):
        assert run("capacity", data_dir / "handoff_d0.json", "--t", "1e1") == 0
        assert json.loads(capsys.readouterr().out)["capacity"] == "unbounded"

    @pytest.mark.parametrize("flags", [["--t", "-1"], ["--t", "abc"], ["--t", "5", "--epsilon", "1.5"], []])
    def test_invalid_params(self, data_dir, flags):
        with pytest.raises(SystemExit) as info:
            run("capacity", data_dir / "single_node.json", *flags)
        assert info.value.code == 1


class TestLpp:
    def test_chain(self, data_dir, tmp_path):
        assert run("lpp", data_dir / "lpp_chain.json", "--M", "2", "--tau", "5", "--out", tmp_path) == 0
        nodes = json.loads((tmp_path / "lpp.json").read_text())["nodes"]
        assert [nodes[v]["layer"] for v in "abc"] == [0, 1, 2]
        assert (tmp_path / "lpp.dot").read_text().startswith("digraph")


class TestCoord:
    def test_worked_scenario(self, data_dir, capsys):
        assert run("coord", data_dir / "coord_graph.json", data_dir / "coord_occupations.json") == 0
        lines = capsys.readouterr().out.splitlines()
        header = lines[0].split(",")
        row = dict(zip(header, next(l for l in lines if l.startswith("support")).split(",")))
        assert float(row["ln_expertise"]) == pytest.approx(-0.58779, abs=1e-5)
        assert float(row["ln_expertise_lower"]) <= float(row["ln_expertise"]) <= float(row["ln_expertise_upper"])

    def test_deadline(self, data_dir, capsys):
        assert run("coord", data_dir / "coord_graph.json", data_dir / "coord_occupations.json", "--tau", "2") == 2
        assert "DeadlineExceeded" in capsys.readouterr().out

    def test_missing_file(self, data_dir, tmp_path):
        assert run("coord", data_dir / "coord_graph.json", tmp_path / "nope.json") == 1


class TestAnalyze:
    def test_bundled(self, data_dir, tmp_path, capsys):
        assert run("analyze", data_dir / "synthetic_activities.csv", data_dir / "synthetic_occupations.csv",
                   "--out", tmp_path / "new" / "dir") == 0
        assert (tmp_path / "new" / "dir" / "index.csv").exists()
        assert "hourly wage" in capsys.readouterr().out

    def test_synthetic_flag(self, tmp_path):
        assert run("analyze", "--synthetic", "--seed", "3", "--out", tmp_path) == 0
        assert (tmp_path / "synthetic_occupations.csv").exists()

    def test_missing_inputs(self, tmp_path):
        assert run("analyze", "--out", tmp_path) == 1

    def test_schema_error(self, data_dir, tmp_path):
        assert run("analyze", data_dir / "synthetic_occupations.csv", data_dir / "synthetic_occupations.csv",
                   "--out", tmp_path) == 1


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help_documents_every_flag(sub, capsys):
    with pytest.raises(SystemExit) as info:
        main([sub, "--help"])
    assert info.value.code == 0
    text = capsys.readouterr().out
    parser = build_parser()
    subparser = parser._subparsers._group_actions[0].choices[sub]
    for action in subparser._actions:
        for flag in action.option_strings:
            assert flag in text
        if action.option_strings and action.help is None:
            pytest.fail(f"{sub} {action.option_strings} lacks help text")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "taskgraph_works", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("taskgraph-works")

import io
import json

import pandas as pd
import pytest

from bottleneck_arena.main import cli_main, parse_range


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """Run every command from an empty directory with no environment override."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("BOTTLENECK_ARENA_BUDGET", raising=False)


@pytest.fixture
def cx4_file(tmp_path):
    path = tmp_path / "cx4.json"
    assert cli_main(["generate", "--family", "counterexample", "--k", "4", "-o", str(path)]) == 0
    return str(path)


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_parse_range():
    assert parse_range("3..5") == [3, 4, 5]
    assert parse_range("2,7") == [2, 7]


def test_version():
    assert cli_main(["--version"]) == 0


class TestUsage:
    def test_missing_argument(self):
        assert cli_main(["brd"]) == 2

    def test_backwards_range(self):
        assert cli_main(["sweep", "--k", "5..3"]) == 2

    def test_unknown_model(self):
        assert cli_main(["sweep", "--k", "3", "--models", "cubic"]) == 2

    def test_missing_input_file(self, tmp_path):
        assert cli_main(["optimal", str(tmp_path / "absent.json")]) == 2


class TestValidate:
    def test_valid_instance(self, fixtures_dir, capsys):
        assert cli_main(["validate", str(fixtures_dir / "parallel_2x2.json")]) == 0
        assert _stdout_json(capsys)["payload"] == {"valid": True, "problems": []}

    def test_invalid_instance(self, fixtures_dir, capsys):
        assert cli_main(["validate", str(fixtures_dir / "two_bad_players.json")]) == 1
        assert len(_stdout_json(capsys)["payload"]["problems"]) == 2


class TestCommands:
    def test_generate_is_deterministic(self, capsys):
        argv = ["generate", "--family", "random", "--nodes", "6", "--edges", "9", "--players", "3", "--seed", "8"]
        assert cli_main(argv) == 0
        first = capsys.readouterr().out
        assert cli_main(argv) == 0
        assert capsys.readouterr().out == first

    def test_generate_missing_family_parameter(self, capsys):
        assert cli_main(["generate", "--family", "counterexample"]) == 1
        assert '"code": "precondition"' in capsys.readouterr().err

    def test_optimal(self, cx4_file, capsys):
        assert cli_main(["optimal", cx4_file]) == 0
        payload = _stdout_json(capsys)["payload"]
        assert payload["c_star"] == 1
        assert payload["witness"][0] == [0]

    def test_brd_with_trace_csv(self, cx4_file, tmp_path, capsys):
        csv_path = tmp_path / "trace.csv"
        assert cli_main(["brd", cx4_file, "--csv", str(csv_path)]) == 0
        assert _stdout_json(capsys)["payload"]["steps"] == 1
        frame = pd.read_csv(csv_path)
        assert list(frame.columns) == ["step", "player", "old_path", "new_path", "old_cost", "new_cost", "potential"]
        assert frame.loc[0, "new_path"] == "1 2 3 4"

    def test_brd_output_is_reproducible(self, cx4_file, capsys):
        argv = ["brd", cx4_file, "--schedule", "random", "--seed", "3", "--start", "random:2"]
        assert cli_main(argv) == 0
        first = capsys.readouterr().out
        assert cli_main(argv) == 0
        assert capsys.readouterr().out == first
        assert "timing" not in json.loads(first)

    def test_timing_flag(self, cx4_file, capsys):
        assert cli_main(["optimal", cx4_file, "--timing"]) == 0
        assert _stdout_json(capsys)["timing"] >= 0

    def test_verify(self, fixtures_dir, capsys):
        instance = str(fixtures_dir / "parallel_2x2.json")
        assert cli_main(["verify", instance, str(fixtures_dir / "routing_parallel_stacked.json")]) == 0
        assert not _stdout_json(capsys)["payload"]["nash"]
        assert cli_main(["verify", instance, str(fixtures_dir / "routing_parallel_balanced.json")]) == 0
        assert _stdout_json(capsys)["payload"]["nash"]

    def test_verify_rejects_foreign_path(self, fixtures_dir, capsys):
        instance = str(fixtures_dir / "parallel_2x2.json")
        assert cli_main(["verify", instance, str(fixtures_dir / "routing_outside_strategies.json")]) == 1
        assert '"code": "invalid-routing"' in capsys.readouterr().err

    def test_enumerate(self, cx4_file, capsys):
        assert cli_main(["enumerate", cx4_file, "--profile-cap", "10"]) == 0
        payload = _stdout_json(capsys)["payload"]
        assert payload["nash_count"] == 8
        assert payload["truncated"]

    def test_poa_csv(self, cx4_file, tmp_path, capsys):
        csv_path = tmp_path / "out" / "poa.csv"
        argv = ["poa", cx4_file, "--csv", str(csv_path), "--family", "counterexample", "--k", "4"]
        assert cli_main(argv) == 0
        assert _stdout_json(capsys)["payload"]["poa"] == "3"
        row = pd.read_csv(csv_path).iloc[0]
        assert (row["family"], row["k"], row["model"], row["poa"], row["pos"]) == ("counterexample", 4, "expsum", 3, 2)

    def test_chain(self, cx4_file, capsys):
        assert cli_main(["chain", cx4_file, "--support", "exact"]) == 0
        payload = _stdout_json(capsys)["payload"]
        assert payload["root"] == [0]
        assert payload["expansions"] == [[1, 2]]
        assert payload["depth"] == 2

    def test_classify_csv(self, cx4_file, tmp_path, capsys):
        csv_path = tmp_path / "stages.csv"
        assert cli_main(["classify", cx4_file, "--csv", str(csv_path)]) == 0
        assert _stdout_json(capsys)["payload"]["classification"]["c_hat"] == 3
        assert list(pd.read_csv(csv_path)["stage"]) == [1, 1, 1, 1]

    def test_sweep(self, capsys):
        assert cli_main(["sweep", "--k", "3..5"]) == 0
        frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
        linear = frame[frame["model"] == "linear"]
        expsum = frame[frame["model"] == "expsum"]
        assert list(linear["poa"]) == [3, 4, 5]
        assert list(expsum["poa"]) == [2, 3, 3]

    def test_environment_budget(self, cx4_file, monkeypatch, capsys):
        monkeypatch.setenv("BOTTLENECK_ARENA_BUDGET", "1")
        assert cli_main(["optimal", cx4_file]) == 1
        assert '"code": "search-budget-exceeded"' in capsys.readouterr().err

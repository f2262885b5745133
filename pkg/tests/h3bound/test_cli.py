"""Tests for the command-line entry point."""

import json
import math

import pytest

from h3bound.const import EXIT_DATA, EXIT_FAILURE, EXIT_OK, EXIT_RANGE, EXIT_USAGE
from h3bound.helpers import CarrierConfig, HPoint, exp_map
from workbench.cli import main
from workbench.suites import Failure, VerificationReport


def _write(tmp_path, name, data) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


class TestConstants:
    """Test the constants command."""

    def test_text_output(self, capsys):
        """Test L0 and 2 L0 are printed to six decimals."""
        assert main(["constants", "--n", "2"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "L0      = 2.633916" in out
        assert "2*L0    = 5.267832" in out
        assert "sharp R_2 = 5.267832" in out

    def test_json_output(self, capsys):
        """Test the JSON document carries the report."""
        assert main(["constants", "--format", "json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert round(data["L0"], 6) == 2.633916
        assert data["n"] == 2
        assert len(data["schedule"]["L"]) == 4
        assert data["lbar0"] == pytest.approx(31.163, rel=1e-4)

    def test_csv_output(self, capsys):
        """Test schedule rows followed by R, R_n and the sharp value."""
        assert main(["constants", "--format", "csv"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "k,L,provenance"
        assert [line.split(",")[0] for line in lines[-3:]] == ["R", "R_n", "sharp_R2"]

    def test_overflow_prints_log_domain(self, capsys):
        """Test a rank past double range exits 2 with the log-domain table."""
        assert main(["constants", "--n", "60"]) == EXIT_RANGE
        assert "(log domain)" in capsys.readouterr().out

    def test_svg_is_a_usage_error(self):
        """Test formats a command cannot produce exit 64."""
        assert main(["constants", "--format", "svg"]) == EXIT_USAGE

    def test_out_file(self, tmp_path):
        """Test --out writes the document to a file."""
        target = tmp_path / "constants.json"
        assert main(["constants", "--format", "json", "--out", str(target)]) == EXIT_OK
        assert json.loads(target.read_text(encoding="utf-8"))["n"] == 2


class TestUsage:
    """Test argument errors."""

    def test_unknown_suite(self):
        """Test argparse errors exit with the usage code."""
        with pytest.raises(SystemExit) as exc_info:
            main(["verify", "everything"])
        assert exc_info.value.code == EXIT_USAGE

    def test_missing_command(self):
        """Test a missing subcommand exits with the usage code."""
        with pytest.raises(SystemExit) as exc_info:
            main([])
        assert exc_info.value.code == EXIT_USAGE

    def test_out_of_range_value(self):
        """Test schema failures on arguments exit 64."""
        assert main(["verify", "selection", "--trials", "0"]) == EXIT_USAGE
        assert main(["graphs", "--n", "1"]) == EXIT_USAGE

    def test_missing_input(self):
        """Test commands that need --input exit 64 without it."""
        assert main(["lift"]) == EXIT_USAGE
        assert main(["render"]) == EXIT_USAGE

    def test_malformed_input(self, tmp_path):
        """Test malformed documents exit 65."""
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        assert main(["lift", "--input", str(path)]) == EXIT_DATA
        assert main(["steiner", "--input", _write(tmp_path, "c.json", {"edges": []})]) == EXIT_DATA


class TestCommands:
    """Test the experiment commands."""

    def test_graphs_csv(self, capsys):
        """Test one CSV row per rank 3 graph."""
        assert main(["graphs", "--n", "3", "--format", "csv"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "index,code,edges"
        assert len(lines) == 6

    def test_graphs_text(self, capsys):
        """Test the rank 2 catalog."""
        assert main(["graphs"]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0].startswith("030 ")

    def test_lift(self, tmp_path, capsys, crossing_path):
        """Test joint angles and the failed embedding of a curling path."""
        path = _write(tmp_path, "path.json", crossing_path.to_dict())
        assert main(["lift", "--input", path, "--format", "json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["k"] == 5
        assert all(a == pytest.approx(120.0, abs=1e-6) for a in data["joint_angles_deg"])
        assert data["embedded"] is False
        assert data["closest_pair"] == [0, 4]

    def test_steiner(self, tmp_path, capsys):
        """Test an equilateral star is optimized to 120 degrees."""
        terminals = [
            exp_map(HPoint.origin(), [math.cos(a), math.sin(a), 0.0], 2.0)
            for a in (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)
        ]
        config = CarrierConfig.star(terminals, HPoint.from_ball([0.05, 0.02, 0.0]))
        path = _write(tmp_path, "star.json", config.to_dict())
        assert main(["steiner", "--input", path, "--format", "json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["length"] == pytest.approx(6.0, rel=1e-8)
        assert data["y_report"]["max_deviation_deg"] < 0.5

    def test_shortcut_table(self, capsys):
        """Test the lbar table has one row per delta step."""
        assert main(["shortcut", "--format", "json"]) == EXIT_OK
        rows = json.loads(capsys.readouterr().out)["rows"]
        assert len(rows) == 9
        assert rows[0]["lbar"] == pytest.approx(31.163, rel=1e-4)
        for row in rows:
            assert row["L2"] == pytest.approx(row["L2_closed_form"], abs=1e-6)

    def test_shortcut_certificate(self, tmp_path, capsys):
        """Test a certificate for two long segments toward the basepoint."""
        eps = 1e-8
        document = {
            "A": {"start": {"ball": [0, 0, 0]}, "direction": [-1, 0, 0], "length": 35},
            "B": {
                "start": {"ball": [0, 0, 0]},
                "direction": [-math.cos(eps), math.sin(eps), 0],
                "length": 35,
            },
        }
        path = _write(tmp_path, "pair.json", document)
        assert main(["shortcut", "--input", path, "--format", "json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["verified"] is True
        assert data["gain"] > data["Delta"]

    def test_shortcut_hypothesis_failure(self, tmp_path):
        """Test segments below lbar exit 65."""
        document = {
            "A": {"start": {"ball": [0, 0, 0]}, "direction": [-1, 0, 0], "length": 5},
            "B": {"start": {"ball": [0, 0, 0]}, "direction": [-1, 0, 0], "length": 5},
        }
        assert main(["shortcut", "--input", _write(tmp_path, "short.json", document)]) == EXIT_DATA

    def test_render_empty(self, tmp_path, capsys):
        """Test an empty figure has only the disc and horoball."""
        assert main(["render", "--input", _write(tmp_path, "empty.json", {})]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("<circle") == 2
        assert out.endswith("</svg>\n")


class TestVerify:
    """Test the verify command."""

    def test_seeded_runs_are_identical(self, capsys):
        """Test equal seeds give byte-identical JSON."""
        argv = ["verify", "selection", "--trials", "30", "--seed", "3", "--format", "json"]
        assert main(argv) == EXIT_OK
        first = capsys.readouterr().out
        assert main(argv) == EXIT_OK
        assert capsys.readouterr().out == first
        assert json.loads(first)["passed"] is True

    def test_replay(self, tmp_path, capsys):
        """Test replaying a report whose counterexample still fails exits 1."""
        stored = VerificationReport(
            suite="selection",
            seed=0,
            trials=1,
            failure_count=1,
            failures=[Failure(0, "recorded", {"x": [20.0, 10.0], "y": [10.0]})],
        )
        path = _write(tmp_path, "report.json", stored.to_dict())
        assert main(["verify", "selection", "--replay", path]) == EXIT_FAILURE
        assert "FAIL" in capsys.readouterr().out

    def test_replay_of_other_suite(self, tmp_path):
        """Test a report of another suite exits 65."""
        stored = VerificationReport(suite="metric", seed=0, trials=1)
        path = _write(tmp_path, "report.json", stored.to_dict())
        assert main(["verify", "selection", "--replay", path]) == EXIT_DATA

"""Tests for the flatcensus command line"""

import csv
import io
import json
import logging
import os
from unittest.mock import patch

import pytest

from flatcensus import __version__
from flatcensus.cli import EXIT_INVALID, EXIT_OK, EXIT_RESOURCE, main

from samples import DATA_DIR

TORUS_KEY = "V:0,1|E:0-0:1"


@pytest.fixture(autouse=True)
def isolated_run():
    """No FLATCENSUS_* variables, and root logging restored after each command"""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    with patch.dict(os.environ):
        for key in [k for k in os.environ if k.startswith("FLATCENSUS_")]:
            del os.environ[key]
        yield
    root.handlers[:] = handlers
    root.setLevel(level)


def csv_rows(text: str) -> list[list[str]]:
    return list(csv.reader(io.StringIO(text)))


class TestParser:
    """Test argument handling"""

    def test_version(self, capsys):
        assert main(["--version"]) == EXIT_OK
        assert __version__ in capsys.readouterr().out

    def test_missing_argument(self, capsys):
        assert main(["census", "--n", "1", "--max-area", "1"]) == EXIT_INVALID
        assert "--g" in capsys.readouterr().err

    def test_unknown_command(self):
        assert main(["plot"]) == EXIT_INVALID

    def test_invalid_log_level(self, capsys):
        assert main(["--log-level", "loud", "predict", "--g", "2", "--n", "0"]) == EXIT_INVALID
        assert "Invalid log level" in capsys.readouterr().err


class TestCensusCommand:
    """Test the census subcommand"""

    def test_torus_csv(self, capsys):
        assert main(["census", "--g", "1", "--n", "1", "--max-area", "1"]) == EXIT_OK
        rows = csv_rows(capsys.readouterr().out)
        assert rows == [
            ["area", "h_type", "v_type", "count_num", "count_den"],
            ["1", TORUS_KEY, TORUS_KEY, "1", "2"],
        ]

    def test_json_output_and_manifest(self, tmp_path):
        output = tmp_path / "census.json"
        manifest = tmp_path / "manifest.json"
        code = main([
            "census", "--g", "0", "--n", "4", "--max-area", "2", "--mode", "naive",
            "--format", "json", "--output", str(output), "--manifest", str(manifest),
        ])
        assert code == EXIT_OK
        data = json.loads(output.read_text(encoding="utf-8"))
        assert data["complete_area"] == 2
        assert [row["count_den"] for row in data["counts"]] == [4]
        written = json.loads(manifest.read_text(encoding="utf-8"))
        assert written["mode"] == "naive"
        assert written["totals"] == {"2": {"count_num": 1, "count_den": 4}}
        assert len(written["shards"]) == 1 + 3

    def test_filters_and_checkpoints(self, tmp_path, capsys):
        checkpoints = tmp_path / "ckpt"
        args = [
            "census", "--g", "1", "--n", "1", "--max-area", "2",
            "--single-cylinder", "--unit-height", "--h-type", TORUS_KEY,
            "--checkpoint-dir", str(checkpoints),
        ]
        assert main(args) == EXIT_OK
        first = capsys.readouterr().out
        assert any(checkpoints.iterdir())
        assert main(args) == EXIT_OK
        assert capsys.readouterr().out == first
        assert all(row[1] == TORUS_KEY for row in csv_rows(first)[1:])

    def test_resource_limit(self, capsys):
        code = main(["census", "--g", "1", "--n", "1", "--max-area", "2", "--mode", "naive", "--max-tables", "3"])
        assert code == EXIT_RESOURCE
        assert "examined 4 tables (limit 3)" in capsys.readouterr().err

    def test_resource_limit_with_workers(self, capsys):
        code = main([
            "census", "--g", "1", "--n", "1", "--max-area", "2", "--mode", "naive",
            "--workers", "2", "--max-tables", "2",
        ])
        assert code == EXIT_RESOURCE
        assert "(limit 2)" in capsys.readouterr().err

    def test_not_hyperbolic(self, capsys):
        assert main(["census", "--g", "1", "--n", "0", "--max-area", "1"]) == EXIT_INVALID
        assert "not hyperbolic" in capsys.readouterr().err

    def test_invalid_mode(self, capsys):
        assert main(["census", "--g", "1", "--n", "1", "--max-area", "1", "--mode", "fast"]) == EXIT_INVALID
        assert "Invalid census mode" in capsys.readouterr().err

    def test_environment_workers_must_be_valid(self, capsys):
        with patch.dict(os.environ, {"FLATCENSUS_WORKERS": "none"}):
            assert main(["census", "--g", "1", "--n", "1", "--max-area", "1"]) == EXIT_INVALID
        assert "Invalid worker count" in capsys.readouterr().err


class TestClassifyCommand:
    """Test the classify subcommand"""

    def test_torus(self, capsys):
        assert main(["classify", str(DATA_DIR / "t1.json")]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["genus"] == 1
        assert report["stratum"] == [0]
        assert report["h_type"] == TORUS_KEY
        assert report["v_type"] == TORUS_KEY
        assert report["aut_order"] == 2
        assert report["cylinders"]["horizontal"] == [{"circumference": 1, "height": 1, "core": [0]}]

    def test_pillowcase(self, capsys):
        assert main(["classify", str(DATA_DIR / "p2.json")]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["genus"] == 0
        assert sorted(report["cone_angles"].values()) == [2, 2, 2, 2]
        assert report["h_type"] == "V:0,2;0,2|E:0-1:1"

    def test_output_file(self, tmp_path):
        output = tmp_path / "report.json"
        assert main(["classify", str(DATA_DIR / "g4.json"), "--output", str(output)]) == EXIT_OK
        assert json.loads(output.read_text(encoding="utf-8"))["h_type"] == "V:1,0|E:0-0:1"

    def test_missing_file(self, tmp_path, capsys):
        assert main(["classify", str(tmp_path / "absent.json")]) == EXIT_INVALID
        assert "Cannot read" in capsys.readouterr().err

    def test_invalid_table(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n_squares": 1, "h_pairs": [[0, 1]], "v_pairs": [[0, 1]], "marked": []}))
        assert main(["classify", str(path)]) == EXIT_INVALID
        assert "not hyperbolic" in capsys.readouterr().err


class TestPredictCommand:
    """Test the predict subcommand"""

    def test_named_prediction(self, capsys):
        assert main(["predict", "--g", "2", "--n", "0", "ratio-sep-nonsep"]) == EXIT_OK
        rows = csv_rows(capsys.readouterr().out)
        assert rows[0] == ["name", "rational_num", "rational_den", "pi_power", "b_power", "provenance", "value"]
        assert rows[1] == ["ratio-sep-nonsep", "1", "48", "0", "0", "exact", "0.0208333333333333"]

    def test_symbolic_prediction_has_no_value(self, capsys):
        assert main(["predict", "--g", "1", "--n", "1", "mgn"]) == EXIT_OK
        rows = csv_rows(capsys.readouterr().out)
        assert rows[1] == ["mgn", "1", "1", "0", "1", "symbolic-in-b", ""]

    def test_json(self, capsys):
        assert main(["predict", "--g", "0", "--n", "5", "--format", "json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        names = {entry["name"] for entry in data}
        assert {"freq-split-2", "freq-split-3", "epsilon", "r", "nu", "mgn"} <= names

    def test_unknown_name(self, capsys):
        assert main(["predict", "--g", "2", "--n", "0", "golden-ratio"]) == EXIT_INVALID
        assert "Unknown predictions" in capsys.readouterr().err

    def test_not_hyperbolic(self, capsys):
        assert main(["predict", "--g", "0", "--n", "2"]) == EXIT_INVALID
        assert "not hyperbolic" in capsys.readouterr().err


class TestCompareCommand:
    """Test the compare subcommand"""

    def test_torus_census(self, tmp_path, capsys):
        census_csv = tmp_path / "census.csv"
        assert main(["census", "--g", "1", "--n", "1", "--max-area", "1", "--output", str(census_csv)]) == EXIT_OK
        assert main(["compare", "--g", "1", "--n", "1", "--census", str(census_csv)]) == EXIT_OK
        rows = csv_rows(capsys.readouterr().out)
        assert rows == [
            ["L", "name", "empirical_num", "empirical_den", "predicted", "ratio"],
            ["1", "mgn", "1", "2", "b_gn", ""],
        ]

    def test_complete_area_limits_rows(self, tmp_path, capsys):
        census_csv = tmp_path / "census.csv"
        assert main(["census", "--g", "1", "--n", "1", "--max-area", "2", "--output", str(census_csv)]) == EXIT_OK
        code = main(["compare", "--g", "1", "--n", "1", "--census", str(census_csv), "--complete-area", "1"])
        assert code == EXIT_OK
        assert len(csv_rows(capsys.readouterr().out)) == 2

    def test_header_only_census(self, tmp_path, capsys):
        census_csv = tmp_path / "census.csv"
        census_csv.write_text("area,h_type,v_type,count_num,count_den\n", encoding="utf-8")
        assert main(["compare", "--g", "2", "--n", "0", "--census", str(census_csv)]) == EXIT_OK
        assert csv_rows(capsys.readouterr().out) == [
            ["L", "name", "empirical_num", "empirical_den", "predicted", "ratio"],
        ]

    def test_malformed_census(self, tmp_path, capsys):
        census_csv = tmp_path / "census.csv"
        census_csv.write_text("area\n1\n", encoding="utf-8")
        assert main(["compare", "--g", "1", "--n", "1", "--census", str(census_csv)]) == EXIT_INVALID
        assert "Malformed census CSV" in capsys.readouterr().err


class TestDtCountCommand:
    """Test the dt-count subcommand"""

    def test_four_punctured_sphere(self, capsys):
        code = main(["dt-count", "--pants", str(DATA_DIR / "s04.json"), "--L", "10", "--L", "2"])
        assert code == EXIT_OK
        rows = csv_rows(capsys.readouterr().out)
        assert rows == [
            ["L", "count", "ratio", "limit"],
            ["10", "30", "0.3", "1/4"],
            ["2", "2", "0.5", "1/4"],
        ]

    def test_zero_length(self, capsys):
        assert main(["dt-count", "--pants", str(DATA_DIR / "s11.json"), "--L", "0"]) == EXIT_OK
        assert csv_rows(capsys.readouterr().out)[1] == ["0", "0", "", "1/2"]

    def test_negative_length(self, capsys):
        assert main(["dt-count", "--pants", str(DATA_DIR / "s20.json"), "--L", "-1"]) == EXIT_INVALID
        assert "non-negative" in capsys.readouterr().err

    def test_inconsistent_pants(self, tmp_path, capsys):
        path = tmp_path / "pants.json"
        path.write_text(json.dumps({"g": 1, "n": 1, "regions": [[0, 1, -1]]}), encoding="utf-8")
        assert main(["dt-count", "--pants", str(path), "--L", "3"]) == EXIT_INVALID
        assert "Curve 0 appears in 1 slots" in capsys.readouterr().err


class TestPackageExports:
    """Test the names the package exposes"""

    def test_census_subpackage_is_not_shadowed(self):
        import types

        import flatcensus
        import flatcensus.census.storage

        assert isinstance(flatcensus.census, types.ModuleType)
        assert flatcensus.census.storage.CheckpointStore is not None
        assert callable(flatcensus.run_census)
        assert "run_census" in flatcensus.__all__

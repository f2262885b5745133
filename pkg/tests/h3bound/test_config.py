"""Tests for the run configuration and input schemas."""

import argparse
import json

import pytest
import voluptuous as vol

from h3bound.const import DEFAULT_DELTA, DEFAULT_THREADS, ENV_THREADS
from h3bound.errors import DataError
from workbench.config import (
    RunConfig,
    create_carrier_schema,
    create_render_schema,
    create_shortcut_schema,
    load_json,
    worker_count,
)


class TestRunConfig:
    """Test RunConfig validation."""

    def test_defaults(self):
        """Test the defaults of a bare command."""
        config = RunConfig.default("constants")
        assert config.seed == 0
        assert config.trials is None
        assert config.delta == DEFAULT_DELTA
        assert config.n == 2
        assert config.format == "text"
        assert config.plane == "xy"
        assert config.verbose is False

    def test_round_trip(self):
        """Test to_dict feeds back into from_dict."""
        config = RunConfig.from_dict({"command": "verify", "suite": "selection", "seed": 7})
        assert RunConfig.from_dict(config.to_dict()) == config

    def test_unknown_key(self):
        """Test unknown keys are rejected."""
        with pytest.raises(vol.Invalid):
            RunConfig.from_dict({"command": "graphs", "colour": "red"})

    @pytest.mark.parametrize(
        "override",
        [
            {"command": "launch"},
            {"seed": -1},
            {"seed": "5"},
            {"trials": 0},
            {"delta": 0.0},
            {"tol": -1e-9},
            {"n": 1},
            {"format": "xml"},
            {"suite": "everything"},
            {"plane": "xw"},
        ],
    )
    def test_out_of_range(self, override):
        """Test each out-of-range value is rejected."""
        with pytest.raises(vol.Invalid):
            RunConfig.from_dict({"command": "verify", **override})

    def test_from_args_skips_unset_and_foreign_keys(self):
        """Test None values fall back to defaults and unrelated attributes are dropped."""
        args = argparse.Namespace(
            command="verify", suite="window", seed=3, trials=None, verbose=None, handler=print
        )
        config = RunConfig.from_args(args)
        assert config.suite == "window"
        assert config.seed == 3
        assert config.trials is None
        assert config.verbose is False


class TestSchemas:
    """Test input document schemas."""

    def test_carrier_defaults(self):
        """Test pinned defaults to an empty list."""
        data = create_carrier_schema()(
            {"edges": [[0, 1]], "positions": [{"ball": [0, 0, 0]}, {"lift": [1, 0, 0, 0]}]}
        )
        assert data["pinned"] == []
        assert data["positions"][0]["ball"] == [0.0, 0.0, 0.0]

    def test_carrier_rejects_bad_edges(self):
        """Test an edge must have two endpoints."""
        with pytest.raises(vol.Invalid):
            create_carrier_schema()({"edges": [[0, 1, 2]], "positions": []})

    def test_render_accepts_empty_figure(self):
        """Test a figure without parts is valid."""
        assert create_render_schema()({}) == {}

    def test_render_rejects_non_positive_lengths(self):
        """Test bare paths need positive lengths."""
        anchor = {"position": {"ball": [0, 0, 0]}, "heading": [1, 0, 0], "normal": [0, 1, 0]}
        with pytest.raises(vol.Invalid):
            create_render_schema()({"lengths": [0.0], "anchor": anchor})

    def test_shortcut_defaults_delta(self):
        """Test delta defaults to zero and both segment forms are accepted."""
        data = create_shortcut_schema()(
            {
                "A": {"start": {"ball": [0, 0, 0]}, "end": {"ball": [-0.5, 0, 0]}},
                "B": {"start": {"ball": [0, 0, 0]}, "direction": [-1, 0, 0], "length": 40},
            }
        )
        assert data["delta"] == 0.0
        assert data["B"]["length"] == 40.0


class TestLoadJson:
    """Test reading JSON inputs."""

    def test_missing_file(self, tmp_path):
        """Test an unreadable file raises DataError."""
        with pytest.raises(DataError):
            load_json(tmp_path / "missing.json", create_render_schema())

    def test_invalid_json(self, tmp_path):
        """Test malformed JSON raises DataError."""
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(DataError):
            load_json(path, create_render_schema())

    def test_schema_failure(self, tmp_path):
        """Test schema violations raise DataError."""
        path = tmp_path / "carrier.json"
        path.write_text(json.dumps({"positions": []}), encoding="utf-8")
        with pytest.raises(DataError):
            load_json(path, create_carrier_schema())

    def test_valid_document(self, tmp_path):
        """Test a valid document is returned validated."""
        path = tmp_path / "carrier.json"
        path.write_text(
            json.dumps({"edges": [[0, 1]], "positions": [{"ball": [0, 0, 0]}] * 2}),
            encoding="utf-8",
        )
        assert load_json(str(path), create_carrier_schema())["pinned"] == []


class TestWorkerCount:
    """Test the worker cap."""

    def test_default(self, monkeypatch):
        """Test the default without a cap."""
        monkeypatch.delenv(ENV_THREADS, raising=False)
        assert worker_count() == DEFAULT_THREADS
        assert worker_count(8) == 8

    def test_environment_cap(self, monkeypatch):
        """Test the environment variable caps the count."""
        monkeypatch.setenv(ENV_THREADS, "2")
        assert worker_count(8) == 2
        monkeypatch.setenv(ENV_THREADS, "0")
        assert worker_count(8) == 1

    def test_bad_environment_value(self, monkeypatch, caplog):
        """Test a non-integer cap is ignored with a warning."""
        monkeypatch.setenv(ENV_THREADS, "many")
        assert worker_count(3) == 3
        assert "Ignoring non-integer" in caplog.text

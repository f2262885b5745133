"""Run configuration and input schemas for the h3bound command line."""

from __future__ import annotations

import argparse
import json
import logging
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import voluptuous as vol

from h3bound.const import (
    COMMANDS,
    CONF_COMMAND,
    CONF_DELTA,
    CONF_FORMAT,
    CONF_INPUT,
    CONF_N,
    CONF_OUT,
    CONF_PLANE,
    CONF_REPLAY,
    CONF_SEED,
    CONF_SUITE,
    CONF_TOL,
    CONF_TRIALS,
    CONF_VERBOSE,
    DEFAULT_DELTA,
    DEFAULT_FORMAT,
    DEFAULT_N,
    DEFAULT_OPTIMIZE_TOL,
    DEFAULT_PLANE,
    DEFAULT_SEED,
    DEFAULT_THREADS,
    ENV_THREADS,
    FORMATS,
    SUITES,
    SVG_PLANES,
)
from h3bound.errors import DataError

_LOGGER = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1


# -------------------------------------------------------------------------
# Schemas
# -------------------------------------------------------------------------


def _floats(count: int) -> vol.All:
    return vol.All([vol.Coerce(float)], vol.Length(min=count, max=count))


def create_run_schema(defaults: dict[str, Any] | None = None) -> vol.Schema:
    """Create the run configuration schema with optional defaults."""
    defaults = defaults or {}

    return vol.Schema(
        {
            vol.Required(CONF_COMMAND): vol.In(COMMANDS),
            vol.Optional(
                CONF_SEED, default=defaults.get(CONF_SEED, DEFAULT_SEED)
            ): vol.All(int, vol.Range(min=0, max=MAX_SEED)),
            vol.Optional(CONF_TRIALS, default=defaults.get(CONF_TRIALS)): vol.Any(
                None, vol.All(int, vol.Range(min=1))
            ),
            vol.Optional(
                CONF_DELTA, default=defaults.get(CONF_DELTA, DEFAULT_DELTA)
            ): vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False)),
            vol.Optional(
                CONF_TOL, default=defaults.get(CONF_TOL, DEFAULT_OPTIMIZE_TOL)
            ): vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False)),
            vol.Optional(CONF_N, default=defaults.get(CONF_N, DEFAULT_N)): vol.All(
                int, vol.Range(min=2)
            ),
            vol.Optional(
                CONF_FORMAT, default=defaults.get(CONF_FORMAT, DEFAULT_FORMAT)
            ): vol.In(FORMATS),
            vol.Optional(CONF_OUT, default=defaults.get(CONF_OUT)): vol.Any(None, str),
            vol.Optional(CONF_REPLAY, default=defaults.get(CONF_REPLAY)): vol.Any(None, str),
            vol.Optional(CONF_SUITE, default=defaults.get(CONF_SUITE)): vol.Any(
                None, vol.In(SUITES)
            ),
            vol.Optional(CONF_INPUT, default=defaults.get(CONF_INPUT)): vol.Any(None, str),
            vol.Optional(
                CONF_PLANE, default=defaults.get(CONF_PLANE, DEFAULT_PLANE)
            ): vol.In(SVG_PLANES),
            vol.Optional(
                CONF_VERBOSE, default=defaults.get(CONF_VERBOSE, False)
            ): bool,
        }
    )


def create_point_schema() -> vol.Any:
    """Point given by ball coordinates or by its hyperboloid lift."""
    return vol.Any(
        vol.Schema({vol.Required("ball"): _floats(3)}),
        vol.Schema({vol.Required("lift"): _floats(4)}),
    )


def create_frame_schema() -> vol.Schema:
    """Frame given by a position and two ball directions."""
    return vol.Schema(
        {
            vol.Required("position"): create_point_schema(),
            vol.Required("heading"): _floats(3),
            vol.Required("normal"): _floats(3),
        }
    )


def create_path_schema() -> vol.Schema:
    """Serialized Geodesic120Path; realized vertices are recomputed on load."""
    return vol.Schema(
        {
            vol.Required("lengths"): [vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False))],
            vol.Optional("dihedrals", default=[]): [vol.Coerce(float)],
            vol.Required("anchor"): create_frame_schema(),
            vol.Optional("anchor_index", default=0): vol.All(int, vol.Range(min=0)),
            vol.Optional("vertices"): [vol.Any(None, create_point_schema())],
        }
    )


def create_segment_schema() -> vol.Schema:
    """Serialized GeodesicSegment: start with a direction and length, or start and end."""
    return vol.Schema(
        vol.Any(
            {
                vol.Required("start"): create_point_schema(),
                vol.Required("direction"): _floats(3),
                vol.Required("length"): vol.All(vol.Coerce(float), vol.Range(min=0.0)),
                vol.Optional("end"): create_point_schema(),
            },
            {
                vol.Required("start"): create_point_schema(),
                vol.Required("end"): create_point_schema(),
            },
        )
    )


def create_shortcut_schema() -> vol.Schema:
    """Two long segments leaving the delta-ball about the origin."""
    return vol.Schema(
        {
            vol.Optional(CONF_DELTA, default=0.0): vol.All(vol.Coerce(float), vol.Range(min=0.0)),
            vol.Required("A"): create_segment_schema(),
            vol.Required("B"): create_segment_schema(),
        }
    )


def create_certificate_schema() -> vol.Schema:
    """Serialized ShortCutCertificate."""
    point = create_point_schema()
    return vol.Schema(
        {
            vol.Required("e1"): point,
            vol.Required("e2"): point,
            vol.Required("e"): point,
            vol.Required("f"): point,
            vol.Required("d_e_e1"): vol.Coerce(float),
            vol.Required("d_f_e2"): vol.Coerce(float),
            vol.Required("d_e_f"): vol.Coerce(float),
            vol.Optional("gain"): vol.Coerce(float),
            vol.Required("delta"): vol.Coerce(float),
            vol.Required("Delta"): vol.Coerce(float),
            vol.Required("lbar"): vol.Coerce(float),
            vol.Optional("edges"): vol.Any(None, [int]),
        }
    )


def create_witness_schema() -> vol.Schema:
    """Serialized EscapeWitness."""
    return vol.Schema(
        {
            vol.Required("edge_index"): vol.All(int, vol.Range(min=0)),
            vol.Required("t"): vol.Coerce(float),
            vol.Required("point"): create_point_schema(),
            vol.Required("margin"): vol.Coerce(float),
        }
    )


def create_carrier_schema() -> vol.Schema:
    """Steiner instance: edges, vertex positions and pinned vertices."""
    return vol.Schema(
        {
            vol.Required("edges"): [vol.All([int], vol.Length(min=2, max=2))],
            vol.Required("positions"): [create_point_schema()],
            vol.Optional("pinned", default=[]): [int],
        }
    )


def create_render_schema() -> vol.Schema:
    """Render input: a bare path, or a figure of an optional path with certificate marks."""
    return vol.Schema(
        vol.Any(
            create_path_schema(),
            vol.Schema(
                {
                    vol.Optional("path"): vol.Any(None, create_path_schema()),
                    vol.Optional("certificate"): vol.Any(None, create_certificate_schema()),
                    vol.Optional("witness"): vol.Any(None, create_witness_schema()),
                }
            ),
        )
    )


def load_json(path: str | Path, schema: vol.Schema) -> Any:
    """Read a JSON document and validate it.

    Raises:
        DataError: the file is unreadable, not JSON, or fails the schema
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise DataError(f"cannot read {path}: {err}") from err
    try:
        return schema(data)
    except vol.Invalid as err:
        raise DataError(f"{path}: {err}") from err


# -------------------------------------------------------------------------
# RunConfig
# -------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Everything one command invocation depends on."""

    command: str
    seed: int = DEFAULT_SEED
    trials: int | None = None
    delta: float = DEFAULT_DELTA
    tol: float = DEFAULT_OPTIMIZE_TOL
    n: int = DEFAULT_N
    format: str = DEFAULT_FORMAT
    out: str | None = None
    replay: str | None = None
    suite: str | None = None
    input: str | None = None
    plane: str = DEFAULT_PLANE
    verbose: bool = False

    @classmethod
    def default(cls, command: str) -> RunConfig:
        """Return defaults for a command."""
        return cls.from_dict({CONF_COMMAND: command})

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        """Validate a mapping; unknown keys are rejected.

        Raises:
            voluptuous.Invalid: a key is unknown or a value is out of range
        """
        return cls(**create_run_schema()(data))

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        """Build a config from parsed command-line arguments."""
        data = {
            key: value
            for key, value in vars(args).items()
            if value is not None and key in cls.__dataclass_fields__
        }
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return asdict(self)


def worker_count(requested: int | None = None) -> int:
    """Number of verification workers, capped by H3BOUND_THREADS."""
    count = requested or DEFAULT_THREADS
    cap = os.environ.get(ENV_THREADS)
    if cap:
        try:
            count = min(count, max(1, int(cap)))
        except ValueError:
            _LOGGER.warning("Ignoring non-integer %s=%r", ENV_THREADS, cap)
    return count

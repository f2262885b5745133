"""Command-line entry point: constants, catalogs, experiments, suites and figures."""

from __future__ import annotations

import argparse
import asyncio
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, NoReturn

import numpy as np
import voluptuous as vol

from h3bound.const import (
    COMMAND_CONSTANTS,
    COMMAND_GRAPHS,
    COMMAND_LIFT,
    COMMAND_RENDER,
    COMMAND_SHORTCUT,
    COMMAND_STEINER,
    COMMAND_VERIFY,
    DOMAIN,
    EXIT_DATA,
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_RANGE,
    EXIT_USAGE,
    FORMAT_CSV,
    FORMAT_JSON,
    FORMAT_SVG,
    FORMATS,
    SUITES,
    SVG_PLANES,
)
from h3bound.errors import (
    CertificateError,
    ConvergenceError,
    DataError,
    GeometryError,
    GraphError,
    H3BoundError,
    HyperbolicRangeError,
    HypothesisError,
    ScheduleOverflowError,
    ZeroLengthEdgeError,
)
from h3bound.helpers import (
    BoundReport,
    CarrierConfig,
    Geodesic120Path,
    GeodesicSegment,
    canonical_code,
    catalog_lines,
    enumerate_n_graphs,
    escapes_horoball,
    is_embedded,
    l0,
    lbar,
    lbar_closed_form,
    optimize,
    r_n,
    short_cut,
    short_cut_length,
    stationarity_residual,
    total_length,
    y_report,
)

from .config import (
    RunConfig,
    create_carrier_schema,
    create_path_schema,
    create_render_schema,
    create_shortcut_schema,
    load_json,
)
from .render import render_document
from .suites import VerificationReport, replay, run_suite

_LOGGER = logging.getLogger(__name__)

LBAR_TABLE_DELTAS = tuple(0.25 * i for i in range(9))


class UsageError(Exception):
    """The command line was well formed but cannot be served."""


class _ArgumentParser(argparse.ArgumentParser):
    """Exits with the usage code instead of argparse's 2, which is reserved for range errors."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subcommand per command."""
    common = _ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="Rank of the carrier graphs")
    common.add_argument("--delta", type=float, default=None, help="Thin-triangles constant Delta")
    common.add_argument("--seed", type=int, default=None, help="Seed of every stochastic choice")
    common.add_argument("--trials", type=int, default=None, help="Verification trial count")
    common.add_argument("--tol", type=float, default=None, help="Optimizer tolerance")
    common.add_argument("--format", choices=FORMATS, default=None, help="Output format")
    common.add_argument("--out", default=None, help="Write output here instead of stdout")
    common.add_argument("--input", default=None, help="JSON input document")
    common.add_argument("--verbose", action="store_true", default=None, help="Debug logging")

    parser = _ArgumentParser(prog=DOMAIN, description="Injectivity-radius bound workbench")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    commands.add_parser(COMMAND_CONSTANTS, parents=[common], help="L0, the L(k) schedule and R_n")
    commands.add_parser(COMMAND_GRAPHS, parents=[common], help="Catalog of n-graphs")
    commands.add_parser(COMMAND_STEINER, parents=[common], help="Optimize a carrier configuration")
    commands.add_parser(COMMAND_LIFT, parents=[common], help="Analyze a geodesic-120 path")
    commands.add_parser(COMMAND_SHORTCUT, parents=[common], help="Short-cut certificate or lbar table")
    verify = commands.add_parser(COMMAND_VERIFY, parents=[common], help="Run a verification suite")
    verify.add_argument("suite", choices=SUITES)
    verify.add_argument("--replay", default=None, help="Re-check the counterexamples of a JSON report")
    render = commands.add_parser(COMMAND_RENDER, parents=[common], help="SVG of a path or certificate")
    render.add_argument("--plane", choices=SVG_PLANES, default=None, help="Projection plane")
    return parser


# -------------------------------------------------------------------------
# Output helpers
# -------------------------------------------------------------------------


def _dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _csv(rows: list[dict[str, Any]], fields: list[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def _emit(config: RunConfig, text: str) -> None:
    """Write to --out when given, otherwise to stdout."""
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
        _LOGGER.info("Wrote %s", config.out)
    else:
        sys.stdout.write(text)


def _require_input(config: RunConfig) -> str:
    if not config.input:
        raise UsageError(f"{config.command} needs --input")
    return config.input


def _reject_format(config: RunConfig, *formats: str) -> None:
    if config.format in formats:
        raise UsageError(f"{config.command} has no {config.format} output")


def _number(value: float, log_value: float | None = None) -> str:
    if math.isfinite(value):
        return f"{value:.6f}"
    return f"exp({log_value:.6f})" if log_value is not None else "inf"


# -------------------------------------------------------------------------
# Commands
# -------------------------------------------------------------------------


def _constants_text(report: BoundReport) -> str:
    base = l0()
    lines = [
        f"L0      = {base:.6f}",
        f"2*L0    = {2.0 * base:.6f}",
        f"Delta   = {report.schedule.big_delta:.6f}",
        f"lbar(0) = {lbar(0.0, report.schedule.big_delta):.6f}",
        "",
        f"{'k':>3}  {'L(k)':>24}  provenance",
    ]
    for entry in report.schedule.entries:
        lines.append(f"{entry.k:>3}  {_number(entry.value, entry.log_value):>24}  {entry.provenance}")
    lines.append("")
    if report.log_domain:
        lines.append(f"R_{report.n}     = exp({report.log_R_n:.6f})  (log domain)")
        lines.append(f"R       = exp({report.log_R:.6f})")
    else:
        lines.append(f"R_{report.n}     = {report.R_n:.6f}")
        lines.append(f"R       = {report.R:.6f}")
    if report.sharp_R2 is not None:
        lines.append(f"sharp R_2 = {report.sharp_R2:.6f}")
    return "\n".join(lines) + "\n"


def _constants_rows(report: BoundReport) -> list[dict[str, Any]]:
    rows = report.schedule.to_rows()
    rows.append({"k": "R", "L": _number(report.R, report.log_R), "provenance": "[3(n-1)]^2 L(3(n-1))"})
    rows.append({"k": "R_n", "L": _number(report.R_n, report.log_R_n), "provenance": "max(R, (3n-3) L(3n-4))"})
    if report.sharp_R2 is not None:
        rows.append({"k": "sharp_R2", "L": f"{report.sharp_R2:.12g}", "provenance": "2*L0"})
    return rows


def cmd_constants(config: RunConfig) -> int:
    """Print L0, the schedule and R_n; a log-domain table and exit 2 on overflow."""
    _reject_format(config, FORMAT_SVG)
    code = EXIT_OK
    try:
        report = r_n(config.n, config.delta)
    except ScheduleOverflowError as err:
        _LOGGER.error("%s; printing the log-domain table", err)
        report = err.report
        code = EXIT_RANGE

    if config.format == FORMAT_JSON:
        text = _dumps({"L0": l0(), "2L0": 2.0 * l0(), "lbar0": lbar(0.0, config.delta), **report.to_dict()})
    elif config.format == FORMAT_CSV:
        text = _csv(_constants_rows(report), ["k", "L", "provenance"])
    else:
        text = _constants_text(report)
    _emit(config, text)
    return code


def cmd_graphs(config: RunConfig) -> int:
    """Catalog the isomorphism classes of n-graphs."""
    _reject_format(config, FORMAT_SVG)
    graphs = enumerate_n_graphs(config.n)
    _LOGGER.info("%d isomorphism classes of %d-graphs", len(graphs), config.n)
    if config.format == FORMAT_JSON:
        text = _dumps(
            {
                "n": config.n,
                "count": len(graphs),
                "graphs": [{"code": canonical_code(g), **g.to_dict()} for g in graphs],
            }
        )
    elif config.format == FORMAT_CSV:
        text = _csv(
            [{"index": i, "code": canonical_code(g), "edges": g.edges} for i, g in enumerate(graphs)],
            ["index", "code", "edges"],
        )
    else:
        text = "\n".join(catalog_lines(graphs)) + "\n"
    _emit(config, text)
    return EXIT_OK


def cmd_steiner(config: RunConfig) -> int:
    """Optimize a carrier configuration and report its incidence angles."""
    _reject_format(config, FORMAT_SVG, FORMAT_CSV)
    carrier = CarrierConfig.from_dict(load_json(_require_input(config), create_carrier_schema()))
    before = total_length(carrier)
    result = optimize(carrier, tol=config.tol)
    data: dict[str, Any] = {
        "config": result.to_dict(),
        "length_before": before,
        "length": total_length(result),
        "residual": stationarity_residual(result),
    }
    angles = None
    try:
        angles = y_report(result)
    except ZeroLengthEdgeError as err:
        _LOGGER.warning("No angle report: %s", err)
    data["y_report"] = angles.to_dict() if angles is not None else None

    if config.format == FORMAT_JSON:
        text = _dumps(data)
    else:
        lines = [f"length {before:.9f} -> {data['length']:.9f}, residual {data['residual']:.3g}"]
        if angles is not None:
            lines.append(
                f"max angle deviation {angles.max_deviation_deg:.6f} deg, "
                f"max coplanarity residual {angles.max_residual:.3g}"
            )
        text = "\n".join(lines) + "\n"
    _emit(config, text)
    return EXIT_OK


def cmd_lift(config: RunConfig) -> int:
    """Joint angles, embeddedness and the first escape of a serialized path."""
    _reject_format(config, FORMAT_SVG, FORMAT_CSV)
    path = Geodesic120Path.from_dict(load_json(_require_input(config), create_path_schema()))
    angles = [math.degrees(path.joint_angle(i)) for i in range(1, path.k)]
    embedding = is_embedded(path)
    escape = escapes_horoball(path)
    data = {
        "k": path.k,
        "joint_angles_deg": angles,
        "embedded": embedding.embedded,
        "closest_pair": list(embedding.pair) if embedding.pair else None,
        "escape": escape.to_dict(),
    }
    if config.format == FORMAT_JSON:
        text = _dumps(data)
    else:
        lines = [
            f"{path.k} edges, joint angles {np.round(angles, 6).tolist()} deg",
            "embedded" if embedding.embedded else f"not embedded: edges {embedding.pair} meet",
            f"escape: {data['escape']}",
        ]
        text = "\n".join(lines) + "\n"
    _emit(config, text)
    return EXIT_OK


def cmd_shortcut(config: RunConfig) -> int:
    """Certificate for a segment pair, or the lbar table when no input is given."""
    _reject_format(config, FORMAT_SVG)
    if not config.input:
        rows = [
            {
                "delta": delta,
                "L2": short_cut_length(delta, config.delta),
                "L2_closed_form": lbar_closed_form(delta, config.delta),
                "lbar": lbar(delta, config.delta),
            }
            for delta in LBAR_TABLE_DELTAS
        ]
        if config.format == FORMAT_JSON:
            text = _dumps({"Delta": config.delta, "rows": rows})
        elif config.format == FORMAT_CSV:
            text = _csv(rows, ["delta", "L2", "L2_closed_form", "lbar"])
        else:
            text = "".join(
                f"delta={r['delta']:.2f}  L2={r['L2']:.6f}  closed form={r['L2_closed_form']:.6f}  lbar={r['lbar']:.6f}\n"
                for r in rows
            )
        _emit(config, text)
        return EXIT_OK

    data = load_json(config.input, create_shortcut_schema())
    seg_a = GeodesicSegment.from_dict(data["A"])
    seg_b = GeodesicSegment.from_dict(data["B"])
    cert = short_cut(seg_a, seg_b, data["delta"], config.delta)
    if config.format == FORMAT_JSON:
        text = _dumps({**cert.to_dict(), "verified": cert.verify()})
    else:
        text = (
            f"d(e,e1)={cert.d_e_e1:.9f} d(f,e2)={cert.d_f_e2:.9f} d(e,f)={cert.d_e_f:.9f} "
            f"gain={cert.gain:.9f} verified={cert.verify()}\n"
        )
    _emit(config, text)
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    """Run or replay a suite; exit 0 iff it passed."""
    _reject_format(config, FORMAT_SVG, FORMAT_CSV)
    if config.replay:
        try:
            stored = VerificationReport.from_dict(
                json.loads(Path(config.replay).read_text(encoding="utf-8"))
            )
        except (OSError, json.JSONDecodeError) as err:
            raise DataError(f"cannot read {config.replay}: {err}") from err
        if stored.suite != config.suite:
            raise DataError(f"{config.replay} is a {stored.suite} report, not {config.suite}")
        report = replay(stored)
    else:
        report = asyncio.run(run_suite(config.suite, config.seed, config.trials))

    if config.format == FORMAT_JSON:
        _emit(config, _dumps(report.to_dict()))
    else:
        lines = [report.summary()]
        lines.extend(f"  trial {f.trial}: {f.reason}" for f in report.failures)
        _emit(config, "\n".join(lines) + "\n")
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_render(config: RunConfig) -> int:
    """Write the SVG figure of a path, certificate or witness."""
    data = load_json(_require_input(config), create_render_schema())
    _emit(config, render_document(data, config.plane))
    return EXIT_OK


COMMAND_HANDLERS: dict[str, Callable[[RunConfig], int]] = {
    COMMAND_CONSTANTS: cmd_constants,
    COMMAND_GRAPHS: cmd_graphs,
    COMMAND_STEINER: cmd_steiner,
    COMMAND_LIFT: cmd_lift,
    COMMAND_SHORTCUT: cmd_shortcut,
    COMMAND_VERIFY: cmd_verify,
    COMMAND_RENDER: cmd_render,
}


# -------------------------------------------------------------------------
# Entry points
# -------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, run one command and map errors to exit codes."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = RunConfig.from_args(args)
    except vol.Invalid as err:
        _LOGGER.error("Invalid arguments: %s", err)
        return EXIT_USAGE

    try:
        return COMMAND_HANDLERS[config.command](config)
    except UsageError as err:
        _LOGGER.error("%s", err)
        return EXIT_USAGE
    except HyperbolicRangeError as err:
        _LOGGER.error("Numeric range exceeded: %s", err)
        return EXIT_RANGE
    except (DataError, GeometryError, GraphError, HypothesisError, vol.Invalid) as err:
        _LOGGER.error("Invalid input: %s", err)
        return EXIT_DATA
    except CertificateError as err:
        _LOGGER.error("Certificate failed: %s", err)
        if err.counterexample is not None:
            sys.stderr.write(_dumps(err.counterexample))
        return EXIT_FAILURE
    except (ConvergenceError, H3BoundError) as err:
        _LOGGER.error("%s: %s", type(err).__name__, err)
        return EXIT_FAILURE


def run() -> None:
    """Console script entry point."""
    sys.exit(main())

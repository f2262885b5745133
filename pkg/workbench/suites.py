"""Seeded verification suites and their thread fan-out.

Every trial draws from its own generator seeded by (seed, trial), so the
report depends only on the seed and the trial count, never on how trials
are split across workers.
"""

from __future__ import annotations

import asyncio
import logging
import math
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cache
from typing import Any

import numpy as np
from scipy import optimize as sp_optimize
from scipy.spatial.transform import Rotation

from h3bound.const import (
    BEND_ANGLE,
    DEFAULT_DELTA,
    DEGENERATE_EDGE_TOL,
    DEFAULT_TRIALS,
    MAX_REPORTED_FAILURES,
    REPORT_ANGLE_TOL_DEG,
    SUITE_METRIC,
    SUITE_SELECTION,
    SUITE_SHORTCUT,
    SUITE_STEINER,
    SUITE_THIN_TRIANGLES,
    SUITE_TRICHOTOMY,
    SUITE_WINDOW,
    TOL_CONSTRUCTION,
)
from h3bound.errors import DataError, H3BoundError
from h3bound.helpers import (
    BASEPOINT,
    W,
    CarrierConfig,
    Case1,
    Case2,
    Frame,
    Geodesic120Path,
    GeodesicSegment,
    HPoint,
    LengthAssignment,
    TrivalentGraph,
    corner_shortcut,
    cyclic_window_maxima,
    dist,
    enumerate_n_graphs,
    exp_map,
    girth_length,
    horoball_contains,
    ideal_direction,
    is_embedded,
    line_element_distance,
    optimize,
    ray_exit_length,
    reduced_closed_paths,
    schedule,
    select_long_pair,
    select_long_pair_oracle,
    short_cut,
    star_candidates,
    thin_triangle_gap,
    total_length,
    trichotomy,
    window_long_edge_check,
    y_report,
)
from h3bound.helpers.bounds import ConstantSchedule, lbar
from h3bound.helpers.geometry import Containment

from .config import worker_count

_LOGGER = logging.getLogger(__name__)

THIN_TRIANGLE_RADIUS = 10.0
THIN_TRIANGLE_SLACK = 1e-3
SELECTION_MAX_K = 12
SHORTCUT_DELTAS = (0.0, 0.5, 1.0)
TRICHOTOMY_MAX_K = 4
WINDOW_MAX_LEN = 10
WINDOW_GIRTH = 1.0
METRIC_RADIUS = 5.0
METRIC_DIST_TOL = 1e-6
METRIC_EXIT_TOL = 1e-9
STEINER_RADIUS = (0.5, 3.0)
MAX_ATTEMPTS = 200


# -------------------------------------------------------------------------
# Reports
# -------------------------------------------------------------------------


@dataclass
class Failure:
    """One failing trial with everything needed to replay it."""

    trial: int
    reason: str
    case: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {"trial": self.trial, "reason": self.reason, "case": self.case}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Failure:
        """Create a failure from its dictionary representation."""
        try:
            return cls(int(data["trial"]), str(data["reason"]), dict(data["case"]))
        except (KeyError, TypeError, ValueError) as err:
            raise DataError(f"malformed failure record: {err}") from err


@dataclass
class VerificationReport:
    """Aggregated result of one suite run; passes iff no trial failed."""

    suite: str
    seed: int
    trials: int
    failure_count: int = 0
    failures: list[Failure] = field(default_factory=list)
    statistics: dict[str, float] = field(default_factory=dict)
    wall_time: float = 0.0
    replayed: bool = False

    @property
    def passed(self) -> bool:
        """Return True if no trial failed."""
        return self.failure_count == 0

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation.

        Wall time is left out so that equal seeds give identical documents.
        """
        return {
            "suite": self.suite,
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "failure_count": self.failure_count,
            "failures": [f.to_dict() for f in self.failures],
            "statistics": dict(sorted(self.statistics.items())),
            "replayed": self.replayed,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> VerificationReport:
        """Create a report from its dictionary representation."""
        try:
            return cls(
                suite=str(data["suite"]),
                seed=int(data["seed"]),
                trials=int(data["trials"]),
                failure_count=int(data["failure_count"]),
                failures=[Failure.from_dict(f) for f in data.get("failures", [])],
                statistics=dict(data.get("statistics", {})),
                replayed=bool(data.get("replayed", False)),
            )
        except (KeyError, TypeError, ValueError) as err:
            raise DataError(f"malformed report: {err}") from err

    def summary(self) -> str:
        """One-line human readable result."""
        stats = ", ".join(f"{k}={v:.6g}" for k, v in sorted(self.statistics.items()))
        verdict = "PASS" if self.passed else f"FAIL ({self.failure_count} failures)"
        return f"{self.suite}: {verdict} over {self.trials} trials" + (f" [{stats}]" if stats else "")


@dataclass
class CheckResult:
    """Outcome of one trial: a failure reason (or None) plus measured values."""

    reason: str | None = None
    measures: dict[str, float] = field(default_factory=dict)


def _merge_measures(into: dict[str, float], measures: dict[str, float]) -> None:
    """Keys starting with min_ keep minima, all others keep maxima."""
    for key, value in measures.items():
        if key not in into:
            into[key] = value
        elif key.startswith("min_"):
            into[key] = min(into[key], value)
        else:
            into[key] = max(into[key], value)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial, independent of partitioning."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


# -------------------------------------------------------------------------
# Suite base
# -------------------------------------------------------------------------


class VerificationSuite(ABC):
    """A generator of random admissible cases and an independent check."""

    name: str

    @property
    def default_trials(self) -> int:
        """Trial count used when none is requested."""
        return DEFAULT_TRIALS[self.name]

    @abstractmethod
    def generate(self, rng: np.random.Generator, trial: int) -> dict[str, Any]:
        """Draw one JSON-serializable case."""

    @abstractmethod
    def check(self, case: dict[str, Any]) -> CheckResult:
        """Check one case."""

    def safe_check(self, case: dict[str, Any]) -> CheckResult:
        """Run check, turning any exception into a failure reason."""
        try:
            return self.check(case)
        except Exception as err:  # noqa: BLE001
            return CheckResult(f"{type(err).__name__}: {err}")

    def run_range(self, seed: int, start: int, stop: int) -> tuple[list[Failure], int, dict[str, float]]:
        """Run trials start..stop-1; failures are kept verbatim up to the report cap."""
        failures: list[Failure] = []
        count = 0
        stats: dict[str, float] = {}
        for trial in range(start, stop):
            try:
                case = self.generate(trial_rng(seed, trial), trial)
            except H3BoundError as err:
                count += 1
                if len(failures) < MAX_REPORTED_FAILURES:
                    failures.append(Failure(trial, f"generator: {err}", {}))
                continue
            result = self.safe_check(case)
            _merge_measures(stats, result.measures)
            if result.reason is not None:
                count += 1
                _LOGGER.debug("%s trial %d failed: %s", self.name, trial, result.reason)
                if len(failures) < MAX_REPORTED_FAILURES:
                    failures.append(Failure(trial, result.reason, case))
        return failures, count, stats


# -------------------------------------------------------------------------
# Sampling helpers
# -------------------------------------------------------------------------


def _random_direction(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _random_point(rng: np.random.Generator, radius: float, low: float = 0.0) -> HPoint:
    return exp_map(HPoint.origin(), _random_direction(rng), float(rng.uniform(low, radius)))


@cache
def _schedule(kmax: int, big_delta: float = DEFAULT_DELTA) -> ConstantSchedule:
    return schedule(kmax, big_delta)


@cache
def _window_graphs() -> tuple[tuple[int, TrivalentGraph], ...]:
    return tuple((n, g) for n in (2, 3) for g in enumerate_n_graphs(n))


@cache
def _window_paths(index: int) -> tuple:
    _, graph = _window_graphs()[index]
    return tuple(reduced_closed_paths(graph, WINDOW_MAX_LEN))


# -------------------------------------------------------------------------
# Suites
# -------------------------------------------------------------------------


class ThinTrianglesSuite(VerificationSuite):
    """Random triangles in B(0, 10) are ln(1 + sqrt 2)-thin."""

    name = SUITE_THIN_TRIANGLES

    def generate(self, rng: np.random.Generator, trial: int) -> dict[str, Any]:
        return {"points": [_random_point(rng, THIN_TRIANGLE_RADIUS).to_dict() for _ in range(3)]}

    def check(self, case: dict[str, Any]) -> CheckResult:
        a, b, c = (HPoint.from_dict(p) for p in case["points"])
        gap = thin_triangle_gap(a, b, c)
        reason = None
        if gap > DEFAULT_DELTA + THIN_TRIANGLE_SLACK:
            reason = f"gap {gap:.9f} exceeds {DEFAULT_DELTA + THIN_TRIANGLE_SLACK:.9f}"
        return CheckResult(reason, {"max_gap": gap})


class SelectionSuite(VerificationSuite):
    """select_long_pair agrees with the exhaustive search."""

    name = SUITE_SELECTION

    def generate(self, rng: np.random.Generator, trial: int) -> dict[str, Any]:
        levels = _schedule(SELECTION_MAX_K).values
        k = int(rng.integers(0, SELECTION_MAX_K + 1))
        n = int(rng.integers(0, k + 1))
        m = k - n

        def term() -> float:
            return float(levels[int(rng.integers(0, k + 1))] * math.exp(rng.uniform(-1.5, 0.5)))

        x = [term() for _ in range(n)]
        y = [term() for _ in range(m)]
        top = max([levels[k], *x, *y])
        x.append(top * float(1.0 + rng.uniform(0.01, 1.0)))
        y.append(top * float(1.0 + rng.uniform(0.01, 1.0)))
        return {"x": x, "y": y}

    def check(self, case: dict[str, Any]) -> CheckResult:
        x, y = case["x"], case["y"]
        levels = _schedule(SELECTION_MAX_K).values
        result = select_long_pair(x, y, levels)
        oracle = select_long_pair_oracle(x, y, levels)
        if not result.verify(x, y, levels):
            return CheckResult(f"{result} does not satisfy its own case")
        if oracle.pairs:
            if not isinstance(result, Case1) or (result.r, result.s) != oracle.first_pair:
                return CheckResult(f"{result} differs from innermost pair {oracle.first_pair}")
        elif not isinstance(result, Case2):
            return CheckResult(f"{result} reported but no pair exists")
        return CheckResult(None, {"case1": float(isinstance(result, Case1))})


def _segment_into_w(rng: np.random.Generator, start: HPoint, length: float) -> GeodesicSegment:
    """Segment from start aimed near the basepoint and contained in W."""
    toward = ideal_direction(start, BASEPOINT)
    theta = 1.0
    for _ in range(MAX_ATTEMPTS):
        kick = _random_direction(rng)
        kick -= (kick @ toward) * toward
        kick /= np.linalg.norm(kick)
        direction = math.cos(theta) * toward + math.sin(theta) * kick
        segment = GeodesicSegment.from_dict(
            GeodesicSegment.from_direction(start, direction, length).to_dict()
        )
        if W.segment_exit(segment) is None:
            # half the angle, so the JSON round trip cannot push it out of W
            half = GeodesicSegment.from_dict(
                GeodesicSegment.from_direction(
                    start, math.cos(0.5 * theta) * toward + math.sin(0.5 * theta) * kick, length
                ).to_dict()
            )
            if W.segment_exit(half) is None:
                return half
        theta *= 0.5
    return GeodesicSegment.from_direction(start, toward, length)


def _start_in_ball(rng: np.random.Generator, delta: float) -> HPoint:
    """A point of the closed delta-ball inside W."""
    if delta == 0.0:
        return HPoint.origin()
    for _ in range(MAX_ATTEMPTS):
        p = exp_map(HPoint.origin(), _random_direction(rng), delta * float(rng.uniform()) ** (1 / 3))
        if horoball_contains(p).status is not Containment.OUTSIDE:
            return HPoint.from_dict(p.to_dict())
    return HPoint.origin()


class ShortCutSuite(VerificationSuite):
    """Admissible long segment pairs always produce valid short-cut certificates."""

    name = SUITE_SHORTCUT

    def generate(self, rng: np.random.Generator, trial: int) -> dict[str, Any]:
        delta = SHORTCUT_DELTAS[trial % len(SHORTCUT_DELTAS)]
        threshold = lbar(delta, DEFAULT_DELTA)
        segments = []
        for _ in range(2):
            start = _start_in_ball(rng, delta)
            length = threshold * float(1.0 + rng.uniform(0.0, 0.5))
            segments.append(_segment_into_w(rng, start, length).to_dict())
        return {"delta": delta, "A": segments[0], "B": segments[1]}

    def check(self, case: dict[str, Any]) -> CheckResult:
        seg_a = GeodesicSegment.from_dict(case["A"])
        seg_b = GeodesicSegment.from_dict(case["B"])
        cert = short_cut(seg_a, seg_b, float(case["delta"]), DEFAULT_DELTA)
        failed = cert.failures()
        if failed or not cert.gain > DEFAULT_DELTA:
            return CheckResult(f"certificate failed: {failed or ['gain']}")
        return CheckResult(None, {"min_gain": cert.gain, "max_d_e_f": cert.d_e_f})


class TrichotomySuite(VerificationSuite):
    """Random admissible paths through 0 escape W or admit a short cut."""

    name = SUITE_TRICHOTOMY

    def generate(self, rng: np.random.Generator, trial: int) -> dict[str, Any]:
        sched = _schedule(TRICHOTOMY_MAX_K)
        for _ in range(MAX_ATTEMPTS):
            k = int(rng.integers(0, TRICHOTOMY_MAX_K + 1))
            level = sched(k)
            window = [float(math.exp(rng.uniform(math.log(0.05), math.log(2.0)))) for _ in range(k)]
            long_a, long_b = (level * float(rng.uniform(1.0 + 1e-6, 3.0)) for _ in range(2))
            lengths = [long_a, *window, long_b]
            dihedrals = [float(rng.uniform(0.0, 2.0 * math.pi)) for _ in range(len(lengths) - 1)]
            rot = Rotation.random(None, rng).as_matrix()
            anchor = Frame.from_directions(HPoint.origin(), rot[:, 0], rot[:, 1])
            j = int(rng.integers(1, k + 2))
            try:
                path = Geodesic120Path.build(lengths, dihedrals, anchor, j)
                path = Geodesic120Path.from_dict(path.to_dict())
                if not is_embedded(path).embedded:
                    continue
            except H3BoundError:
                continue
            return {"path": path.to_dict(), "A": 0, "B": k + 1}
        raise DataError("no embedded admissible path found")

    def check(self, case: dict[str, Any]) -> CheckResult:
        path = Geodesic120Path.from_dict(case["path"])
        outcome = trichotomy(path, int(case["A"]), int(case["B"]), _schedule(TRICHOTOMY_MAX_K))
        if not outcome.verify():
            return CheckResult(f"{type(outcome).__name__} certificate does not re-validate")
        return CheckResult(None, {"shortcut": float(outcome.to_dict()["outcome"] == "shortcut")})


class SteinerSuite(VerificationSuite):
    """Optimized three-terminal stars meet at 120 degrees and beat every terminal star."""

    name = SUITE_STEINER

    def generate(self, rng: np.random.Generator, trial: int) -> dict[str, Any]:
        low, high = STEINER_RADIUS
        terminals = [_random_point(rng, high, low).to_dict() for _ in range(3)]
        return {"terminals": terminals, "gamma": float(rng.uniform(0.01, math.pi - 0.01))}

    def check(self, case: dict[str, Any]) -> CheckResult:
        terminals = [HPoint.from_dict(p) for p in case["terminals"]]
        config = optimize(CarrierConfig.star(terminals))
        length = total_length(config)
        best_star = min(star_candidates(terminals))
        measures: dict[str, float] = {"max_excess": length - best_star}
        if length > best_star + 1e-9:
            return CheckResult(f"length {length:.12g} exceeds terminal star {best_star:.12g}", measures)
        if min(config.edge_lengths()) > DEGENERATE_EDGE_TOL:
            report = y_report(config)
            measures["max_deviation_deg"] = report.max_deviation_deg
            measures["max_coplanarity"] = report.max_residual
            if report.max_deviation_deg > REPORT_ANGLE_TOL_DEG or report.max_residual > 1e-6:
                return CheckResult("interior vertex is not a Y configuration", measures)

        gamma = float(case["gamma"])
        gain = corner_shortcut(1.0, gamma).gain
        if gamma < BEND_ANGLE - 1e-4 and not gain > 0.0:
            return CheckResult(f"corner at {gamma:.9f} has gain {gain:.3g}", measures)
        if gamma >= BEND_ANGLE and gain > 1e-9:
            return CheckResult(f"corner at {gamma:.9f} has gain {gain:.3g}", measures)
        return CheckResult(None, measures)


class WindowSuite(VerificationSuite):
    """Every window of a reduced closed path holds a long edge once the girth is normalized."""

    name = SUITE_WINDOW

    def generate(self, rng: np.random.Generator, trial: int) -> dict[str, Any]:
        graphs = _window_graphs()
        index = trial % len(graphs)
        n, graph = graphs[index]
        raw = LengthAssignment(
            tuple(float(math.exp(rng.uniform(-3.0, 3.0))) for _ in range(graph.num_edges))
        )
        girth = girth_length(graph, raw).length
        weights = raw.scaled(WINDOW_GIRTH / girth)
        return {"graph_index": index, "n": n, "graph": graph.to_dict(), "lengths": list(weights.lengths)}

    def check(self, case: dict[str, Any]) -> CheckResult:
        graph = TrivalentGraph.from_dict(case["graph"])
        weights = LengthAssignment(tuple(case["lengths"]))
        n = int(case["n"])
        paths = _window_paths(int(case["graph_index"]))
        if not paths:
            return CheckResult(None, {"paths": 0.0})
        # the first path goes through every precondition, the rest reuse the girth
        first = window_long_edge_check(graph, weights, paths[0], n, WINDOW_GIRTH)
        size = first.window_size
        floor = first.threshold * (1.0 - TOL_CONSTRUCTION)
        for path in paths:
            maxima = cyclic_window_maxima(path.lengths(weights), size)
            if maxima.min() < floor:
                start = int(np.argmin(maxima))
                return CheckResult(
                    f"window at {start} of {path.to_dict()} has no edge >= {first.threshold:.12g}"
                )
        return CheckResult(None, {"paths": float(len(paths))})


class MetricSuite(VerificationSuite):
    """dist against line-element integration and ray_exit_length against root finding."""

    name = SUITE_METRIC

    def generate(self, rng: np.random.Generator, trial: int) -> dict[str, Any]:
        return {
            "p": _random_point(rng, METRIC_RADIUS).to_dict(),
            "q": _random_point(rng, METRIC_RADIUS).to_dict(),
            "theta": float(rng.uniform(0.05, 0.5 * math.pi - 0.05)),
            "azimuth": float(rng.uniform(0.0, 2.0 * math.pi)),
        }

    def check(self, case: dict[str, Any]) -> CheckResult:
        p, q = HPoint.from_dict(case["p"]), HPoint.from_dict(case["q"])
        dist_error = abs(dist(p, q) - line_element_distance(p, q))

        theta, phi = float(case["theta"]), float(case["azimuth"])
        u = np.array(
            [-math.cos(theta), math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi)]
        )
        expected = ray_exit_length(theta)

        def margin(t: float) -> float:
            return W.margin(exp_map(HPoint.origin(), u, t))

        hi = 1.0
        while margin(hi) <= 0.0:
            hi *= 2.0
        lo = 0.5 * min(expected, hi)
        while margin(lo) > 0.0:
            lo *= 0.5
        root = sp_optimize.brentq(margin, lo, hi, xtol=1e-13)
        exit_error = abs(root - expected)

        measures = {"max_dist_error": dist_error, "max_exit_error": exit_error}
        if dist_error > METRIC_DIST_TOL:
            return CheckResult(f"dist disagrees with the line element by {dist_error:.3g}", measures)
        if exit_error > METRIC_EXIT_TOL:
            return CheckResult(f"exit length disagrees with root finding by {exit_error:.3g}", measures)
        return CheckResult(None, measures)


SUITE_REGISTRY: dict[str, VerificationSuite] = {
    suite.name: suite
    for suite in (
        ThinTrianglesSuite(),
        SelectionSuite(),
        ShortCutSuite(),
        TrichotomySuite(),
        SteinerSuite(),
        WindowSuite(),
        MetricSuite(),
    )
}


# -------------------------------------------------------------------------
# Runner
# -------------------------------------------------------------------------


def partition(trials: int, workers: int) -> list[tuple[int, int]]:
    """Split 0..trials-1 into contiguous, nearly equal ranges."""
    workers = max(1, min(workers, trials)) if trials else 1
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]


def get_suite(name: str) -> VerificationSuite:
    """Look up a suite.

    Raises:
        KeyError: unknown suite name
    """
    return SUITE_REGISTRY[name]


async def run_suite(
    name: str, seed: int, trials: int | None = None, workers: int | None = None
) -> VerificationReport:
    """Run a suite across worker threads and merge the partial results."""
    suite = get_suite(name)
    trials = trials or suite.default_trials
    workers = worker_count(workers)
    started = time.monotonic()
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = await asyncio.gather(
            *(
                loop.run_in_executor(pool, suite.run_range, seed, start, stop)
                for start, stop in partition(trials, workers)
            )
        )

    report = VerificationReport(suite=name, seed=seed, trials=trials)
    failures: list[Failure] = []
    for part_failures, count, stats in parts:
        failures.extend(part_failures)
        report.failure_count += count
        _merge_measures(report.statistics, stats)
    report.failures = sorted(failures, key=lambda f: f.trial)[:MAX_REPORTED_FAILURES]
    report.wall_time = time.monotonic() - started
    _LOGGER.info("%s (%.2fs)", report.summary(), report.wall_time)
    return report


def replay(report: VerificationReport) -> VerificationReport:
    """Re-run the check on every recorded counterexample."""
    suite = get_suite(report.suite)
    out = VerificationReport(suite=report.suite, seed=report.seed, trials=len(report.failures), replayed=True)
    for failure in report.failures:
        if not failure.case:
            continue
        result = suite.safe_check(failure.case)
        _merge_measures(out.statistics, result.measures)
        if result.reason is not None:
            out.failure_count += 1
            out.failures.append(Failure(failure.trial, result.reason, failure.case))
    _LOGGER.info("Replayed %d counterexamples: %s", len(report.failures), out.summary())
    return out

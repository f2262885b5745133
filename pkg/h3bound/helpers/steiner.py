"""Length minimization of carrier configurations and 120 degree certificates."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import optimize as sp_optimize

from ..const import (
    ARMIJO_C,
    ARMIJO_SHRINK,
    BEND_ANGLE,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_OPTIMIZE_TOL,
    DEGENERATE_EDGE_TOL,
    OPTIMIZE_STALL_TOL,
    REPAIR_SPLIT_DISTANCE,
    TOL_CONSTRUCTION,
)
from ..errors import (
    ConvergenceError,
    DataError,
    GeometryError,
    HyperbolicRangeError,
    ZeroLengthEdgeError,
)
from .geometry import (
    GeodesicSegment,
    HPoint,
    _advance,
    _log_tangent,
    angle,
    ball_from_tangent,
    dist,
    lorentz,
)
from .graphs import TrivalentGraph

_LOGGER = logging.getLogger(__name__)


# -------------------------------------------------------------------------
# Configurations
# -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CarrierConfig:
    """A graph with vertex positions in H^3; pinned vertices never move.

    Free vertices must be trivalent (a loop counts twice).
    """

    edges: tuple[tuple[int, int], ...]
    positions: tuple[HPoint, ...]
    pinned: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        """Validate degrees and indices."""
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "positions", tuple(self.positions))
        object.__setattr__(self, "pinned", frozenset(self.pinned))
        degree = [0] * len(self.positions)
        for u, v in edges:
            if not (0 <= u < len(degree) and 0 <= v < len(degree)):
                raise GeometryError(f"edge {(u, v)} refers to a missing vertex")
            degree[u] += 1
            degree[v] += 1
        for v in self.free_vertices:
            if degree[v] != 3:
                raise GeometryError(f"free vertex {v} has degree {degree[v]}")

    @classmethod
    def from_graph(
        cls, graph: TrivalentGraph, positions: Sequence[HPoint], pinned: Sequence[int] = ()
    ) -> CarrierConfig:
        """Realize a trivalent graph."""
        return cls(tuple(graph.edges), tuple(positions), frozenset(pinned))

    @classmethod
    def star(cls, terminals: Sequence[HPoint], center: HPoint | None = None) -> CarrierConfig:
        """Three pinned terminals joined to one free vertex (the last vertex)."""
        if len(terminals) != 3:
            raise GeometryError("a star has three terminals")
        center = center or HPoint.origin()
        return cls(((0, 3), (1, 3), (2, 3)), (*terminals, center), frozenset({0, 1, 2}))

    @property
    def free_vertices(self) -> list[int]:
        """Vertices the optimizer may move."""
        return [v for v in range(len(self.positions)) if v not in self.pinned]

    def incident(self, vertex: int) -> list[tuple[int, int]]:
        """(edge id, other endpoint) for every non-loop edge at vertex."""
        out = []
        for e, (u, v) in enumerate(self.edges):
            if u == v:
                continue
            if u == vertex:
                out.append((e, v))
            elif v == vertex:
                out.append((e, u))
        return out

    def edge_length(self, edge: int) -> float:
        """Hyperbolic length of one realized edge."""
        u, v = self.edges[edge]
        return dist(self.positions[u], self.positions[v])

    def edge_lengths(self) -> list[float]:
        """Hyperbolic length of every realized edge."""
        return [self.edge_length(e) for e in range(len(self.edges))]

    def segments(self) -> list[GeodesicSegment]:
        """Realized edges as geodesic segments."""
        return [GeodesicSegment.between(self.positions[u], self.positions[v]) for u, v in self.edges]

    def with_positions(self, positions: Sequence[HPoint]) -> CarrierConfig:
        """Same graph, new positions."""
        return CarrierConfig(self.edges, tuple(positions), self.pinned)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "edges": [list(e) for e in self.edges],
            "positions": [p.to_dict() for p in self.positions],
            "pinned": sorted(self.pinned),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CarrierConfig:
        """Create a configuration from its dictionary representation."""
        try:
            return cls(
                tuple(tuple(e) for e in data["edges"]),
                tuple(HPoint.from_dict(p) for p in data["positions"]),
                frozenset(data.get("pinned", ())),
            )
        except (KeyError, TypeError, ValueError, GeometryError) as err:
            raise DataError(f"malformed configuration: {err}") from err


def total_length(config: CarrierConfig) -> float:
    """Sum of hyperbolic edge lengths."""
    return math.fsum(config.edge_lengths())


# -------------------------------------------------------------------------
# Optimizer
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class _Move:
    """Joint move of free vertices sitting at one point."""

    members: tuple[int, ...]
    origin: np.ndarray
    direction: np.ndarray
    residual: float
    scale: float


def _clusters(config: CarrierConfig) -> list[list[int]]:
    """Vertices connected through collapsed edges."""
    parent = list(range(len(config.positions)))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e, (u, v) in enumerate(config.edges):
        if u != v and config.edge_length(e) < DEGENERATE_EDGE_TOL:
            parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for v in range(len(parent)):
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


def _moves(config: CarrierConfig) -> list[_Move]:
    """Descent directions of every cluster holding a free vertex.

    A cluster stuck to a pinned vertex is stationary while the pull of its
    outside edges is at most the number of collapsed edges holding it.
    """
    moves = []
    for cluster in _clusters(config):
        members = [v for v in cluster if v not in config.pinned]
        if not members:
            continue
        anchors = [v for v in cluster if v in config.pinned]
        origin = config.positions[anchors[0] if anchors else members[0]].lift
        inside = set(cluster)
        pull = np.zeros(4)
        scale = 0.0
        holding = 0
        for v in members:
            for _, w in config.incident(v):
                if w in inside:
                    holding += w in config.pinned
                    continue
                target = config.positions[w].lift
                pull += _log_tangent(origin, target)
                scale += 1.0 / dist(HPoint(origin), config.positions[w])
        norm = math.sqrt(max(lorentz(pull, pull), 0.0))
        residual = max(norm - holding, 0.0)
        direction = pull / norm if norm > 0.0 else pull
        moves.append(_Move(tuple(members), origin, direction, residual, scale))
    return moves


def _apply(config: CarrierConfig, moves: list[_Move], eta: float) -> CarrierConfig:
    positions = list(config.positions)
    for move in moves:
        if move.residual <= 0.0 or move.scale <= 0.0:
            continue
        x, _ = _advance(move.origin, move.direction, eta * move.residual / move.scale)
        moved = HPoint(x)
        for v in move.members:
            positions[v] = moved
    return config.with_positions(positions)


def _try_snaps(config: CarrierConfig, length: float) -> tuple[CarrierConfig, float]:
    """Move a free vertex onto a neighbor whenever that shortens the configuration."""
    for v in config.free_vertices:
        for _, w in config.incident(v):
            if config.positions[v] is config.positions[w]:
                continue
            positions = list(config.positions)
            positions[v] = config.positions[w]
            trial = config.with_positions(positions)
            trial_length = total_length(trial)
            if trial_length < length - TOL_CONSTRUCTION * max(1.0, length):
                _LOGGER.debug("Snapped vertex %d onto %d (%.12g -> %.12g)", v, w, length, trial_length)
                config, length = trial, trial_length
    return config, length


def stationarity_residual(config: CarrierConfig) -> float:
    """Largest unbalanced pull over free clusters; zero at a critical point."""
    return max((m.residual for m in _moves(config)), default=0.0)


def optimize(
    config: CarrierConfig,
    tol: float = DEFAULT_OPTIMIZE_TOL,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> CarrierConfig:
    """Minimize total length over free vertex positions.

    Each step moves every free cluster along its pull scaled by the inverse
    distance sum (a Weiszfeld step), with Armijo backtracking on the exact
    length. Accepted iterates never increase the length.

    Raises:
        GeometryError: no free vertex or tol <= 0
        ConvergenceError: the residual stayed above tol; carries the best config
    """
    if not config.free_vertices:
        raise GeometryError("optimize needs at least one free vertex")
    if not tol > 0.0:
        raise GeometryError(f"tolerance must be positive, got {tol}")

    current = config
    length = total_length(current)
    eta = 1.0
    for iteration in range(max_iterations):
        current, length = _try_snaps(current, length)
        moves = _moves(current)
        residual = max((m.residual for m in moves), default=0.0)
        if residual < tol:
            _LOGGER.debug("Converged after %d iterations, length %.12g", iteration, length)
            return current
        predicted = sum(m.residual**2 / m.scale for m in moves if m.scale > 0.0)
        while True:
            try:
                trial = _apply(current, moves, eta)
                trial_length = total_length(trial)
            except HyperbolicRangeError:
                trial_length = math.inf
            if trial_length <= length - ARMIJO_C * eta * predicted:
                current, length = trial, trial_length
                eta = min(1.0, 2.0 * eta)
                break
            eta *= ARMIJO_SHRINK
            if eta < 1e-12:
                if residual < OPTIMIZE_STALL_TOL:
                    _LOGGER.debug("Stopped at residual %.3g, length %.12g", residual, length)
                    return current
                raise ConvergenceError(
                    f"line search stalled at residual {residual:.3g}", best=current
                )
        if iteration % 100 == 0:
            _LOGGER.debug("Iteration %d: length %.12g residual %.3g", iteration, length, residual)
    raise ConvergenceError(f"no convergence in {max_iterations} iterations", best=current)


# -------------------------------------------------------------------------
# Certificates
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexAngles:
    """Incidence angles at one trivalent vertex."""

    vertex: int
    angles: tuple[float, float, float]
    residual: float

    @property
    def angle_sum(self) -> float:
        """Sum of the three angles."""
        return math.fsum(self.angles)

    @property
    def max_deviation(self) -> float:
        """Largest |angle - 2 pi / 3| in radians."""
        return max(abs(a - BEND_ANGLE) for a in self.angles)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation (degrees)."""
        return {
            "vertex": self.vertex,
            "angles_deg": [math.degrees(a) for a in self.angles],
            "angle_sum_deg": math.degrees(self.angle_sum),
            "residual": self.residual,
        }


@dataclass(frozen=True)
class YReport:
    """Incidence angles and coplanarity residuals at every free vertex."""

    vertices: tuple[VertexAngles, ...]

    @property
    def max_deviation_deg(self) -> float:
        """Worst deviation from 120 degrees."""
        return max((math.degrees(v.max_deviation) for v in self.vertices), default=0.0)

    @property
    def max_residual(self) -> float:
        """Worst coplanarity residual."""
        return max((v.residual for v in self.vertices), default=0.0)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "vertices": [v.to_dict() for v in self.vertices],
            "max_deviation_deg": self.max_deviation_deg,
            "max_residual": self.max_residual,
        }


def _coplanarity(directions: list[np.ndarray]) -> float:
    """Distance of one unit direction from the plane of the other two."""
    w1, w2, w3 = directions
    volume = abs(float(np.linalg.det(np.array([w1, w2, w3]))))
    spread = max(
        np.linalg.norm(np.cross(w1, w2)),
        np.linalg.norm(np.cross(w2, w3)),
        np.linalg.norm(np.cross(w1, w3)),
    )
    return volume / spread if spread > 0.0 else 0.0


def y_report(config: CarrierConfig) -> YReport:
    """Measure the three incidence angles at every free vertex.

    Raises:
        ZeroLengthEdgeError: an incident edge is shorter than the degeneracy tolerance
    """
    rows = []
    for v in config.free_vertices:
        here = config.positions[v]
        incident = config.incident(v)
        for e, w in incident:
            if config.edge_length(e) < DEGENERATE_EDGE_TOL:
                raise ZeroLengthEdgeError(
                    f"edge {e} at vertex {v} has zero length; run zero_edge_repair",
                    edge=config.edges[e],
                )
        if len(incident) != 3:
            raise ZeroLengthEdgeError(f"vertex {v} carries a loop", edge=(v, v))
        others = [config.positions[w] for _, w in incident]
        angles = (
            angle(here, others[0], others[1]),
            angle(here, others[1], others[2]),
            angle(here, others[0], others[2]),
        )
        directions = []
        for other in others:
            w = ball_from_tangent(here.lift, _log_tangent(here.lift, other.lift))
            directions.append(w / np.linalg.norm(w))
        rows.append(VertexAngles(v, angles, _coplanarity(directions)))
    return YReport(tuple(rows))


def star_candidates(terminals: Sequence[HPoint]) -> list[float]:
    """Lengths of the three networks joining the terminals through one of them."""
    if len(terminals) != 3:
        raise GeometryError("star candidates need three terminals")
    return [
        dist(terminals[i], terminals[(i + 1) % 3]) + dist(terminals[i], terminals[(i + 2) % 3])
        for i in range(3)
    ]


def optimal_stars(lengths: Sequence[float], tol: float = 1e-9) -> list[int]:
    """Indices of every star candidate within tol of the shortest."""
    best = min(lengths)
    return [i for i, x in enumerate(lengths) if x <= best + tol]


# -------------------------------------------------------------------------
# Discrete moves
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class CornerCut:
    """Best cut of a corner by a Fermat vertex inserted on its bisector."""

    gain: float
    depth: float
    branch: float
    arm: float
    gamma: float

    def points(self) -> dict[str, HPoint]:
        """Corner at 0 with arms in the xy-plane symmetric about the x-axis."""
        half = 0.5 * self.gamma
        corner = HPoint.origin()
        return {
            "corner": corner,
            "fermat": _from_origin(np.array([1.0, 0.0, 0.0]), self.depth),
            "arm_1": _from_origin(np.array([math.cos(half), math.sin(half), 0.0]), self.arm),
            "arm_2": _from_origin(np.array([math.cos(half), -math.sin(half), 0.0]), self.arm),
        }

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "gain": self.gain,
            "a": self.depth,
            "b": self.branch,
            "c": self.arm,
            "gamma": self.gamma,
            "points": {k: p.to_dict() for k, p in self.points().items()},
        }


def _from_origin(direction: np.ndarray, t: float) -> HPoint:
    return HPoint(np.concatenate(([math.cosh(t)], math.sinh(t) * direction)))


def corner_shortcut(c_len: float, gamma: float) -> CornerCut:
    """Optimal gain 2c - (a + 2b) from cutting a corner of angle gamma.

    The branch satisfies cosh b = cosh a cosh c - sinh a sinh c cos(gamma/2);
    depth a ranges up to the foot of the perpendicular from an arm end onto
    the bisector, where a + 2b is convex. The gain is zero exactly when the
    best depth is 0, which happens for gamma >= 2 pi / 3.
    """
    if not c_len > 0.0:
        raise GeometryError(f"arm length must be positive, got {c_len}")
    if not 0.0 < gamma < math.pi:
        raise GeometryError(f"corner angle must lie in (0, pi), got {gamma}")
    cos_half = math.cos(0.5 * gamma)
    ch_c, sh_c = math.cosh(c_len), math.sinh(c_len)

    def branch(a: float) -> float:
        return math.acosh(max(math.cosh(a) * ch_c - math.sinh(a) * sh_c * cos_half, 1.0))

    def cost(a: float) -> float:
        return a + 2.0 * branch(a)

    depth_max = math.atanh(math.tanh(c_len) * cos_half)
    res = sp_optimize.minimize_scalar(
        cost, bounds=(0.0, depth_max), method="bounded", options={"xatol": 1e-12}
    )
    depth = float(res.x)
    if not cost(depth) < 2.0 * c_len * (1.0 - TOL_CONSTRUCTION):
        depth = 0.0
    best = cost(depth) if depth > 0.0 else 2.0 * c_len
    return CornerCut(
        gain=2.0 * c_len - best,
        depth=depth,
        branch=branch(depth) if depth > 0.0 else c_len,
        arm=c_len,
        gamma=gamma,
    )


@dataclass(frozen=True)
class RepairOutcome:
    """Result of splitting a collapsed edge and re-optimizing."""

    config: CarrierConfig
    repaired: bool
    length_before: float
    length_after: float
    edge: tuple[int, int] | None = None

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "config": self.config.to_dict(),
            "repaired": self.repaired,
            "length_before": self.length_before,
            "length_after": self.length_after,
            "edge": list(self.edge) if self.edge else None,
        }


def _collapsed_edge(config: CarrierConfig) -> int | None:
    for e, (u, v) in enumerate(config.edges):
        if u != v and u not in config.pinned and v not in config.pinned:
            if config.edge_length(e) < DEGENERATE_EDGE_TOL:
                return e
    return None


def _rewire(config: CarrierConfig, edge: int, keep: tuple[int, int]) -> CarrierConfig:
    """Whitehead move on `edge`: u keeps the two incident edges in `keep`, v gets the rest."""
    u, v = config.edges[edge]
    others = [e for e, _ in config.incident(u) if e != edge] + [
        e for e, _ in config.incident(v) if e != edge
    ]
    edges = list(config.edges)
    for e in others:
        a, b = edges[e]
        far = b if a in (u, v) else a
        edges[e] = (far, u if e in keep else v)
    return CarrierConfig(tuple(edges), config.positions, config.pinned)


def _split(config: CarrierConfig, edge: int) -> CarrierConfig:
    """Pull the endpoints of a collapsed edge apart along the difference of their pulls."""
    u, v = config.edges[edge]
    origin = config.positions[u].lift

    def pull(vertex: int) -> np.ndarray:
        total = np.zeros(4)
        for e, w in config.incident(vertex):
            if e != edge:
                total += _log_tangent(origin, config.positions[w].lift)
        return total

    diff = pull(u) - pull(v)
    norm = math.sqrt(max(lorentz(diff, diff), 0.0))
    if norm == 0.0:
        return config
    direction = diff / norm
    positions = list(config.positions)
    positions[u] = HPoint(_advance(origin, direction, REPAIR_SPLIT_DISTANCE)[0])
    positions[v] = HPoint(_advance(origin, -direction, REPAIR_SPLIT_DISTANCE)[0])
    return config.with_positions(positions)


def zero_edge_repair(config: CarrierConfig, tol: float = DEFAULT_OPTIMIZE_TOL) -> RepairOutcome:
    """Separate the endpoints of a collapsed edge and re-optimize.

    All three ways of sharing the four outer edges between the two endpoints
    are tried; the shortest result is kept and is never longer than the input.
    """
    before = total_length(config)
    edge = _collapsed_edge(config)
    if edge is None:
        return RepairOutcome(config, False, before, before)
    u, v = config.edges[edge]
    at_u = [e for e, _ in config.incident(u) if e != edge]
    at_v = [e for e, _ in config.incident(v) if e != edge]
    if len(at_u) != 2 or len(at_v) != 2 or set(at_u) & set(at_v):
        _LOGGER.debug("Collapsed edge %s has no Whitehead move", config.edges[edge])
        return RepairOutcome(config, False, before, before, config.edges[edge])
    pairings = [(at_u[0], at_u[1]), (at_u[0], at_v[0]), (at_u[0], at_v[1])]

    best, best_length = config, before
    for keep in pairings:
        candidate = _split(_rewire(config, edge, keep), edge)
        try:
            candidate = optimize(candidate, tol=tol)
        except ConvergenceError as err:
            candidate = err.best
        length = total_length(candidate)
        _LOGGER.debug("Repair pairing %s: %.12g", keep, length)
        if length < best_length:
            best, best_length = candidate, length
    repaired = best is not config
    if repaired:
        _LOGGER.warning(
            "Repaired collapsed edge %s: length %.12g -> %.12g", config.edges[edge], before, best_length
        )
    return RepairOutcome(best, repaired, before, best_length, config.edges[edge])

"""Geodesic-120 paths, horoball escape and short-cut certificates."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np

from ..const import BEND_ANGLE, DEFAULT_DELTA, TOL_CONSTRUCTION, TOL_IDENTITY
from ..errors import (
    CertificateError,
    DataError,
    GeometryError,
    HyperbolicRangeError,
    HypothesisError,
)
from .bounds import ConstantSchedule, lbar
from .geometry import (
    Containment,
    Frame,
    GeodesicSegment,
    HPoint,
    W,
    angle_between_tangents,
    dist,
    exp_map,
    horoball_contains,
    lorentz,
    segment_distance,
)
from .graphs import edge_count

_LOGGER = logging.getLogger(__name__)


# -------------------------------------------------------------------------
# Paths
# -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Geodesic120Path:
    """Piecewise geodesic path whose consecutive edges meet at 120 degrees.

    Edge i joins vertices i and i + 1. dihedrals[i - 1] sets the turn at
    vertex i. Segments are stored oriented away from the anchor vertex so
    that edges too long for ball coordinates stay usable near the anchor;
    unrepresentable terminal vertices are None.
    """

    lengths: tuple[float, ...]
    dihedrals: tuple[float, ...]
    anchor: Frame
    anchor_index: int
    segments: tuple[GeodesicSegment, ...]
    vertices: tuple[HPoint | None, ...]

    @classmethod
    def build(
        cls,
        lengths: Sequence[float],
        dihedrals: Sequence[float],
        anchor: Frame,
        anchor_index: int = 0,
    ) -> Geodesic120Path:
        """Realize a path with the anchor frame at vertex `anchor_index`, heading along its edge.

        Raises:
            GeometryError: a length is not positive or the shapes disagree
            HyperbolicRangeError: an interior vertex is out of range
        """
        lengths = tuple(float(x) for x in lengths)
        dihedrals = tuple(float(x) for x in dihedrals)
        k = len(lengths)
        if k == 0:
            raise GeometryError("a path needs at least one edge")
        if any(not (x > 0.0 and math.isfinite(x)) for x in lengths):
            raise GeometryError("edge lengths must be positive and finite")
        if len(dihedrals) != k - 1:
            raise GeometryError(f"{k} edges need {k - 1} dihedrals, got {len(dihedrals)}")
        if not 0 <= anchor_index < k:
            raise GeometryError(f"anchor index {anchor_index} outside 0..{k - 1}")

        segments: list[GeodesicSegment | None] = [None] * k
        vertices: list[HPoint | None] = [None] * (k + 1)
        vertices[anchor_index] = anchor.position

        frame = anchor
        for i in range(anchor_index, k):
            segments[i] = GeodesicSegment(frame.position, frame.heading, lengths[i])
            if i + 1 < k:
                frame = frame.advance(lengths[i]).bend(BEND_ANGLE, dihedrals[i])
                vertices[i + 1] = frame.position
            else:
                vertices[k] = _far_vertex(segments[i])

        frame = anchor
        for i in range(anchor_index - 1, -1, -1):
            incoming = frame.unbend(BEND_ANGLE, dihedrals[i])
            segments[i] = GeodesicSegment(incoming.position, -incoming.heading, lengths[i])
            if i > 0:
                frame = incoming.advance(-lengths[i])
                vertices[i] = frame.position
            else:
                vertices[0] = _far_vertex(segments[i])

        return cls(lengths, dihedrals, anchor, anchor_index, tuple(segments), tuple(vertices))

    @property
    def k(self) -> int:
        """Number of edges."""
        return len(self.lengths)

    def is_forward(self, edge: int) -> bool:
        """Return True if the stored segment runs from vertex edge to vertex edge + 1."""
        return edge >= self.anchor_index

    def vertex(self, index: int) -> HPoint:
        """Realized vertex.

        Raises:
            HyperbolicRangeError: the vertex was too far out to realize
        """
        point = self.vertices[index]
        if point is None:
            raise HyperbolicRangeError(f"vertex {index} is beyond the representable range")
        return point

    def outward_segment(self, edge: int, base: int) -> GeodesicSegment:
        """Edge oriented away from vertex `base` (one of its endpoints)."""
        seg = self.segments[edge]
        starts_at = edge if self.is_forward(edge) else edge + 1
        if base not in (edge, edge + 1):
            raise GeometryError(f"vertex {base} is not an endpoint of edge {edge}")
        return seg if starts_at == base else seg.reversed()

    def _tangents_at(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        """Unit tangents at vertex index pointing back along edge index-1 and forward along edge index."""
        before, after = self.segments[index - 1], self.segments[index]
        back = -before.tangent_at(before.length) if self.is_forward(index - 1) else before.tangent
        ahead = after.tangent if self.is_forward(index) else -after.tangent_at(after.length)
        return back, ahead

    def joint_angle(self, index: int) -> float:
        """Angle at interior vertex index between its two edges."""
        if not 1 <= index < self.k:
            raise GeometryError(f"vertex {index} is not interior")
        back, ahead = self._tangents_at(index)
        return angle_between_tangents(back, ahead)

    def extended(self, lengths: Sequence[float], dihedrals: Sequence[float]) -> Geodesic120Path:
        """Append edges after the last one."""
        return Geodesic120Path.build(
            self.lengths + tuple(lengths),
            self.dihedrals + tuple(dihedrals),
            self.anchor,
            self.anchor_index,
        )

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "lengths": list(self.lengths),
            "dihedrals": list(self.dihedrals),
            "anchor": self.anchor.to_dict(),
            "anchor_index": self.anchor_index,
            "vertices": [v.to_dict() if v is not None else None for v in self.vertices],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Geodesic120Path:
        """Rebuild a path from its dictionary representation."""
        try:
            return cls.build(
                data["lengths"],
                data.get("dihedrals", []),
                Frame.from_dict(data["anchor"]),
                int(data.get("anchor_index", 0)),
            )
        except (KeyError, TypeError, ValueError, GeometryError) as err:
            raise DataError(f"malformed path: {err}") from err


def _far_vertex(segment: GeodesicSegment) -> HPoint | None:
    try:
        return segment.end
    except HyperbolicRangeError:
        _LOGGER.debug("Terminal vertex at distance %.6g left unrealized", segment.length)
        return None


def build_path(lengths: Sequence[float], dihedrals: Sequence[float], anchor: Frame) -> Geodesic120Path:
    """Realize a path from its first vertex."""
    return Geodesic120Path.build(lengths, dihedrals, anchor, 0)


@dataclass(frozen=True)
class SegmentWindow:
    """Sub-path between vertices start and end of a path."""

    start: int
    end: int

    def validate(self, path: Geodesic120Path) -> None:
        """Check the indices are vertices of path."""
        if not 0 <= self.start < self.end <= path.k:
            raise GeometryError(f"window {self.start}..{self.end} does not fit a path of {path.k} edges")

    def edges(self) -> range:
        """Edge indices inside the window."""
        return range(self.start, self.end)


@dataclass(frozen=True)
class EmbeddingCheck:
    """Result of the pairwise segment separation test."""

    embedded: bool
    pair: tuple[int, int] | None = None
    distance: float | None = None


def is_embedded(path: Geodesic120Path, tol: float = TOL_CONSTRUCTION) -> EmbeddingCheck:
    """Return whether all non-adjacent edges stay more than tol apart."""
    for i in range(path.k):
        for j in range(i + 2, path.k):
            gap = segment_distance(path.segments[i], path.segments[j])
            if gap <= tol:
                return EmbeddingCheck(False, (i, j), gap)
    return EmbeddingCheck(True)


# -------------------------------------------------------------------------
# Escape from W
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class EscapeWitness:
    """A point of an edge strictly outside W.

    `t` is measured along the stored segment of the edge, which starts at the
    endpoint nearer the anchor of the path.
    """

    edge_index: int
    t: float
    point: HPoint
    margin: float

    def verify(self) -> bool:
        """Re-classify the stored point."""
        membership = horoball_contains(self.point)
        return membership.status is Containment.OUTSIDE and membership.margin > 0.0

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "edge_index": self.edge_index,
            "t": self.t,
            "point": self.point.to_dict(),
            "margin": self.margin,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EscapeWitness:
        """Create a witness from its dictionary representation."""
        try:
            return cls(
                int(data["edge_index"]),
                float(data["t"]),
                HPoint.from_dict(data["point"]),
                float(data["margin"]),
            )
        except (KeyError, TypeError, ValueError, GeometryError) as err:
            raise DataError(f"malformed witness: {err}") from err


@dataclass(frozen=True)
class Contained:
    """No edge leaves W."""

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {"outcome": "contained"}


def validate_witness(witness: EscapeWitness) -> bool:
    """Re-check a witness from its raw coordinates."""
    return witness.verify()


def _segment_escape(segment: GeodesicSegment, edge_index: int) -> EscapeWitness | None:
    """First point of segment classified outside W, stepping just past the closed-form exit."""
    t_exit = W.segment_exit(segment)
    if t_exit is None:
        return None
    step = max(1e-9, 1e-9 * t_exit)
    t = t_exit
    for _ in range(200):
        membership = W.classify(segment.point_at(t))
        if membership.status is Containment.OUTSIDE:
            return EscapeWitness(edge_index, t, segment.point_at(t), membership.margin)
        if t >= segment.length:
            break
        t = min(t_exit + step, segment.length)
        step *= 4.0
    _LOGGER.debug("Exit of edge %d at t=%.12g stays inside the boundary band", edge_index, t_exit)
    return None


def escapes_horoball(path: Geodesic120Path) -> EscapeWitness | Contained:
    """First point (lowest edge index, then smallest t) strictly outside W.

    Each edge is scanned along its stored segment, which runs away from the
    anchor vertex. For edges before the anchor the witness t is therefore
    measured from vertex edge_index + 1 back toward vertex edge_index.

    Raises:
        HypothesisError: the anchor vertex lies outside W
    """
    anchor = horoball_contains(path.anchor.position)
    if anchor.status is Containment.OUTSIDE:
        raise HypothesisError(f"the anchor lies outside W (margin {anchor.margin:.3g})")
    for i, segment in enumerate(path.segments):
        witness = _segment_escape(segment, i)
        if witness is not None:
            return witness
    return Contained()


# -------------------------------------------------------------------------
# Selection of the long-edge pair
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class Case1:
    """Terms x_r and y_s with r, s >= 1 satisfying the three selection conditions."""

    r: int
    s: int

    @property
    def q(self) -> int:
        """r + s."""
        return self.r + self.s

    def verify(self, x: Sequence[float], y: Sequence[float], levels: Sequence[float]) -> bool:
        """Re-evaluate the three inequalities."""
        return _case1_holds(x, y, levels, self.r, self.s)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {"case": 1, "r": self.r, "s": self.s, "q": self.q}


@dataclass(frozen=True)
class Case2:
    """The first term on one side exceeds L(0)."""

    side: Literal["x", "y"]

    def verify(self, x: Sequence[float], y: Sequence[float], levels: Sequence[float]) -> bool:
        """Re-evaluate the inequality."""
        return (x if self.side == "x" else y)[0] > levels[0]

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {"case": 2, "side": self.side}


def _levels(schedule: ConstantSchedule | Sequence[float], k: int) -> list[float]:
    if isinstance(schedule, ConstantSchedule):
        if schedule.kmax < k:
            raise HypothesisError(f"schedule stops at {schedule.kmax}, need L({k})")
        return [schedule(q) for q in range(k + 1)]
    levels = [float(v) for v in schedule]
    if len(levels) <= k:
        raise HypothesisError(f"{len(levels)} levels given, need L({k})")
    return levels[: k + 1]


def _case1_holds(x: Sequence[float], y: Sequence[float], levels: Sequence[float], r: int, s: int) -> bool:
    if r < 1 or s < 1 or r > len(x) - 1 or s > len(y) - 1:
        return False
    earlier = list(x[:r]) + list(y[:s])
    top = max(earlier)
    q = r + s
    return (
        x[r] > top
        and y[s] > top
        and x[r] > levels[q]
        and y[s] > levels[q]
        and math.fsum(earlier) <= q * levels[q - 1]
    )


def _check_selection_hypotheses(x: Sequence[float], y: Sequence[float], levels: Sequence[float]) -> None:
    n, m = len(x) - 1, len(y) - 1
    if n < 0 or m < 0:
        raise HypothesisError("both sequences need at least one term")
    others = list(x[:n]) + list(y[:m])
    if others and (x[n] <= max(others) or y[m] <= max(others)):
        raise HypothesisError("the last terms must exceed every other term")
    if x[n] <= levels[n + m] or y[m] <= levels[n + m]:
        raise HypothesisError(f"the last terms must exceed L({n + m})")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise HypothesisError("L must be strictly increasing")


def select_long_pair(
    x: Sequence[float], y: Sequence[float], schedule: ConstantSchedule | Sequence[float]
) -> Case1 | Case2:
    """Pick the innermost pair of long terms, or report a long first term.

    Case 1 pairs are minimal by q = r + s, then by r. Running prefix maxima
    and sums keep the scan linear per q.

    Raises:
        HypothesisError: the last terms are not dominant or L is not increasing
        CertificateError: neither case holds
    """
    x, y = [float(v) for v in x], [float(v) for v in y]
    n, m = len(x) - 1, len(y) - 1
    levels = _levels(schedule, max(n + m, 0))
    _check_selection_hypotheses(x, y, levels)

    prefix_max_x = np.maximum.accumulate([-math.inf, *x])
    prefix_max_y = np.maximum.accumulate([-math.inf, *y])
    prefix_sum_x = np.cumsum([0.0, *x])
    prefix_sum_y = np.cumsum([0.0, *y])
    for q in range(2, n + m + 1):
        for r in range(max(1, q - m), min(n, q - 1) + 1):
            s = q - r
            top = max(prefix_max_x[r], prefix_max_y[s])
            if (
                min(x[r], y[s]) > max(top, levels[q])
                and prefix_sum_x[r] + prefix_sum_y[s] <= q * levels[q - 1]
            ):
                return Case1(r, s)
    if x[0] > levels[0]:
        return Case2("x")
    if y[0] > levels[0]:
        return Case2("y")
    raise CertificateError(
        "no selection case holds", counterexample={"x": x, "y": y, "L": levels}
    )


@dataclass(frozen=True)
class SelectionOracle:
    """Every valid Case 1 pair and both Case 2 flags."""

    pairs: tuple[tuple[int, int], ...]
    case2_x: bool
    case2_y: bool

    @property
    def first_pair(self) -> tuple[int, int] | None:
        """Minimal pair by (r + s, r)."""
        return min(self.pairs, key=lambda p: (p[0] + p[1], p[0])) if self.pairs else None


def select_long_pair_oracle(
    x: Sequence[float], y: Sequence[float], schedule: ConstantSchedule | Sequence[float]
) -> SelectionOracle:
    """Exhaustive search over all (r, s)."""
    levels = _levels(schedule, len(x) + len(y) - 2)
    pairs = tuple(
        (r, s)
        for r in range(1, len(x))
        for s in range(1, len(y))
        if _case1_holds(x, y, levels, r, s)
    )
    return SelectionOracle(pairs, x[0] > levels[0], y[0] > levels[0])


# -------------------------------------------------------------------------
# Short cuts
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class ShortCutCertificate:
    """Points e on E1 and f on E2 whose connecting arc saves more than Delta.

    Everything re-checks from the stored points with dist alone.
    """

    e1: HPoint
    e2: HPoint
    e: HPoint
    f: HPoint
    d_e_e1: float
    d_f_e2: float
    d_e_f: float
    delta: float
    big_delta: float
    lbar: float
    edges: tuple[int, int] | None = None

    @property
    def gain(self) -> float:
        """min(d(e, e1), d(f, e2)) - d(e, f)."""
        return min(self.d_e_e1, self.d_f_e2) - self.d_e_f

    def failures(self) -> list[str]:
        """Inequalities that do not hold when recomputed from the points."""
        d_e_e1 = dist(self.e, self.e1)
        d_f_e2 = dist(self.f, self.e2)
        d_e_f = dist(self.e, self.f)
        checks = {
            "d(e,f) < d(e,e1) - Delta": d_e_f < d_e_e1 - self.big_delta,
            "d(e,f) < d(f,e2) - Delta": d_e_f < d_f_e2 - self.big_delta,
            "d(e,e1) < lbar/3": d_e_e1 < self.lbar / 3.0,
            "d(f,e2) < lbar/3": d_f_e2 < self.lbar / 3.0,
            "stored distances": max(
                abs(d_e_e1 - self.d_e_e1), abs(d_f_e2 - self.d_f_e2), abs(d_e_f - self.d_e_f)
            )
            <= TOL_IDENTITY,
        }
        return [name for name, ok in checks.items() if not ok]

    def verify(self) -> bool:
        """Return True if every inequality holds."""
        return not self.failures()

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "e1": self.e1.to_dict(),
            "e2": self.e2.to_dict(),
            "e": self.e.to_dict(),
            "f": self.f.to_dict(),
            "d_e_e1": self.d_e_e1,
            "d_f_e2": self.d_f_e2,
            "d_e_f": self.d_e_f,
            "gain": self.gain,
            "delta": self.delta,
            "Delta": self.big_delta,
            "lbar": self.lbar,
            "edges": list(self.edges) if self.edges else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ShortCutCertificate:
        """Create a certificate from its dictionary representation."""
        try:
            return cls(
                e1=HPoint.from_dict(data["e1"]),
                e2=HPoint.from_dict(data["e2"]),
                e=HPoint.from_dict(data["e"]),
                f=HPoint.from_dict(data["f"]),
                d_e_e1=float(data["d_e_e1"]),
                d_f_e2=float(data["d_f_e2"]),
                d_e_f=float(data["d_e_f"]),
                delta=float(data["delta"]),
                big_delta=float(data["Delta"]),
                lbar=float(data["lbar"]),
                edges=tuple(data["edges"]) if data.get("edges") else None,
            )
        except (KeyError, TypeError, ValueError, GeometryError) as err:
            raise DataError(f"malformed certificate: {err}") from err


def _nearest_point(point: HPoint, segment: GeodesicSegment) -> HPoint:
    """Closed-form nearest point of a segment."""
    y = point.lift
    a, v = segment.start.lift, segment.tangent
    big_a = -lorentz(y, a)
    big_b = -lorentz(y, v)
    ratio = min(max(-big_b / big_a, -1.0 + 1e-16), 1.0 - 1e-16)
    t = min(max(math.atanh(ratio), 0.0), segment.length)
    return segment.point_at(t)


def _contained_in_w(segment: GeodesicSegment) -> bool:
    return (
        horoball_contains(segment.start).status is not Containment.OUTSIDE
        and W.segment_exit(segment) is None
    )


def short_cut(
    seg_a: GeodesicSegment,
    seg_b: GeodesicSegment,
    delta: float,
    big_delta: float = DEFAULT_DELTA,
    edges: tuple[int, int] | None = None,
) -> ShortCutCertificate:
    """Construct the short-cut points e on A and f on B.

    x and y sit on the rays from 0 toward the far endpoints at distance
    delta + 5 Delta; e and f are their nearest points on A and B.

    Raises:
        HypothesisError: a start is outside the closed delta-ball, a segment
            leaves W, or a segment is shorter than lbar(delta)
        CertificateError: the constructed certificate does not verify
    """
    threshold = lbar(delta, big_delta)
    origin = HPoint.origin()
    for name, seg in (("A", seg_a), ("B", seg_b)):
        if dist(origin, seg.start) > delta + TOL_CONSTRUCTION:
            raise HypothesisError(f"{name} starts outside the ball of radius {delta}")
        if not _contained_in_w(seg):
            raise HypothesisError(f"{name} is not contained in W")
        if seg.length < threshold:
            raise HypothesisError(f"|{name}| = {seg.length:.6g} is below lbar = {threshold:.6g}")

    radius = delta + 5.0 * big_delta
    x = exp_map(origin, seg_a.far_direction, radius)
    y = exp_map(origin, seg_b.far_direction, radius)
    e = _nearest_point(x, seg_a)
    f = _nearest_point(y, seg_b)
    cert = ShortCutCertificate(
        e1=seg_a.start,
        e2=seg_b.start,
        e=e,
        f=f,
        d_e_e1=dist(e, seg_a.start),
        d_f_e2=dist(f, seg_b.start),
        d_e_f=dist(e, f),
        delta=delta,
        big_delta=big_delta,
        lbar=threshold,
        edges=edges,
    )
    failed = cert.failures()
    if failed:
        raise CertificateError(
            f"short-cut certificate failed: {', '.join(failed)}",
            counterexample={
                "A": seg_a.to_dict(),
                "B": seg_b.to_dict(),
                "delta": delta,
                "Delta": big_delta,
            },
        )
    return cert


@dataclass(frozen=True)
class LengthReduction:
    """Carrier length before and after replacing [e1, e] by the short cut [e, f]."""

    before: float
    removed: float
    added: float
    big_delta: float

    @classmethod
    def from_certificate(cls, cert: ShortCutCertificate, carrier_length: float) -> LengthReduction:
        """Bookkeeping for one short cut."""
        if carrier_length < cert.d_e_e1:
            raise HypothesisError("carrier is shorter than the piece being removed")
        return cls(carrier_length, cert.d_e_e1, cert.d_e_f, cert.big_delta)

    @property
    def after(self) -> float:
        """Length after the cut-and-paste."""
        return self.before - self.removed + self.added

    @property
    def reduction(self) -> float:
        """Length saved."""
        return self.removed - self.added

    def verify(self) -> bool:
        """The saving exceeds Delta."""
        return self.reduction > self.big_delta and self.after < self.before - self.big_delta

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "before": self.before,
            "after": self.after,
            "removed": self.removed,
            "added": self.added,
            "reduction": self.reduction,
            "Delta": self.big_delta,
        }


def selection_window_radius(n: int, schedule: ConstantSchedule) -> float:
    """(3n - 3) L(3n - 4): radius holding the inner endpoints of the innermost long pair."""
    m = edge_count(n)
    return m * schedule(m - 1)


# -------------------------------------------------------------------------
# Trichotomy
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class Escape:
    """Outcome: the path leaves W."""

    witness: EscapeWitness
    selection: Case1 | Case2

    def verify(self) -> bool:
        """Re-check the witness."""
        return self.witness.verify()

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "outcome": "escape",
            "witness": self.witness.to_dict(),
            "selection": self.selection.to_dict(),
        }


@dataclass(frozen=True)
class ShortCut:
    """Outcome: two long edges admit a short cut."""

    certificate: ShortCutCertificate
    selection: Case1

    def verify(self) -> bool:
        """Re-check the certificate."""
        return self.certificate.verify()

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "outcome": "shortcut",
            "certificate": self.certificate.to_dict(),
            "selection": self.selection.to_dict(),
        }


def origin_vertex(path: Geodesic120Path) -> int | None:
    """Index of the vertex at the origin, if any."""
    origin = HPoint.origin()
    for i, v in enumerate(path.vertices):
        if v is not None and dist(v, origin) <= TOL_IDENTITY:
            return i
    return None


def outward_sequences(path: Geodesic120Path, a_idx: int, b_idx: int, j: int) -> tuple[list[float], list[float]]:
    """Edge lengths read from the origin vertex j toward A (ending with |A|) and toward B."""
    x = [path.lengths[i] for i in range(j - 1, a_idx - 1, -1)]
    y = [path.lengths[i] for i in range(j, b_idx + 1)]
    return x, y


def trichotomy(
    path: Geodesic120Path,
    a_idx: int,
    b_idx: int,
    schedule: ConstantSchedule,
) -> Escape | ShortCut:
    """Either the path leaves W or two long edges admit a short cut.

    The origin must be a vertex strictly between edges A and B. Embeddedness
    is the caller's responsibility.

    Raises:
        HypothesisError: the window or lengths violate the hypotheses
        CertificateError: neither branch produced a valid certificate
    """
    j = origin_vertex(path)
    if j is None or not a_idx < j <= b_idx:
        raise HypothesisError("the origin must be a vertex between A and B")
    k = b_idx - a_idx - 1
    window = SegmentWindow(a_idx + 1, b_idx)
    if k > 0:
        window.validate(path)
    level = schedule(k)
    if path.lengths[a_idx] <= level or path.lengths[b_idx] <= level:
        raise HypothesisError(f"A and B must be longer than L({k}) = {level:.6g}")
    if any(path.lengths[i] > level for i in window.edges()):
        raise HypothesisError(f"window edges must not exceed L({k})")

    x, y = outward_sequences(path, a_idx, b_idx, j)
    selection = select_long_pair(x, y, schedule)
    counterexample = {"path": path.to_dict(), "A": a_idx, "B": b_idx}

    if isinstance(selection, Case2):
        first = j - 1 if selection.side == "x" else j
        other = j if selection.side == "x" else j - 1
        for edge in (first, other):
            witness = _segment_escape(path.outward_segment(edge, j), edge)
            if witness is not None:
                return Escape(witness, selection)
        # both edges at the origin stay inside W; any escaping edge still certifies
        found = escapes_horoball(path)
        if isinstance(found, EscapeWitness):
            return Escape(found, selection)
        raise CertificateError("long first edge stays inside W", counterexample)

    i1, i2 = j - 1 - selection.r, j + selection.s
    inner1, inner2 = j - selection.r, j + selection.s
    radius = selection.q * schedule(selection.q - 1)
    origin = HPoint.origin()
    d1 = dist(origin, path.vertex(inner1))
    d2 = dist(origin, path.vertex(inner2))
    if max(d1, d2) > radius * (1.0 + TOL_CONSTRUCTION):
        raise CertificateError("inner endpoints lie outside the selection radius", counterexample)

    seg1 = path.outward_segment(i1, inner1)
    seg2 = path.outward_segment(i2, inner2)
    for edge, seg in ((i1, seg1), (i2, seg2)):
        witness = _segment_escape(seg, edge)
        if witness is not None:
            return Escape(witness, selection)
    try:
        cert = short_cut(seg1, seg2, max(d1, d2), schedule.big_delta, edges=(i1, i2))
    except HypothesisError as err:
        raise CertificateError(f"short cut preconditions failed: {err}", counterexample) from err
    return ShortCut(cert, selection)

"""Hyperbolic 3-space primitives.

Points carry a hyperboloid lift (Lorentz form -x0*y0 + x1*y1 + x2*y2 + x3*y3) and
expose Poincare ball coordinates on demand. Isometries, frames and segments live
on the hyperboloid; the ball is used for horoball tests, directions and output.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
from scipy import integrate, optimize
from scipy.spatial.transform import Rotation

from ..const import (
    BALL_EDGE_TOL,
    HOROBALL_BAND,
    MAX_HYPERBOLIC_ARGUMENT,
    SEGMENT_SEARCH_CAP,
    TOL_CONSTRUCTION,
    TOL_IDENTITY,
    UNIT_TOL,
)
from ..errors import (
    DataError,
    DegenerateDirectionError,
    GeometryError,
    HyperbolicRangeError,
)

_LOGGER = logging.getLogger(__name__)

LN2 = math.log(2.0)
J = np.diag([-1.0, 1.0, 1.0, 1.0])


# -------------------------------------------------------------------------
# Lorentz algebra
# -------------------------------------------------------------------------


def lorentz(x: np.ndarray, y: np.ndarray) -> float:
    """Return the Lorentz inner product of two 4-vectors."""
    return float(-x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3])


def _lorentz_rows(xs: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Lorentz products of each row of ``xs`` with ``y``."""
    return -xs[..., 0] * y[0] + xs[..., 1:] @ y[1:]


def log_sinh(t: float) -> float:
    """log(sinh t) for t > 0 without overflow."""
    if t < 20.0:
        return math.log(math.sinh(t))
    return t - LN2 + math.log1p(-math.exp(-2.0 * t))


def _advance(x: np.ndarray, v: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Move distance t along the geodesic through x with unit tangent v.

    Returns:
        The new position and the transported tangent
    """
    if abs(t) > MAX_HYPERBOLIC_ARGUMENT:
        raise HyperbolicRangeError(f"geodesic parameter {t:.6g} overflows cosh")
    ch, sh = math.cosh(t), math.sinh(t)
    y = ch * x + sh * v
    w = sh * x + ch * v
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(w))):
        raise HyperbolicRangeError("point left the representable range")
    return y, w


def _project_tangent(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Project a 4-vector onto the tangent space at x."""
    return v + lorentz(v, x) * x


def _normalize_tangent(v: np.ndarray) -> np.ndarray:
    norm_sq = lorentz(v, v)
    if not norm_sq > 0.0:
        raise DegenerateDirectionError("tangent vector has no length")
    return v / math.sqrt(norm_sq)


def tangent_from_ball(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Map a Euclidean direction in ball coordinates to a Lorentz tangent at x.

    The map is a linear isometry from R^3 onto the tangent space, so unit
    directions become Lorentz-unit tangents.
    """
    xs = x[1:]
    dot = float(xs @ w)
    return np.concatenate(([dot], w + xs * (dot / (1.0 + x[0]))))


def ball_from_tangent(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Inverse of tangent_from_ball."""
    return v[1:] - x[1:] * (v[0] / (1.0 + x[0]))


def _unit_direction(u: Any) -> np.ndarray:
    w = np.asarray(u, dtype=float)
    if w.shape != (3,) or not np.all(np.isfinite(w)):
        raise GeometryError("directions are finite 3-vectors")
    if abs(float(w @ w) - 1.0) > UNIT_TOL:
        raise GeometryError(f"direction {w.tolist()} is not a unit vector")
    return w / math.sqrt(float(w @ w))


# -------------------------------------------------------------------------
# Points
# -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HPoint:
    """A point of hyperbolic 3-space stored by its hyperboloid lift.

    The time component is recomputed from the spatial part, so the lift
    always has Lorentz self-product -1 to rounding.
    """

    lift: np.ndarray

    def __post_init__(self) -> None:
        """Validate and renormalize the lift."""
        x = np.asarray(self.lift, dtype=float)
        if x.shape != (4,) or not np.all(np.isfinite(x)):
            raise GeometryError("hyperboloid lifts are finite 4-vectors")
        xs = x[1:].copy()
        x0 = math.hypot(1.0, *xs)
        if not math.isfinite(x0):
            raise HyperbolicRangeError("point is beyond the representable range")
        arr = np.concatenate(([x0], xs))
        arr.setflags(write=False)
        object.__setattr__(self, "lift", arr)

    @classmethod
    def origin(cls) -> HPoint:
        """Return the center of the ball."""
        return cls(np.array([1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def from_lift(cls, x: Any) -> HPoint:
        """Build a point from a hyperboloid 4-vector."""
        return cls(np.asarray(x, dtype=float))

    @classmethod
    def from_ball(cls, b: Any) -> HPoint:
        """Build a point from Poincare ball coordinates.

        Raises:
            GeometryError: coordinates are not inside the unit ball
            HyperbolicRangeError: coordinates are within 1e-15 of the sphere
        """
        ball = np.asarray(b, dtype=float)
        if ball.shape != (3,) or not np.all(np.isfinite(ball)):
            raise GeometryError("ball coordinates are finite 3-vectors")
        r2 = float(ball @ ball)
        if r2 >= 1.0:
            raise GeometryError(f"{ball.tolist()} is not inside the unit ball")
        if math.sqrt(r2) > 1.0 - BALL_EDGE_TOL:
            raise HyperbolicRangeError(f"{ball.tolist()} is too close to the sphere")
        xs = 2.0 * ball / (1.0 - r2)
        return cls(np.concatenate(([0.0], xs)))

    @cached_property
    def ball(self) -> np.ndarray:
        """Return Poincare ball coordinates.

        Raises:
            HyperbolicRangeError: the point is too far out for ball coordinates
        """
        b = self.lift[1:] / (1.0 + self.lift[0])
        if math.hypot(*b) > 1.0 - BALL_EDGE_TOL:
            raise HyperbolicRangeError(
                f"point at distance {self.radius:.6g} has no ball coordinates"
            )
        b.setflags(write=False)
        return b

    @property
    def radius(self) -> float:
        """Hyperbolic distance from the origin."""
        return math.asinh(math.hypot(*self.lift[1:]))

    @property
    def is_ball_representable(self) -> bool:
        """Return True if ball coordinates are available."""
        try:
            self.ball
        except HyperbolicRangeError:
            return False
        return True

    def isclose(self, other: HPoint, tol: float = TOL_IDENTITY) -> bool:
        """Return True if the two points are within tol of each other."""
        return dist(self, other) <= tol

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        if self.is_ball_representable:
            return {"ball": [float(c) for c in self.ball]}
        return {"lift": [float(c) for c in self.lift]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> HPoint:
        """Create a point from its dictionary representation."""
        try:
            if "ball" in data:
                return cls.from_ball(data["ball"])
            return cls.from_lift(data["lift"])
        except (KeyError, TypeError, ValueError) as err:
            raise DataError(f"malformed point: {data!r}") from err

    def __repr__(self) -> str:
        """Return a short representation."""
        try:
            return f"HPoint(ball={np.array2string(self.ball, precision=6)})"
        except HyperbolicRangeError:
            return f"HPoint(lift={np.array2string(self.lift, precision=6)})"


@dataclass(frozen=True, eq=False)
class IdealPoint:
    """A point on the sphere at infinity."""

    direction: np.ndarray

    def __post_init__(self) -> None:
        """Validate the direction."""
        d = np.asarray(self.direction, dtype=float)
        if d.shape != (3,) or abs(math.sqrt(float(d @ d)) - 1.0) > TOL_CONSTRUCTION:
            raise GeometryError("ideal points are unit 3-vectors")
        d = d / math.sqrt(float(d @ d))
        d.setflags(write=False)
        object.__setattr__(self, "direction", d)

    @property
    def null_vector(self) -> np.ndarray:
        """Future-pointing null vector representing this ideal point."""
        return np.concatenate(([1.0], self.direction))

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {"direction": [float(c) for c in self.direction]}


BASEPOINT = IdealPoint(np.array([-1.0, 0.0, 0.0]))


# -------------------------------------------------------------------------
# Metric and directions
# -------------------------------------------------------------------------


def dist(p: HPoint, q: HPoint) -> float:
    """Return the hyperbolic distance between two points."""
    x, y = p.lift, q.lift
    cosh_d = -lorentz(x, y)
    if not math.isfinite(cosh_d):
        raise HyperbolicRangeError("distance overflows double precision")
    if cosh_d < 2.0:
        diff = x - y
        return 2.0 * math.asinh(0.5 * math.sqrt(max(lorentz(diff, diff), 0.0)))
    return math.acosh(cosh_d)


def _log_tangent(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Unit tangent at x pointing toward y."""
    diff = y - x
    # 1 + <x, y> = -<y - x, y - x> / 2 keeps nearby points accurate
    v = diff - 0.5 * lorentz(diff, diff) * x
    norm_sq = lorentz(v, v)
    if not norm_sq > 0.0:
        raise DegenerateDirectionError("direction between coincident points")
    return v / math.sqrt(norm_sq)


def log_map(p: HPoint, q: HPoint) -> np.ndarray:
    """Return the unit ball-coordinate direction at p of the geodesic toward q.

    Raises:
        DegenerateDirectionError: q coincides with p
    """
    w = ball_from_tangent(p.lift, _log_tangent(p.lift, q.lift))
    return w / math.sqrt(float(w @ w))


def exp_map(p: HPoint, u: Any, t: float) -> HPoint:
    """Move distance t from p in the unit ball-coordinate direction u.

    Raises:
        GeometryError: u is not a unit vector or t is negative
        HyperbolicRangeError: the endpoint cannot be represented
    """
    if t < 0.0:
        raise GeometryError(f"geodesic length must be nonnegative, got {t}")
    v = tangent_from_ball(p.lift, _unit_direction(u))
    y, _ = _advance(p.lift, v, t)
    return HPoint(y)


def angle_between_tangents(v1: np.ndarray, v2: np.ndarray) -> float:
    """Angle between two unit tangents at the same point."""
    diff = v1 - v2
    total = v1 + v2
    return 2.0 * math.atan2(
        math.sqrt(max(lorentz(diff, diff), 0.0)),
        math.sqrt(max(lorentz(total, total), 0.0)),
    )


def angle(p: HPoint, q1: HPoint, q2: HPoint) -> float:
    """Return the angle at p between the geodesics [p, q1] and [p, q2].

    Raises:
        DegenerateDirectionError: q1 or q2 coincides with p
    """
    v1 = _log_tangent(p.lift, q1.lift)
    v2 = _log_tangent(p.lift, q2.lift)
    return angle_between_tangents(v1, v2)


def ideal_endpoint(p: HPoint, u: Any) -> IdealPoint:
    """Return the ideal endpoint of the ray from p in ball direction u."""
    v = tangent_from_ball(p.lift, _unit_direction(u))
    null = p.lift + v
    return IdealPoint(null[1:] / null[0])


def ideal_direction(p: HPoint, ideal: IdealPoint) -> np.ndarray:
    """Unit ball direction at p of the ray ending at an ideal point."""
    v = _normalize_tangent(_project_tangent(p.lift, ideal.null_vector))
    w = ball_from_tangent(p.lift, v)
    return w / math.sqrt(float(w @ w))


def chord_distance(rho: float, phi: float) -> float:
    """Distance between two points at distance rho from 0 separated by angle phi.

    Equivalent to cosh d = cosh^2 rho - sinh^2 rho cos phi.
    """
    phi = min(max(phi, 0.0), math.pi)
    s = math.sin(0.5 * phi)
    if s == 0.0 or rho == 0.0:
        return 0.0
    if rho < 350.0:
        return 2.0 * math.asinh(math.sinh(rho) * s)
    log_x = log_sinh(rho) + math.log(s)
    if log_x > 350.0:
        return 2.0 * (log_x + LN2)
    return 2.0 * math.asinh(math.exp(log_x))


def ray_exit_length(theta: float) -> float:
    """Length after which the ray from 0 at angle theta to the basepoint leaves W.

    Equal to ln((1 + cos theta) / (1 - cos theta)), written as -2 ln tan(theta/2)
    to stay accurate near theta = 0.
    """
    if theta <= 0.0:
        return math.inf
    if theta >= 0.5 * math.pi:
        return 0.0
    return -2.0 * math.log(math.tan(0.5 * theta))


def line_element_distance(p: HPoint, q: HPoint) -> float:
    """Integrate the ball line element 2|db| / (1 - |b|^2) along the geodesic.

    Independent check of dist; both points must have ball coordinates.
    """
    length = dist(p, q)
    if length == 0.0:
        return 0.0
    a = p.lift
    v = _log_tangent(p.lift, q.lift)

    def speed(tau: float) -> float:
        t = tau * length
        ch, sh = math.cosh(t), math.sinh(t)
        x = ch * a + sh * v
        dx = length * (sh * a + ch * v)
        b = x[1:] / (1.0 + x[0])
        db = dx[1:] / (1.0 + x[0]) - x[1:] * dx[0] / (1.0 + x[0]) ** 2
        return 2.0 * math.sqrt(float(db @ db)) / (1.0 - float(b @ b))

    value, _ = integrate.quad(speed, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    return value


def plane_residual(points: list[HPoint]) -> float:
    """Distance of a point set from the nearest totally geodesic plane.

    Measured as the smallest singular value of the normalized lifts; zero
    for three or fewer points.
    """
    if len(points) < 4:
        return 0.0
    rows = np.array([pt.lift / np.linalg.norm(pt.lift) for pt in points])
    return float(np.linalg.svd(rows, compute_uv=False)[3])


# -------------------------------------------------------------------------
# Isometries
# -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LorentzIsometry:
    """An orientation preserving isometry given by a 4x4 Lorentz matrix."""

    matrix: np.ndarray

    @classmethod
    def identity(cls) -> LorentzIsometry:
        """Return the identity."""
        return cls(np.eye(4))

    @classmethod
    def rotation(cls, rot: np.ndarray) -> LorentzIsometry:
        """Rotation about the origin by a 3x3 orthogonal matrix."""
        m = np.eye(4)
        m[1:, 1:] = rot
        return cls(m)

    @classmethod
    def boost(cls, direction: Any, rapidity: float) -> LorentzIsometry:
        """Translation by `rapidity` along the geodesic through 0 in `direction`."""
        n = _unit_direction(direction)
        ch, sh = math.cosh(rapidity), math.sinh(rapidity)
        m = np.eye(4)
        m[0, 0] = ch
        m[0, 1:] = sh * n
        m[1:, 0] = sh * n
        m[1:, 1:] += (ch - 1.0) * np.outer(n, n)
        return cls(m)

    @classmethod
    def parabolic(cls, s2: float, s3: float, basepoint: IdealPoint = BASEPOINT) -> LorentzIsometry:
        """Null rotation fixing `basepoint` and every horosphere centered there.

        Only the canonical basepoint (-1, 0, 0) is supported, with (s2, s3) the
        translation along the horosphere in the y and z directions.
        """
        xi = basepoint.null_vector
        s = np.array([0.0, 0.0, s2, s3])
        m = (
            np.eye(4)
            + np.outer(s, J @ xi)
            - np.outer(xi, J @ s)
            - 0.5 * (s2 * s2 + s3 * s3) * np.outer(xi, J @ xi)
        )
        return cls(m)

    @classmethod
    def random(cls, rng: np.random.Generator, max_rapidity: float = 3.0) -> LorentzIsometry:
        """Random boost composed with a uniformly random rotation."""
        rot = Rotation.random(None, rng).as_matrix()
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        boost = cls.boost(direction, float(rng.uniform(0.0, max_rapidity)))
        return boost.compose(cls.rotation(rot))

    @classmethod
    def random_fixing_basepoint(cls, rng: np.random.Generator, scale: float = 2.0) -> LorentzIsometry:
        """Random isometry preserving W: a rotation about its axis then a null rotation."""
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
        rot = np.array(
            [
                [1.0, 0.0, 0.0],
                [0.0, math.cos(phi), -math.sin(phi)],
                [0.0, math.sin(phi), math.cos(phi)],
            ]
        )
        s2, s3 = rng.uniform(-scale, scale, size=2)
        return cls.parabolic(float(s2), float(s3)).compose(cls.rotation(rot))

    def compose(self, other: LorentzIsometry) -> LorentzIsometry:
        """Return self after other."""
        return LorentzIsometry(self.matrix @ other.matrix)

    def inverse(self) -> LorentzIsometry:
        """Return the inverse isometry (J M^T J)."""
        return LorentzIsometry(J @ self.matrix.T @ J)

    def apply(self, p: HPoint) -> HPoint:
        """Image of a point."""
        return HPoint(self.matrix @ p.lift)

    def apply_tangent(self, v: np.ndarray) -> np.ndarray:
        """Image of a tangent 4-vector."""
        return self.matrix @ v


# -------------------------------------------------------------------------
# Horoball W
# -------------------------------------------------------------------------


class Containment(enum.StrEnum):
    """Classification of a point against the horoball."""

    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class HoroballMembership:
    """Classification plus the signed ball-coordinate margin |p|^2 - xi.p."""

    status: Containment
    margin: float


@dataclass(frozen=True)
class Horoball:
    """Horoball at `basepoint` whose boundary passes through the origin.

    For the canonical basepoint (-1, 0, 0) this is W, the Euclidean ball of
    radius 1/2 centered at (-1/2, 0, 0).
    """

    basepoint: IdealPoint = BASEPOINT
    band: float = HOROBALL_BAND

    def busemann(self, p: HPoint) -> float:
        """Busemann function normalized to vanish on the boundary; negative inside."""
        x = p.lift
        return math.log(x[0] - float(self.basepoint.direction @ x[1:]))

    def margin(self, p: HPoint) -> float:
        """Signed margin |b|^2 - xi.b computed from the lift."""
        x = p.lift
        pairing = x[0] - float(self.basepoint.direction @ x[1:])
        return (pairing - 1.0) / (x[0] + 1.0)

    def classify(self, p: HPoint) -> HoroballMembership:
        """Classify a point with the +-band boundary tolerance."""
        m = self.margin(p)
        if m > self.band:
            status = Containment.OUTSIDE
        elif m < -self.band:
            status = Containment.INSIDE
        else:
            status = Containment.BOUNDARY
        return HoroballMembership(status, m)

    def busemann_along(self, segment: GeodesicSegment, t: float) -> float:
        """Busemann value at parameter t of a segment, in the log domain."""
        alpha, beta = self._pairing_coefficients(segment)
        terms = []
        if alpha > 0.0:
            terms.append(math.log(alpha) + t)
        if beta > 0.0:
            terms.append(math.log(beta) - t)
        if not terms:
            raise GeometryError("segment lies on a line through the basepoint")
        return float(np.logaddexp.reduce(terms))

    def _pairing_coefficients(self, segment: GeodesicSegment) -> tuple[float, float]:
        """Coefficients (alpha, beta) with x0 - xi.xs = alpha e^t + beta e^-t."""
        xi = self.basepoint.direction
        a, v = segment.start.lift, segment.tangent
        big_p = a[0] - float(xi @ a[1:])
        big_q = v[0] - float(xi @ v[1:])
        return 0.5 * (big_p + big_q), 0.5 * (big_p - big_q)

    def segment_exit(self, segment: GeodesicSegment) -> float | None:
        """First parameter beyond which the segment is classified outside.

        The margin condition along a geodesic is a quadratic in u = e^t,
        p u^2 - r u + q > 0, so the exit is found in closed form and compared
        in the log domain.

        Returns:
            0.0 if the start is already outside, the exit parameter, or None
            if the whole segment stays inside or on the boundary band
        """
        alpha, beta = self._pairing_coefficients(segment)
        a, v = segment.start.lift, segment.tangent
        gamma, eta = 0.5 * (a[0] + v[0]), 0.5 * (a[0] - v[0])
        p = alpha - self.band * gamma
        q = beta - self.band * eta
        r = 1.0 + self.band
        if p + q - r > 0.0:
            return 0.0
        if p <= 0.0:
            return None
        disc = math.sqrt(max(r * r - 4.0 * p * q, 0.0))
        t_exit = math.log(r + disc) - math.log(2.0 * p)
        if t_exit >= segment.length:
            return None
        return max(t_exit, 0.0)


W = Horoball()


def horoball_contains(p: HPoint) -> HoroballMembership:
    """Classify a point against the canonical horoball W."""
    return W.classify(p)


def busemann(p: HPoint) -> float:
    """Busemann function of W, zero on its boundary and negative inside."""
    return W.busemann(p)


# -------------------------------------------------------------------------
# Segments
# -------------------------------------------------------------------------


def _default_tangent(x: np.ndarray) -> np.ndarray:
    for axis in range(1, 4):
        e = np.zeros(4)
        e[axis] = 1.0
        v = _project_tangent(x, e)
        if lorentz(v, v) > 0.1:
            return _normalize_tangent(v)
    raise GeometryError("no tangent direction found")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class GeodesicSegment:
    """Geodesic segment stored as start point, unit tangent and length.

    The far endpoint is derived lazily, so segments longer than the ball
    representable range remain usable near their start.
    """

    start: HPoint
    tangent: np.ndarray
    length: float

    def __post_init__(self) -> None:
        """Validate the tangent and length."""
        if not (self.length >= 0.0 and math.isfinite(self.length)):
            raise GeometryError(f"segment length must be finite and >= 0, got {self.length}")
        x = self.start.lift
        v = np.asarray(self.tangent, dtype=float)
        scale = max(1.0, x[0]) ** 2
        if abs(lorentz(v, x)) > TOL_IDENTITY * scale or abs(lorentz(v, v) - 1.0) > TOL_IDENTITY * scale:
            raise GeometryError("segment tangent is not a unit tangent at its start")
        v = _normalize_tangent(_project_tangent(x, v))
        v.setflags(write=False)
        object.__setattr__(self, "tangent", v)

    @classmethod
    def between(cls, p: HPoint, q: HPoint) -> GeodesicSegment:
        """Segment from p to q; coincident points give a zero-length segment."""
        length = dist(p, q)
        try:
            v = _log_tangent(p.lift, q.lift)
        except DegenerateDirectionError:
            v = _default_tangent(p.lift)
            length = 0.0
        return cls(p, v, length)

    @classmethod
    def from_direction(cls, p: HPoint, u: Any, length: float) -> GeodesicSegment:
        """Segment from p in ball direction u."""
        return cls(p, tangent_from_ball(p.lift, _unit_direction(u)), float(length))

    def point_at(self, t: float) -> HPoint:
        """Point at distance t from the start."""
        y, _ = _advance(self.start.lift, self.tangent, t)
        return HPoint(y)

    def tangent_at(self, t: float) -> np.ndarray:
        """Transported unit tangent at parameter t."""
        _, w = _advance(self.start.lift, self.tangent, t)
        return w

    @cached_property
    def end(self) -> HPoint:
        """Far endpoint (HyperbolicRangeError when not representable)."""
        return self.point_at(self.length)

    @property
    def direction(self) -> np.ndarray:
        """Unit ball direction at the start."""
        w = ball_from_tangent(self.start.lift, self.tangent)
        return w / math.sqrt(float(w @ w))

    @property
    def far_direction(self) -> np.ndarray:
        """Euclidean direction from the origin to the far endpoint.

        Uses end / cosh(length) so it is available for any length.
        """
        a, v = self.start.lift, self.tangent
        w = a[1:] + math.tanh(self.length) * v[1:]
        norm = math.sqrt(float(w @ w))
        if norm == 0.0:
            raise DegenerateDirectionError("far endpoint is the origin")
        return w / norm

    def reversed(self) -> GeodesicSegment:
        """The same segment traversed from its end."""
        return GeodesicSegment(self.end, -self.tangent_at(self.length), self.length)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        data: dict[str, Any] = {
            "start": self.start.to_dict(),
            "direction": [float(c) for c in self.direction],
            "length": float(self.length),
        }
        try:
            data["end"] = self.end.to_dict()
        except HyperbolicRangeError:
            pass
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GeodesicSegment:
        """Create a segment from its dictionary representation."""
        try:
            start = HPoint.from_dict(data["start"])
            if "direction" in data:
                return cls.from_direction(start, data["direction"], float(data["length"]))
            return cls.between(start, HPoint.from_dict(data["end"]))
        except (KeyError, TypeError, ValueError, GeometryError) as err:
            raise DataError(f"malformed segment: {err}") from err


def _point_segment_distance(y: np.ndarray, segment: GeodesicSegment) -> float:
    """Closed-form distance from a lifted point to a segment.

    cosh d(t) = A cosh t + B sinh t is minimized at tanh t = -B/A.
    """
    a, v = segment.start.lift, segment.tangent
    big_a = -lorentz(y, a)
    big_b = -lorentz(y, v)
    t = min(max(math.atanh(max(min(-big_b / big_a, 1.0 - 1e-16), -1.0 + 1e-16)), 0.0), segment.length)
    if t < 40.0:
        z, _ = _advance(a, v, t)
        diff = y - z
        cosh_d = -lorentz(y, z)
        if cosh_d < 2.0:
            return 2.0 * math.asinh(0.5 * math.sqrt(max(lorentz(diff, diff), 0.0)))
        return math.acosh(cosh_d)
    log_cosh = float(
        np.logaddexp(
            math.log(max(big_a + big_b, 1e-300)) + t,
            math.log(max(big_a - big_b, 1e-300)) - t,
        )
        - LN2
    )
    if log_cosh > 700.0:
        return log_cosh + LN2
    return math.acosh(max(math.exp(log_cosh), 1.0))


def point_segment_distance(p: HPoint, segment: GeodesicSegment) -> float:
    """Distance from a point to a geodesic segment."""
    return _point_segment_distance(p.lift, segment)


def segment_distance(s1: GeodesicSegment, s2: GeodesicSegment) -> float:
    """Minimum distance between two segments.

    The distance from a point moving along s1 to s2 is convex, so a bounded
    scalar search over s1 (with both endpoints checked) finds the minimum.

    Raises:
        HyperbolicRangeError: the closest approach lies beyond the part of a
            very long segment that can be sampled
    """
    upper = min(s1.length, SEGMENT_SEARCH_CAP)

    def gap(s: float) -> float:
        return _point_segment_distance(s1.point_at(s).lift, s2)

    best = min(gap(0.0), gap(upper))
    if upper > 0.0:
        res = optimize.minimize_scalar(
            gap, bounds=(0.0, upper), method="bounded", options={"xatol": 1e-12}
        )
        best = min(best, float(res.fun))
    if s1.length > upper and gap(upper) < gap(upper - 1e-3):
        raise HyperbolicRangeError("closest approach of the segments is out of range")
    return best


def _van_der_corput(count: int) -> np.ndarray:
    """Nested sample fractions 0, 1, 1/2, 1/4, 3/4, 1/8, ..."""
    values = [0.0, 1.0][:count]
    for k in range(1, count - 1):
        x, denom, n = 0.0, 1.0, k
        while n:
            denom *= 2.0
            x += (n & 1) / denom
            n >>= 1
        values.append(x)
    return np.array(values)


def _points_to_segment(ys: np.ndarray, segment: GeodesicSegment) -> np.ndarray:
    """Vectorized closed-form distances from lifted points to a segment."""
    a, v = segment.start.lift, segment.tangent
    big_a = -_lorentz_rows(ys, a)
    big_b = -_lorentz_rows(ys, v)
    ratio = np.clip(-big_b / big_a, -1.0 + 1e-16, 1.0 - 1e-16)
    t = np.clip(np.arctanh(ratio), 0.0, segment.length)
    zs = np.cosh(t)[:, None] * a + np.sinh(t)[:, None] * v
    diff = ys - zs
    sq = np.maximum(-diff[:, 0] ** 2 + np.sum(diff[:, 1:] ** 2, axis=1), 0.0)
    return 2.0 * np.arcsinh(0.5 * np.sqrt(sq))


def thin_triangle_gap(a: HPoint, b: HPoint, c: HPoint, samples: int = 17) -> float:
    """Largest sampled distance from a side of triangle abc to the other two sides.

    Side parameters follow a nested sequence, so the value never decreases as
    `samples` grows.
    """
    if samples < 2:
        raise GeometryError("thin_triangle_gap needs at least two samples per side")
    fractions = _van_der_corput(samples)
    sides = [
        GeodesicSegment.between(a, b),
        GeodesicSegment.between(b, c),
        GeodesicSegment.between(c, a),
    ]
    gap = 0.0
    for i, side in enumerate(sides):
        t = fractions * side.length
        xs = np.cosh(t)[:, None] * side.start.lift + np.sinh(t)[:, None] * side.tangent
        others = [sides[(i + 1) % 3], sides[(i + 2) % 3]]
        nearest = np.minimum(_points_to_segment(xs, others[0]), _points_to_segment(xs, others[1]))
        gap = max(gap, float(nearest.max()))
    return gap


# -------------------------------------------------------------------------
# Frames
# -------------------------------------------------------------------------


def _orthonormalize(x: np.ndarray, axes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Renormalize a position and Gram-Schmidt its axes in the Lorentz metric."""
    x = HPoint(x).lift
    out = []
    for v in axes:
        w = _project_tangent(x, np.array(v, dtype=float))
        for u in out:
            w = w - lorentz(w, u) * u
        out.append(_normalize_tangent(w))
    return np.array(x), np.array(out)


@dataclass(frozen=True, eq=False)
class Frame:
    """A point with an orthonormal triple of tangent 4-vectors.

    The first axis is the heading used by chain_frame.
    """

    position: HPoint
    axes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        """Validate orthonormality."""
        axes = np.asarray(self.axes, dtype=float)
        if axes.shape != (3, 4):
            raise GeometryError("a frame has three tangent 4-vectors")
        if np.max(np.abs(_gram(axes) - np.eye(3))) > TOL_IDENTITY:
            raise GeometryError("frame axes are not orthonormal")
        axes = axes.copy()
        axes.setflags(write=False)
        object.__setattr__(self, "axes", axes)

    @classmethod
    def standard(cls, position: HPoint | None = None) -> Frame:
        """Frame whose axes are the ball x, y and z directions."""
        position = position or HPoint.origin()
        return cls.from_directions(position, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])

    @classmethod
    def from_directions(cls, position: HPoint, heading: Any, second: Any) -> Frame:
        """Right-handed frame from a heading and a second ball direction."""
        d1 = np.asarray(heading, dtype=float)
        d1 = d1 / np.linalg.norm(d1)
        d2 = np.asarray(second, dtype=float)
        d2 = d2 - (d2 @ d1) * d1
        norm = np.linalg.norm(d2)
        if norm < TOL_CONSTRUCTION:
            raise DegenerateDirectionError("frame directions are parallel")
        d2 = d2 / norm
        d3 = np.cross(d1, d2)
        x = position.lift
        x, axes = _orthonormalize(x, [tangent_from_ball(x, d) for d in (d1, d2, d3)])
        return cls(HPoint(x), axes)

    @property
    def heading(self) -> np.ndarray:
        """First axis as a tangent 4-vector."""
        return self.axes[0]

    @property
    def directions(self) -> np.ndarray:
        """The three axes as ball directions."""
        x = self.position.lift
        rows = [ball_from_tangent(x, v) for v in self.axes]
        return np.array([r / np.linalg.norm(r) for r in rows])

    def gram(self) -> np.ndarray:
        """Lorentz Gram matrix of the axes."""
        return _gram(self.axes)

    def advance(self, t: float) -> Frame:
        """Parallel transport distance t along the heading (t may be negative)."""
        x, e1 = _advance(self.position.lift, self.axes[0], t)
        x, axes = _orthonormalize(x, [e1, self.axes[1], self.axes[2]])
        return Frame(HPoint(x), axes)

    def bend(self, bend: float, dihedral: float) -> Frame:
        """Turn the heading by pi - bend toward cos(dihedral) e2 + sin(dihedral) e3."""
        turn = math.pi - bend
        e1, e2, e3 = self.axes
        n = math.cos(dihedral) * e2 + math.sin(dihedral) * e3
        m = -math.sin(dihedral) * e2 + math.cos(dihedral) * e3
        new_e1 = math.cos(turn) * e1 + math.sin(turn) * n
        new_n = -math.sin(turn) * e1 + math.cos(turn) * n
        x, axes = _orthonormalize(self.position.lift, [new_e1, new_n, m])
        return Frame(HPoint(x), axes)

    def unbend(self, bend: float, dihedral: float) -> Frame:
        """Exact inverse of bend with the same arguments."""
        turn = math.pi - bend
        big_e, big_n, m = self.axes
        e1 = math.cos(turn) * big_e - math.sin(turn) * big_n
        n = math.sin(turn) * big_e + math.cos(turn) * big_n
        e2 = math.cos(dihedral) * n - math.sin(dihedral) * m
        e3 = math.sin(dihedral) * n + math.cos(dihedral) * m
        x, axes = _orthonormalize(self.position.lift, [e1, e2, e3])
        return Frame(HPoint(x), axes)

    def transform(self, isometry: LorentzIsometry) -> Frame:
        """Image of the frame under an isometry."""
        x = isometry.matrix @ self.position.lift
        x, axes = _orthonormalize(x, [isometry.matrix @ v for v in self.axes])
        return Frame(HPoint(x), axes)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation (ball directions)."""
        d = self.directions
        return {
            "position": self.position.to_dict(),
            "heading": [float(c) for c in d[0]],
            "normal": [float(c) for c in d[1]],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Frame:
        """Create a frame from its dictionary representation."""
        try:
            return cls.from_directions(
                HPoint.from_dict(data["position"]), data["heading"], data["normal"]
            )
        except (KeyError, TypeError, ValueError, GeometryError) as err:
            raise DataError(f"malformed frame: {err}") from err


def _gram(axes: np.ndarray) -> np.ndarray:
    return axes @ J @ axes.T


def chain_frame(f: Frame, t: float, bend: float, dihedral: float) -> Frame:
    """Advance a frame distance t, then turn it at the joint.

    Raises:
        GeometryError: t is not positive
    """
    if t <= 0.0:
        raise GeometryError(f"chain_frame needs a positive length, got {t}")
    return f.advance(t).bend(bend, dihedral)

"""Constants of the injectivity-radius bound: L0, Lbar, the schedule L(k) and R_n."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

from ..const import (
    DEFAULT_DELTA,
    LBAR_BISECT_TOL,
    LBAR_MAX_DOUBLINGS,
    LOG_DOMAIN_THRESHOLD,
    STRICT_EPS,
)
from ..errors import HypothesisError, ScheduleOverflowError
from .geometry import chord_distance, log_sinh
from .graphs import edge_count

_LOGGER = logging.getLogger(__name__)

LN2 = math.log(2.0)


def l0() -> float:
    """Exit length from W of a ray leaving 0 at angle pi/6 to the basepoint.

    pi/6 is the smallest angle two edges meeting at 120 degrees can both make
    with the axis while starting into W.
    """
    return 2.0 * math.log(2.0 + math.sqrt(3.0))


def phi_max(length: float, delta: float) -> float:
    """Largest angle at 0 between far endpoints of admissible segments of this length.

    Equal to 2 arccos(tanh((L - delta)/2)), evaluated as 4 atan(exp(-(L - delta)/2)).

    Raises:
        HypothesisError: length <= delta
    """
    if length <= delta:
        raise HypothesisError(f"phi_max needs L > delta, got L={length}, delta={delta}")
    return 4.0 * math.atan(math.exp(-0.5 * (length - delta)))


def _chord_margin(length: float, delta: float, big_delta: float) -> float:
    """log of chord_distance's sinh argument minus log sinh(Delta/2); negative when certified."""
    u = 0.5 * (length - delta)
    rho = delta + 5.0 * big_delta
    return (
        log_sinh(rho)
        + LN2
        - u
        - math.log1p(math.exp(-2.0 * u))
        - math.log(math.sinh(0.5 * big_delta))
    )


def _check_lbar_args(delta: float, big_delta: float) -> None:
    if not delta >= 0.0:
        raise HypothesisError(f"lbar needs delta >= 0, got {delta}")
    if not big_delta > 0.0:
        raise HypothesisError(f"lbar needs Delta > 0, got {big_delta}")


def short_cut_length(delta: float, big_delta: float = DEFAULT_DELTA) -> float:
    """Smallest L > 2(delta + Delta) with chord_distance(delta + 5 Delta, phi_max(L, delta)) < Delta.

    Found by doubling a bracket and bisecting; the returned value always
    satisfies the chord condition.
    """
    _check_lbar_args(delta, big_delta)
    lo = 2.0 * (delta + big_delta) + STRICT_EPS
    if _chord_margin(lo, delta, big_delta) < 0.0:
        return lo

    step = max(1.0, lo)
    hi = lo + step
    doublings = 0
    while _chord_margin(hi, delta, big_delta) >= 0.0:
        lo = hi
        step *= 2.0
        hi = lo + step
        doublings += 1
        if doublings > LBAR_MAX_DOUBLINGS or not math.isfinite(hi):
            raise ScheduleOverflowError(f"no bracket for lbar at delta={delta}")

    tol = LBAR_BISECT_TOL * max(1.0, lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _chord_margin(mid, delta, big_delta) < 0.0:
            hi = mid
        else:
            lo = mid
    _LOGGER.debug("lbar bracket at delta=%g: [%.12g, %.12g]", delta, lo, hi)
    return hi


def lbar(delta: float, big_delta: float = DEFAULT_DELTA) -> float:
    """Short-cut threshold 3 max(L2, 6 Delta + 2 delta).

    Raises:
        HypothesisError: delta < 0 or Delta <= 0
    """
    return 3.0 * max(short_cut_length(delta, big_delta), 6.0 * big_delta + 2.0 * delta)


def lbar_closed_form(delta: float, big_delta: float = DEFAULT_DELTA) -> float:
    """Closed form of L2 used to check the bisection.

    Solves sinh(rho) 2w / (1 + w^2) = sinh(Delta/2) with w = exp(-(L - delta)/2).
    """
    _check_lbar_args(delta, big_delta)
    rho = delta + 5.0 * big_delta
    log_k = math.log(math.sinh(0.5 * big_delta)) - log_sinh(rho)
    floor = 2.0 * (delta + big_delta) + STRICT_EPS
    if log_k >= 0.0:
        return floor
    if log_k < -30.0:
        neg_log_w = LN2 - log_k
    else:
        k = math.exp(log_k)
        neg_log_w = -math.log(k / (1.0 + math.sqrt(1.0 - k * k)))
    return max(floor, delta + 2.0 * neg_log_w)


def chord_certifies(length: float, delta: float, big_delta: float = DEFAULT_DELTA) -> bool:
    """Return True if chord_distance(delta + 5 Delta, phi_max(length, delta)) < Delta."""
    return chord_distance(delta + 5.0 * big_delta, phi_max(length, delta)) < big_delta


def two_long_edges_threshold(n: int, length: float) -> float:
    """Girth above which every closed reduced path has two edges of at least `length`."""
    return edge_count(n) ** 2 * length


# -------------------------------------------------------------------------
# Schedule
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class ScheduleEntry:
    """One L(k), kept in the log domain once the value passes 1e300."""

    k: int
    value: float
    log_value: float
    provenance: str
    log_domain: bool = False

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "k": self.k,
            "L": None if self.log_domain else self.value,
            "log_L": self.log_value,
            "provenance": self.provenance,
            "log_domain": self.log_domain,
        }


@dataclass
class ConstantSchedule:
    """L(0) = L0, L(1) = 2 L0, L(k) = lbar(k L(k-1)) for k >= 2."""

    big_delta: float
    entries: list[ScheduleEntry] = field(default_factory=list)

    @property
    def values(self) -> list[float]:
        """All L(k), inf for log-domain entries."""
        return [e.value for e in self.entries]

    @property
    def L0(self) -> float:  # noqa: N802
        """Return L(0)."""
        return self.entries[0].value

    @property
    def kmax(self) -> int:
        """Largest computed index."""
        return len(self.entries) - 1

    def __len__(self) -> int:
        """Number of entries."""
        return len(self.entries)

    def __call__(self, k: int) -> float:
        """Return L(k).

        Raises:
            ScheduleOverflowError: L(k) is only known in the log domain
        """
        entry = self.entries[k]
        if entry.log_domain:
            raise ScheduleOverflowError(f"L({k}) exceeds double range", report=self)
        return entry.value

    def log_value(self, k: int) -> float:
        """Return log L(k)."""
        return self.entries[k].log_value

    def is_log_domain(self, k: int) -> bool:
        """Return True if L(k) is kept only as a logarithm."""
        return self.entries[k].log_domain

    @property
    def has_log_domain(self) -> bool:
        """Return True if any entry switched to the log domain."""
        return any(e.log_domain for e in self.entries)

    def to_rows(self) -> list[dict[str, Any]]:
        """Rows (k, L, provenance) for CSV export."""
        return [
            {
                "k": e.k,
                "L": f"exp({e.log_value:.12g})" if e.log_domain else f"{e.value:.12g}",
                "provenance": e.provenance,
            }
            for e in self.entries
        ]

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "Delta": self.big_delta,
            "L": [e.to_dict() for e in self.entries],
        }


def schedule(kmax: int, big_delta: float = DEFAULT_DELTA) -> ConstantSchedule:
    """Compute L(0..kmax).

    Entries past 1e300 continue in the log domain using the asymptote
    lbar(x) ~ 9x; such entries are flagged instead of raising.
    """
    if kmax < 0:
        raise HypothesisError(f"schedule needs kmax >= 0, got {kmax}")
    result = ConstantSchedule(big_delta=big_delta)
    base = l0()
    result.entries.append(ScheduleEntry(0, base, math.log(base), "L0: exit length of the pi/6 ray"))
    if kmax >= 1:
        result.entries.append(ScheduleEntry(1, 2.0 * base, math.log(2.0 * base), "2*L(0)"))

    for k in range(2, kmax + 1):
        prev = result.entries[k - 1]
        if not prev.log_domain and k * prev.value <= LOG_DOMAIN_THRESHOLD:
            value = lbar(k * prev.value, big_delta)
            if value <= LOG_DOMAIN_THRESHOLD:
                result.entries.append(ScheduleEntry(k, value, math.log(value), "lbar(k*L(k-1))"))
                continue
        log_value = math.log(9.0 * k) + prev.log_value
        if not prev.log_domain:
            _LOGGER.warning("Schedule switches to the log domain at k=%d", k)
        result.entries.append(
            ScheduleEntry(k, math.inf, log_value, "log(9k) + log L(k-1)", log_domain=True)
        )
    return result


# -------------------------------------------------------------------------
# R_n
# -------------------------------------------------------------------------


@dataclass
class BoundReport:
    """The rank-n bound R_n = max(R, (3n-3) L(3n-4)) with R = [3(n-1)]^2 L(3(n-1))."""

    n: int
    log_R: float  # noqa: N815
    log_R_n: float  # noqa: N815
    schedule: ConstantSchedule
    sharp_R2: float | None = None  # noqa: N815
    log_domain: bool = False

    @property
    def R(self) -> float:  # noqa: N802
        """Two-long-edges threshold, inf when only its logarithm is known."""
        return math.inf if self.log_domain else math.exp(self.log_R)

    @property
    def R_n(self) -> float:  # noqa: N802
        """Final bound, inf when only its logarithm is known."""
        return math.inf if self.log_domain else math.exp(self.log_R_n)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            "n": self.n,
            "R": None if self.log_domain else self.R,
            "R_n": None if self.log_domain else self.R_n,
            "log_R": self.log_R,
            "log_R_n": self.log_R_n,
            "sharp_R2": self.sharp_R2,
            "log_domain": self.log_domain,
            "schedule": self.schedule.to_dict(),
        }


def r_n(n: int, big_delta: float = DEFAULT_DELTA) -> BoundReport:
    """Compute R and R_n for rank n.

    Raises:
        GraphError: n < 2
        ScheduleOverflowError: the bound passed double range; the log-domain
            report is attached
    """
    m = edge_count(n)
    sched = schedule(m, big_delta)
    log_r = 2.0 * math.log(m) + sched.log_value(m)
    log_inner = math.log(m) + sched.log_value(m - 1)
    report = BoundReport(
        n=n,
        log_R=log_r,
        log_R_n=max(log_r, log_inner),
        schedule=sched,
        sharp_R2=2.0 * l0() if n == 2 else None,
        log_domain=sched.has_log_domain,
    )
    if report.log_domain:
        raise ScheduleOverflowError(f"R_{n} exceeds double range", report=report)
    if report.R_n > LOG_DOMAIN_THRESHOLD:
        report.log_domain = True
        raise ScheduleOverflowError(f"R_{n} exceeds double range", report=report)
    return report

"""Fixtures for h3bound tests."""

from __future__ import annotations

import math

import pytest

from h3bound.helpers import Frame, Geodesic120Path, HPoint, schedule
from h3bound.helpers.bounds import ConstantSchedule

# Inner edge length for which a planar 120 degree path with four inner edges,
# centered at the origin, sends both outer edges exactly to the basepoint.
CAP_EDGE = math.log((2.0 + math.sqrt(13.0)) / 3.0)
CAP_OUTER = 2.0e5

ROOT3_2 = math.sqrt(3.0) / 2.0


def escape_heading(theta: float) -> list[float]:
    """Ball direction at angle theta from the ray toward the basepoint."""
    return [-math.cos(theta), math.sin(theta), 0.0]


@pytest.fixture(scope="session")
def schedule4() -> ConstantSchedule:
    """L(0..4) for the default Delta."""
    return schedule(4)


@pytest.fixture
def cap_anchor() -> Frame:
    """Frame at the origin heading 60 degrees off the basepoint axis, turning toward it."""
    return Frame.from_directions(HPoint.origin(), [-0.5, ROOT3_2, 0.0], [-ROOT3_2, -0.5, 0.0])


@pytest.fixture
def cap_path(cap_anchor: Frame) -> Geodesic120Path:
    """Two very long edges joined by four short ones, origin at vertex 3."""
    lengths = [CAP_OUTER, CAP_EDGE, CAP_EDGE, CAP_EDGE, CAP_EDGE, CAP_OUTER]
    return Geodesic120Path.build(lengths, [0.0] * 5, cap_anchor, 3)


@pytest.fixture
def crossing_path() -> Geodesic120Path:
    """Planar path that curls back through its first edge."""
    return Geodesic120Path.build(
        [0.5, 0.05, 0.05, 0.25, 0.25], [0.0] * 4, Frame.standard(), 0
    )


@pytest.fixture
def single_edge():
    """Factory for a one-edge path leaving the origin at angle theta."""

    def _build(theta: float, length: float) -> Geodesic120Path:
        anchor = Frame.from_directions(HPoint.origin(), escape_heading(theta), [0.0, 0.0, 1.0])
        return Geodesic120Path.build([length], [], anchor, 0)

    return _build

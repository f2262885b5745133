"""Disc-model SVG figures of paths, horoball and certificate points.

Ball coordinates are projected orthogonally onto a coordinate plane and
each edge is drawn as a sampled polyline, so the output does not depend on
the path being planar.
"""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from h3bound.const import (
    DEFAULT_PLANE,
    SVG_PLANES,
    SVG_RENDER_RADIUS,
    SVG_SAMPLES_PER_EDGE,
)
from h3bound.errors import DataError
from h3bound.helpers import (
    EscapeWitness,
    Geodesic120Path,
    GeodesicSegment,
    HPoint,
    ShortCutCertificate,
)

_LOGGER = logging.getLogger(__name__)

SCALE = 200.0
MARGIN = 20.0

PLANE_AXES = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}
HOROBALL_CENTER = np.array([-0.5, 0.0, 0.0])
HOROBALL_RADIUS = 0.5

COLOR_DISC = "#000000"
COLOR_HOROBALL = "#1f77b4"
COLOR_PATH = "#d62728"
COLOR_MARK = "#2ca02c"
COLOR_TEXT = "#666666"

PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<svg width="%(size).0f" height="%(size).0f" viewBox="%(low).6f %(low).6f %(size).6f %(size).6f" \
version="1.1" xmlns="http://www.w3.org/2000/svg">
<rect x="%(low).6f" y="%(low).6f" width="%(size).6f" height="%(size).6f" style="fill:#ffffff"/>
"""

POSTAMBLE = """\
</svg>
"""


class SVG:
    """Accumulates drawing commands in disc coordinates and writes one document."""

    def __init__(self, plane: str = DEFAULT_PLANE) -> None:
        if plane not in PLANE_AXES:
            raise DataError(f"unknown projection plane {plane!r}, expected one of {SVG_PLANES}")
        self.plane = plane
        self.commands: list[str] = []

    def project(self, ball: np.ndarray) -> tuple[float, float]:
        """Ball coordinates to canvas coordinates (y axis pointing up)."""
        i, j = PLANE_AXES[self.plane]
        # + 0.0 turns -0.0 into 0.0
        return SCALE * float(ball[i]) + 0.0, -SCALE * float(ball[j]) + 0.0

    def circle(self, center: np.ndarray, radius: float, stroke: str, dash: bool = False) -> None:
        x, y = self.project(center)
        style = f"fill:none;stroke:{stroke};stroke-width:1"
        if dash:
            style += ";stroke-dasharray:4,3"
        self.commands.append(
            f'<circle cx="{x:.6f}" cy="{y:.6f}" r="{SCALE * radius:.6f}" style="{style}"/>'
        )

    def line(self, points: list[np.ndarray], color: str = COLOR_PATH, width: float = 1.5) -> None:
        coords = " ".join("%.6f,%.6f" % self.project(p) for p in points)
        self.commands.append(
            f'<polyline points="{coords}" style="fill:none;stroke:{color};stroke-width:{width:g}"/>'
        )

    def mark(self, point: np.ndarray, label: str, color: str = COLOR_MARK) -> None:
        x, y = self.project(point)
        self.commands.append(f'<circle cx="{x:.6f}" cy="{y:.6f}" r="3" style="fill:{color}"/>')
        self.commands.append(
            f'<text x="{x + 5:.6f}" y="{y - 5:.6f}" fill="{COLOR_TEXT}" font-size="10" '
            f'font-family="monospace">{label}</text>'
        )

    def document(self) -> str:
        """Return the complete SVG text."""
        low = -(SCALE + MARGIN)
        size = 2.0 * (SCALE + MARGIN)
        return PREAMBLE % {"low": low, "size": size} + "".join(c + "\n" for c in self.commands) + POSTAMBLE


def _disc_coordinates(point: HPoint) -> np.ndarray:
    """Ball coordinates without the representability check; far points land on the sphere."""
    x = point.lift
    return x[1:] / (1.0 + x[0])


def edge_polyline(segment: GeodesicSegment) -> list[np.ndarray]:
    """Sampled ball coordinates along a segment, cut off SVG_RENDER_RADIUS past its start."""
    t_max = min(segment.length, segment.start.radius + SVG_RENDER_RADIUS)
    if t_max < segment.length:
        _LOGGER.debug("Clamping edge of length %.6g at %.6g", segment.length, t_max)
    ts = np.linspace(0.0, t_max, SVG_SAMPLES_PER_EDGE + 1)
    return [_disc_coordinates(segment.point_at(float(t))) for t in ts]


def render_figure(
    path: Geodesic120Path | None = None,
    certificate: ShortCutCertificate | None = None,
    witness: EscapeWitness | None = None,
    plane: str = DEFAULT_PLANE,
) -> str:
    """Draw the unit disc, the horoball W and whatever parts of a figure are given."""
    svg = SVG(plane)
    svg.circle(np.zeros(3), 1.0, COLOR_DISC)
    svg.circle(HOROBALL_CENTER, HOROBALL_RADIUS, COLOR_HOROBALL, dash=True)

    if path is not None:
        for segment in path.segments:
            svg.line(edge_polyline(segment))
        for index, vertex in enumerate(path.vertices):
            if vertex is not None and vertex.radius <= SVG_RENDER_RADIUS:
                svg.mark(_disc_coordinates(vertex), f"v{index}", COLOR_PATH)

    if certificate is not None:
        svg.line(
            [_disc_coordinates(certificate.e), _disc_coordinates(certificate.f)],
            COLOR_MARK,
            width=1.0,
        )
        for label in ("e1", "e2", "e", "f"):
            svg.mark(_disc_coordinates(getattr(certificate, label)), label)

    if witness is not None:
        svg.mark(_disc_coordinates(witness.point), "escape")

    return svg.document()


def render_document(data: dict[str, Any], plane: str = DEFAULT_PLANE) -> str:
    """Render a validated render document: a bare path, or a figure mapping."""
    if "lengths" in data:
        return render_figure(Geodesic120Path.from_dict(data), plane=plane)
    path = Geodesic120Path.from_dict(data["path"]) if data.get("path") else None
    certificate = (
        ShortCutCertificate.from_dict(data["certificate"]) if data.get("certificate") else None
    )
    witness = EscapeWitness.from_dict(data["witness"]) if data.get("witness") else None
    return render_figure(path, certificate, witness, plane)

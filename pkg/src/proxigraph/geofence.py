"""Workspace geofence: polygon validation and point containment.

Containment is decided on-device only; positions never leave the device.
Boundary points count as inside (fail safe: prefer scanning on).
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidGeofence

Point = tuple[float, float]


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(p: Point, a: Point, b: Point) -> bool:
    if _orient(a, b, p) != 0.0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Proper or improper intersection of segments ab and cd."""
    d1 = _orient(c, d, a)
    d2 = _orient(c, d, b)
    d3 = _orient(a, b, c)
    d4 = _orient(a, b, d)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    return (
        _on_segment(a, c, d) or _on_segment(b, c, d) or _on_segment(c, a, b) or _on_segment(d, a, b)
    )


@dataclass(frozen=True)
class Geofence:
    polygon: tuple[Point, ...]  # workspace-local planar metres

    def __post_init__(self):
        object.__setattr__(self, "polygon", tuple((float(x), float(y)) for x, y in self.polygon))
        validate_geofence(self.polygon)


def validate_geofence(polygon: tuple[Point, ...]) -> None:
    n = len(polygon)
    if n < 3:
        raise InvalidGeofence(f"polygon needs >= 3 vertices, got {n}")
    edges = [(polygon[i], polygon[(i + 1) % n]) for i in range(n)]
    for i, (a, b) in enumerate(edges):
        if a == b:
            raise InvalidGeofence("zero-length edge")
        for j in range(i + 1, n):
            c, d = edges[j]
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                continue
            if _segments_cross(a, b, c, d):
                raise InvalidGeofence(f"edges {i} and {j} intersect")


def point_in_geofence(point: Point, fence: Geofence) -> bool:
    """Ray casting; points exactly on the boundary are inside."""
    poly = fence.polygon
    n = len(poly)
    px, py = float(point[0]), float(point[1])
    for i in range(n):
        if _on_segment((px, py), poly[i], poly[(i + 1) % n]):
            return True
    inside = False
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        # half-open vertex rule avoids double-counting ray hits at vertices
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_cross:
                inside = not inside
    return inside

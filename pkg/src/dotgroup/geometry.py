"""Basic 2D geometry: points, simple polygons, angles and area overlap."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from shapely.geometry import LinearRing
from shapely.geometry import Polygon as _ShapelyPolygon

EPS_GEOM = 1e-9


class GeometryError(ValueError):
    """Raised for invalid or degenerate geometric input."""


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def distance(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


def _as_array(points) -> np.ndarray:
    arr = np.asarray([tuple(p) for p in points], dtype=float)
    if arr.ndim != 2 or (len(arr) and arr.shape[1] != 2):
        raise GeometryError("expected a sequence of (x, y) pairs")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("non-finite coordinates")
    return arr


def shoelace(xy: np.ndarray) -> float:
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


class SimplePolygon:
    """A validated simple polygon stored counter-clockwise.

    Clockwise input is reversed on construction.  Raises GeometryError for
    fewer than three vertices, coincident consecutive vertices, zero area or
    self-intersection.
    """

    __slots__ = ("_xy",)

    def __init__(self, points: Iterable[Sequence[float]]):
        xy = _as_array(points)
        if len(xy) < 3:
            raise GeometryError("a polygon needs at least 3 vertices")
        step = np.hypot(*(np.roll(xy, -1, axis=0) - xy).T)
        if np.any(step <= EPS_GEOM):
            raise GeometryError("consecutive vertices coincide")
        area = shoelace(xy)
        if abs(area) <= EPS_GEOM:
            raise GeometryError("polygon has zero area")
        if not LinearRing(xy).is_simple:
            raise GeometryError("polygon is self-intersecting")
        if area < 0:
            xy = xy[::-1].copy()
        xy.setflags(write=False)
        self._xy = xy

    @property
    def vertices(self) -> np.ndarray:
        return self._xy

    def __len__(self):
        return len(self._xy)

    def __iter__(self):
        for x, y in self._xy:
            yield Point2(float(x), float(y))

    def __repr__(self):
        return f"SimplePolygon({self._xy.tolist()!r})"

    def to_shapely(self) -> _ShapelyPolygon:
        return _ShapelyPolygon(self._xy)


def signed_area(P) -> float:
    """Shoelace area; positive for counter-clockwise vertex order.

    Accepts a SimplePolygon (always counter-clockwise, so always positive) or
    a raw vertex sequence, which keeps its given orientation.
    """
    xy = P.vertices if isinstance(P, SimplePolygon) else _as_array(P)
    return shoelace(xy)


def turn_angle(d1, d2) -> float:
    """Signed turn from direction d1 to d2, in (-pi, pi]."""
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    dot = d1[0] * d2[0] + d1[1] * d2[1]
    return math.atan2(cross, dot)


def interior_angle(P, i: int) -> float:
    """Angle at vertex ``i`` measured inside the polygon, in (0, 2*pi).

    Values above pi mark reflex vertices.  Raw vertex sequences are treated as
    counter-clockwise; a neighbour coinciding with vertex ``i`` is an error.
    """
    xy = P.vertices if isinstance(P, SimplePolygon) else _as_array(P)
    n = len(xy)
    if not 0 <= i < n:
        raise IndexError(i)
    prev, cur, nxt = xy[i - 1], xy[i], xy[(i + 1) % n]
    d1, d2 = cur - prev, nxt - cur
    if math.hypot(*d1) <= EPS_GEOM or math.hypot(*d2) <= EPS_GEOM:
        raise GeometryError(f"degenerate corner at vertex {i}")
    return math.pi - turn_angle(d1, d2)


def area_overlap(P: SimplePolygon, Q: SimplePolygon) -> tuple[float, float]:
    """Return (intersection area, union area) of two simple polygons."""
    a = P.to_shapely()
    b = Q.to_shapely()
    inter = a.intersection(b).area if a.intersects(b) else 0.0
    union = a.area + b.area - inter
    return max(float(inter), 0.0), float(union)


def matching_score(P: SimplePolygon, Q: SimplePolygon) -> float:
    """Area of intersection over area of union: 1 for identical regions, 0 for disjoint."""
    inter, union = area_overlap(P, Q)
    if union <= 0.0:
        return 0.0
    return min(1.0, inter / union)

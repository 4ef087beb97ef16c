"""Moving vertices and kinetic polygons.

Every side of a kinetic polygon is a line translating along its left unit
normal at unit speed, so the free region (the area the wavefront sweeps)
always lies to the left of each directed side.  A shrinking polygon is
therefore stored counter-clockwise, a growing one clockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .geometry import SimplePolygon, turn_angle

# 1 + n1.n2 below this means the two sides are anti-parallel
ANTIPARALLEL_TOL = 1e-12


class Line(NamedTuple):
    """Moving line ``nx*x + ny*y = c + t`` at time ``t``."""

    nx: float
    ny: float
    c: float

    @property
    def direction(self) -> tuple[float, float]:
        return (self.ny, -self.nx)

    @classmethod
    def through(cls, a, b, t: float = 0.0) -> "Line":
        """Side running from ``a`` to ``b`` at time ``t``."""
        dx, dy = b[0] - a[0], b[1] - a[1]
        norm = math.hypot(dx, dy)
        if norm == 0.0:
            raise ValueError("side endpoints coincide")
        nx, ny = -dy / norm, dx / norm
        return cls(nx, ny, nx * a[0] + ny * a[1] - t)


def vertex_speed(theta: float) -> float:
    """Speed of a vertex with wedge angle ``theta`` when sides move at unit speed."""
    if not 0.0 < theta < 2.0 * math.pi:
        raise ValueError(f"wedge angle {theta!r} outside (0, 2*pi)")
    return 1.0 / math.sin(theta / 2.0)


def wedge_angle(in_line: Line, out_line: Line) -> float:
    """Angle of the free region between two consecutive sides, in [0, 2*pi]."""
    return math.pi - turn_angle(in_line.direction, out_line.direction)


def bisector_velocity(in_line: Line, out_line: Line) -> tuple[float, float]:
    """Velocity keeping a vertex on both moving lines.

    Solves v.n1 = v.n2 = 1.  Anti-parallel sides have no solution; callers
    treat those separately.
    """
    denom = 1.0 + in_line.nx * out_line.nx + in_line.ny * out_line.ny
    if denom < ANTIPARALLEL_TOL:
        raise ZeroDivisionError("anti-parallel sides")
    return ((in_line.nx + out_line.nx) / denom, (in_line.ny + out_line.ny) / denom)


@dataclass(eq=False)
class MovingVertex:
    """A polygon vertex travelling on a straight line from its birth.

    ``pi_a``/``pi_b`` point at the vertices it was created from: both empty for
    initial vertices, both set after an edge event (``pi_b`` follows ``pi_a``
    along the polygon), only ``pi_a`` after a split.
    """

    id: int
    origin: tuple[float, float]
    velocity: tuple[float, float]
    in_line: Line
    out_line: Line
    angle: float
    birth_time: float = 0.0
    tree_node: Optional[int] = None
    pi_a: Optional["MovingVertex"] = field(default=None, repr=False)
    pi_b: Optional["MovingVertex"] = field(default=None, repr=False)
    death_time: Optional[float] = None

    @property
    def speed(self) -> float:
        return math.hypot(*self.velocity)

    @property
    def direction(self) -> tuple[float, float]:
        s = self.speed
        if s == 0.0:
            return (0.0, 0.0)
        return (self.velocity[0] / s, self.velocity[1] / s)

    @property
    def is_reflex(self) -> bool:
        return self.angle > math.pi + 1e-12

    def position(self, t: float) -> tuple[float, float]:
        dt = t - self.birth_time
        return (self.origin[0] + dt * self.velocity[0], self.origin[1] + dt * self.velocity[1])


def make_vertex(vid, origin, in_line, out_line, birth_time=0.0, tree_node=None, angle=None):
    """Build a vertex whose velocity follows from its two sides."""
    if angle is None:
        angle = wedge_angle(in_line, out_line)
    in_line, out_line = Line(*map(float, in_line)), Line(*map(float, out_line))
    vel = bisector_velocity(in_line, out_line)
    return MovingVertex(vid, (float(origin[0]), float(origin[1])), vel, in_line, out_line,
                        angle, birth_time, tree_node)


class KineticPolygon:
    """Circular sequence of moving vertices, created at ``creation_time``."""

    def __init__(self, vertices, creation_time: float = 0.0):
        self.vertices = list(vertices)
        self.creation_time = float(creation_time)

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def positions(self, t: float):
        return [v.position(t) for v in self.vertices]

    @classmethod
    def from_polygon(cls, polygon, grow: bool = False) -> "KineticPolygon":
        """Kinetic version of a simple polygon, shrinking by default."""
        if not isinstance(polygon, SimplePolygon):
            polygon = SimplePolygon(polygon)
        xy = [tuple(map(float, p)) for p in polygon.vertices]
        if grow:
            xy.reverse()
        n = len(xy)
        sides = [Line.through(xy[i], xy[(i + 1) % n]) for i in range(n)]
        verts = [make_vertex(i, xy[i], sides[i - 1], sides[i]) for i in range(n)]
        return cls(verts)

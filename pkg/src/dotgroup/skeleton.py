"""Straight offset polygons by kinetic event simulation.

Vertices move on straight lines between events.  Two kinds of event change
the topology: an edge event, where two adjacent vertices meet, and a split
event, where a reflex vertex runs into a non-incident side and cuts its
polygon in two.  Events are kept in one priority queue keyed by time; a
vertex's queued event carries a version stamp and stale entries are
discarded when popped.

After each event the new vertices and their predecessors get a full
recomputation, and every reflex vertex of the affected polygon is tested
against the sides whose endpoints changed, since a side that gained a new
endpoint may now be reached sooner.  A queued split whose target side has
since changed is recomputed when it is popped.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .geometry import EPS_GEOM
from .kinetic import (
    ANTIPARALLEL_TOL,
    KineticPolygon,
    Line,
    MovingVertex,
    bisector_velocity,
    wedge_angle,
)

EPS_T = 1e-9
RATE_EPS = 1e-12


class SimulationError(RuntimeError):
    """The simulation reached an inconsistent state."""


@dataclass
class Event:
    time: float
    kind: str  # "edge" or "split"
    participants: tuple
    location: tuple
    created: tuple = ()

    def to_json(self) -> dict:
        return {
            "time": self.time,
            "kind": self.kind,
            "participants": list(self.participants),
            "location": list(self.location),
        }


@dataclass
class PolygonState:
    """One polygon produced during the simulation (a snapshot of vertex ids)."""

    vertex_ids: tuple
    creation_time: float
    event: Optional[int]  # index into the event log, None for the input polygon
    cause: str  # "initial", "edge" or "split"


@dataclass
class OffsetPolygonSet:
    vertices: list  # every MovingVertex by id
    states: list  # PolygonState, in creation order
    events: list  # Event, chronological
    skeleton_arcs: list = field(default_factory=list)
    end_time: float = 0.0

    @property
    def polygons(self) -> list:
        return [
            KineticPolygon([self.vertices[i] for i in s.vertex_ids], s.creation_time)
            for s in self.states
        ]

    def skeleton_nodes(self, tol: float = 1e-7) -> list:
        """Distinct event locations (the internal nodes of the skeleton)."""
        nodes = []
        for ev in self.events:
            if all(math.dist(ev.location, p) > tol for p in nodes):
                nodes.append(ev.location)
        return nodes

    def dump_events(self, fh) -> None:
        for ev in self.events:
            fh.write(json.dumps(ev.to_json()) + "\n")


# -- scalar event predicates ------------------------------------------------

def edge_event_time(v: MovingVertex, w: MovingVertex, t_now: float, eps: float = EPS_GEOM):
    """When ``w`` (the successor of ``v``) catches up with ``v``.

    Both lie on the side ``v.out_line``; the event is the time the signed
    side length reaches zero.  Returns ``(time, (x, y))`` or None when the
    side is not shrinking.
    """
    dx, dy = v.out_line.direction
    pv, pw = v.position(t_now), w.position(t_now)
    length = (pw[0] - pv[0]) * dx + (pw[1] - pv[1]) * dy
    rate = (w.velocity[0] - v.velocity[0]) * dx + (w.velocity[1] - v.velocity[1]) * dy
    if rate >= -RATE_EPS or length < -eps:
        return None
    t = t_now + max(length, 0.0) / -rate
    a, b = v.position(t), w.position(t)
    return t, ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)


def split_event_time(v: MovingVertex, edge, t_now: float, eps: float = EPS_GEOM):
    """When reflex vertex ``v`` reaches the moving side ``edge = (a, b)``.

    The side is ``a.out_line`` bounded by the current trajectories of ``a``
    and ``b``.  Returns ``(time, (x, y))`` or None.
    """
    a, b = edge
    if not v.is_reflex or v is a or v is b:
        return None
    line = a.out_line
    pv = v.position(t_now)
    ahead = line.nx * pv[0] + line.ny * pv[1] - line.c - t_now
    rate = line.nx * v.velocity[0] + line.ny * v.velocity[1] - 1.0
    floor = -eps if v.birth_time < t_now - EPS_T else eps
    if ahead <= floor or rate >= -RATE_EPS:
        return None
    t = t_now + max(ahead, 0.0) / -rate
    q, pa, pb = v.position(t), a.position(t), b.position(t)
    dx, dy = line.direction
    from_a = (q[0] - pa[0]) * dx + (q[1] - pa[1]) * dy
    to_b = (pb[0] - q[0]) * dx + (pb[1] - q[1]) * dy
    if from_a < -eps or to_b < -eps:
        return None
    return t, q


# -- simulator ----------------------------------------------------------------

_EDGE, _SPLIT = 0, 1


class _Simulation:
    def __init__(self, polygon: KineticPolygon, record: str):
        src = list(polygon.vertices)
        m = len(src)
        scale = max([1.0] + [abs(c) for v in src for c in v.origin])
        self.eps = EPS_GEOM * scale
        self.record = record
        cap = 4 * m + 16
        self.O = np.zeros((cap, 2))
        self.V = np.zeros((cap, 2))
        self.BT = np.zeros(cap)
        self.IN = np.zeros((cap, 3))
        self.OUT = np.zeros((cap, 3))
        self.REFL = np.zeros(cap, dtype=bool)
        self.ALIVE = np.zeros(cap, dtype=bool)
        self.POLY = np.full(cap, -1)
        self.NXT = np.full(cap, -1)
        self.PRV = np.full(cap, -1)
        self.verts: list[MovingVertex] = []
        self.version: list[int] = []
        self.cand: list = []
        self.heap: list = []
        self.seq = 0
        self.now = polygon.creation_time
        self.loops: dict[int, list] = {}
        self._arrays: dict[int, np.ndarray] = {}
        self.next_loop = 0
        self.events: list[Event] = []
        self.states: list[PolygonState] = []
        self.ridges: list = []

        for k, v in enumerate(src):
            self._register(replace(v, id=k, pi_a=None, pi_b=None, death_time=None))
        ring = list(range(m))
        self._new_loop(ring, None, "initial")

    # bookkeeping ------------------------------------------------------------

    def _grow(self):
        cap = 2 * len(self.BT)
        for name in ("O", "V", "IN", "OUT"):
            old = getattr(self, name)
            new = np.zeros((cap, old.shape[1]))
            new[: len(old)] = old
            setattr(self, name, new)
        for name, fill in (("BT", 0.0), ("REFL", False), ("ALIVE", False),
                           ("POLY", -1), ("NXT", -1), ("PRV", -1)):
            old = getattr(self, name)
            new = np.full(cap, fill, dtype=old.dtype)
            new[: len(old)] = old
            setattr(self, name, new)

    def _register(self, v: MovingVertex) -> int:
        i = len(self.verts)
        if i >= len(self.BT):
            self._grow()
        v.id = i
        self.verts.append(v)
        self.version.append(0)
        self.cand.append(None)
        self.O[i] = v.origin
        self.V[i] = v.velocity
        self.BT[i] = v.birth_time
        self.IN[i] = v.in_line
        self.OUT[i] = v.out_line
        self.REFL[i] = v.is_reflex and v.speed > 0.0
        self.ALIVE[i] = True
        return i

    def _spawn(self, origin, in_line, out_line, pi_a, pi_b=None):
        """New vertex created at the current time; returns its id."""
        in_line, out_line = Line(*in_line), Line(*out_line)
        angle = wedge_angle(in_line, out_line)
        try:
            vel = bisector_velocity(in_line, out_line)
        except ZeroDivisionError:
            # sides folded onto each other: the wedge between them is empty
            angle, vel = 0.0, (0.0, 0.0)
        v = MovingVertex(-1, (float(origin[0]), float(origin[1])), vel, in_line, out_line,
                         angle, self.now, None, self.verts[pi_a],
                         None if pi_b is None else self.verts[pi_b])
        return self._register(v)

    def _new_loop(self, ring, event_index, cause):
        lid = self.next_loop
        self.next_loop += 1
        ids = np.asarray(ring)
        self.POLY[ids] = lid
        self.NXT[ids] = np.roll(ids, -1)
        self.PRV[ids] = np.roll(ids, 1)
        if len(ring) < 3:
            self._kill_ring(ring)
            return None
        self.loops[lid] = ring
        if self.record == "all" or cause != "edge":
            self.states.append(PolygonState(tuple(ring), self.now, event_index, cause))
        return lid

    def _kill_ring(self, ring):
        if len(ring) == 2:
            p, q = (self._pos(i, self.now) for i in ring)
            if math.dist(p, q) > self.eps:
                self.ridges.append((p, q))
        for i in ring:
            self._kill(i)

    def _kill(self, i):
        self.ALIVE[i] = False
        self.verts[i].death_time = self.now
        self.cand[i] = None

    def _loop_array(self, lid) -> np.ndarray:
        arr = self._arrays.get(lid)
        if arr is None:
            arr = self._arrays[lid] = np.asarray(self.loops[lid])
        return arr

    def _touch(self, lid):
        self._arrays.pop(lid, None)

    def _pos(self, i, t):
        return tuple(float(c) for c in self.O[i] + (t - self.BT[i]) * self.V[i])

    # event computation --------------------------------------------------------

    def _edge_candidate(self, i):
        j = self.NXT[i]
        nx, ny = self.OUT[i, 0], self.OUT[i, 1]
        dx, dy = ny, -nx
        t = self.now
        pi = self.O[i] + (t - self.BT[i]) * self.V[i]
        pj = self.O[j] + (t - self.BT[j]) * self.V[j]
        length = (pj[0] - pi[0]) * dx + (pj[1] - pi[1]) * dy
        rate = (self.V[j, 0] - self.V[i, 0]) * dx + (self.V[j, 1] - self.V[i, 1]) * dy
        if rate >= -RATE_EPS or length < -self.eps:
            return None
        te = t + max(length, 0.0) / -rate
        a = self.O[i] + (te - self.BT[i]) * self.V[i]
        b = self.O[j] + (te - self.BT[j]) * self.V[j]
        loc = (float((a[0] + b[0]) / 2), float((a[1] + b[1]) / 2))
        return (float(te), _EDGE, (i, int(j)), loc, -1)

    def _split_kernel(self, vi, ea, eb):
        """Vectorised split times of vertices ``vi`` against sides ``ea -> eb``.

        Returns (times, hit points, corner ids or -1, valid mask).
        """
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self._split_kernel_raw(vi, ea, eb)

    def _split_kernel_raw(self, vi, ea, eb):
        t0 = self.now
        n = self.OUT[ea]
        pv = self.O[vi] + (t0 - self.BT[vi])[:, None] * self.V[vi]
        ahead = n[:, 0] * pv[:, 0] + n[:, 1] * pv[:, 1] - n[:, 2] - t0
        rate = n[:, 0] * self.V[vi, 0] + n[:, 1] * self.V[vi, 1] - 1.0
        # a vertex born now may sit on a side it is leaving; older ones were in front
        floor = np.where(self.BT[vi] < t0 - EPS_T, -self.eps, self.eps)
        ok = (ahead > floor) & (rate < -RATE_EPS)
        te = np.where(ok, t0 + np.maximum(ahead, 0.0) / np.where(ok, -rate, 1.0), np.inf)
        q = self.O[vi] + (te - self.BT[vi])[:, None] * self.V[vi]
        pa = self.O[ea] + (te - self.BT[ea])[:, None] * self.V[ea]
        pb = self.O[eb] + (te - self.BT[eb])[:, None] * self.V[eb]
        dx, dy = n[:, 1], -n[:, 0]
        from_a = (q[:, 0] - pa[:, 0]) * dx + (q[:, 1] - pa[:, 1]) * dy
        to_b = (pb[:, 0] - q[:, 0]) * dx + (pb[:, 1] - q[:, 1]) * dy
        ok &= (from_a >= -self.eps) & (to_b >= -self.eps)
        # a hit within eps of a side's end point is a collision with that corner
        corner = np.where(from_a <= self.eps, ea, np.where(to_b <= self.eps, eb, -1))
        # running into a neighbour is an edge event, not a split
        ok &= (corner != self.NXT[vi]) & (corner != self.PRV[vi])
        return te, q, corner, ok

    def _split_candidate(self, i):
        if not self.REFL[i]:
            return None
        ids = self._loop_array(self.POLY[i])
        mask = (ids != i) & (ids != self.PRV[i])
        ea = ids[mask]
        if len(ea) == 0:
            return None
        eb = self.NXT[ea]
        vi = np.full(len(ea), i)
        te, q, corner, ok = self._split_kernel(vi, ea, eb)
        if not ok.any():
            return None
        k = _best_index(te, corner, ea, ok)
        return (float(te[k]), _SPLIT, (i, int(ea[k]), int(eb[k])),
                (float(q[k, 0]), float(q[k, 1])), int(corner[k]))

    def _better(self, c1, c2):
        if c1 is None:
            return False
        if c2 is None:
            return True
        if abs(c1[0] - c2[0]) > EPS_T:
            return c1[0] < c2[0]
        return _tie_key(c1) < _tie_key(c2)

    def _set_candidate(self, i, c):
        if c is not None and not math.isfinite(c[0]):
            raise SimulationError(f"non-finite event time for vertex {i}")
        self.version[i] += 1
        self.cand[i] = c
        if c is not None:
            parts = c[2]
            heapq.heappush(self.heap, (c[0], min(parts), max(parts), self.seq, i, self.version[i]))
            self.seq += 1

    def _recompute(self, i):
        if not self.ALIVE[i]:
            return
        c, s = self._edge_candidate(i), self._split_candidate(i)
        self._set_candidate(i, s if self._better(s, c) else c)

    def _rescan(self, a):
        """Offer the side starting at ``a`` to every reflex vertex of its loop."""
        if not self.ALIVE[a]:
            return
        lid = self.POLY[a]
        if lid not in self.loops:
            return
        b = self.NXT[a]
        ids = self._loop_array(lid)
        vi = ids[self.REFL[ids] & (ids != a) & (ids != b)]
        if len(vi) == 0:
            return
        ea = np.full(len(vi), a)
        eb = np.full(len(vi), b)
        te, q, corner, ok = self._split_kernel(vi, ea, eb)
        for k in np.flatnonzero(ok):
            i = int(vi[k])
            c = (float(te[k]), _SPLIT, (i, int(a), int(b)), (float(q[k, 0]), float(q[k, 1])),
                 int(corner[k]))
            if self._better(c, self.cand[i]):
                self._set_candidate(i, c)

    def _still_valid(self, i, c):
        kind, parts = c[1], c[2]
        if kind == _EDGE:
            j = parts[1]
            return self.ALIVE[j] and self.NXT[i] == j
        _, a, b = parts
        ok = (self.ALIVE[a] and self.ALIVE[b] and self.NXT[a] == b
              and self.POLY[a] == self.POLY[i] and a != self.PRV[i] and a != i)
        w = c[4]
        return ok and (w < 0 or (w != self.NXT[i] and w != self.PRV[i]))

    def _pop_valid(self):
        """Pop the next live queued event as (vertex, candidate), or None."""
        while self.heap:
            _, _, _, _, i, ver = heapq.heappop(self.heap)
            if not self.ALIVE[i] or ver != self.version[i]:
                continue
            c = self.cand[i]
            if self._still_valid(i, c):
                return i, c
            self._recompute(i)
        return None

    # event handling -----------------------------------------------------------

    def _log(self, kind, parts, loc, created):
        self.events.append(Event(self.now, kind, tuple(int(p) for p in parts), loc,
                                 tuple(created)))
        return len(self.events) - 1

    def _handle_edge(self, i, j, loc):
        lid = self.POLY[i]
        ring = self.loops.pop(lid)
        self._touch(lid)
        vi, vj = self.verts[i], self.verts[j]
        angle = vi.angle + vj.angle - math.pi
        in_line, out_line = self.IN[i], self.OUT[j]
        if 1.0 + in_line[0] * out_line[0] + in_line[1] * out_line[1] < ANTIPARALLEL_TOL \
                and angle > math.pi:
            # sides folded back with the free region wrapped around: open a cap
            dx, dy = Line(*in_line).direction
            cap = (dx, dy, dx * loc[0] + dy * loc[1] - self.now)
            new = [self._spawn(loc, in_line, cap, i), self._spawn(loc, cap, out_line, j)]
        else:
            new = [self._spawn(loc, in_line, out_line, i, j)]
        self._kill(i)
        self._kill(j)
        k = ring.index(i)
        ring = ring[k + 1:] + ring[:k]
        assert ring[0] == j
        ring = new + ring[1:]
        ev = self._log("edge", (i, j), loc, new)
        nlid = self._new_loop(ring, ev, "edge")
        if nlid is None:
            return
        self._refresh([new[0], self.PRV[new[0]]] + new[1:], [self.PRV[new[0]]] + new)

    def _handle_corner(self, i, w, loc):
        """Reflex vertex ``i`` meets corner ``w`` head on; both are consumed.

        Each side of the cut gets one new vertex joining the side into ``w``
        or ``i`` with the side out of the other, and inherits both ancestries
        in boundary order.
        """
        lid = self.POLY[i]
        ring = self.loops.pop(lid)
        self._touch(lid)
        k = ring.index(i)
        rest = ring[k + 1:] + ring[:k]
        kw = rest.index(w)
        u1 = self._spawn(loc, self.IN[w], self.OUT[i], w, i)
        u2 = self._spawn(loc, self.IN[i], self.OUT[w], i, w)
        self._kill(i)
        self._kill(w)
        first = [u1] + rest[:kw]
        second = [u2] + rest[kw + 1:]
        ev = self._log("split", (i, w), loc, (u1, u2))
        l1 = self._new_loop(first, ev, "split")
        l2 = self._new_loop(second, ev, "split")
        recompute, rescan = [], []
        for lid_new, u in ((l1, u1), (l2, u2)):
            if lid_new is not None:
                recompute += [u, self.PRV[u]]
                rescan += [self.PRV[u], u]
        self._refresh(recompute, rescan)

    def _handle_split(self, i, a, b, loc):
        lid = self.POLY[i]
        ring = self.loops.pop(lid)
        self._touch(lid)
        k = ring.index(i)
        rest = ring[k + 1:] + ring[:k]  # from next(i) round to prev(i)
        ka = rest.index(a)
        v1 = self._spawn(loc, self.OUT[a], self.OUT[i], i)
        v2 = self._spawn(loc, self.IN[i], self.OUT[a], i)
        self._kill(i)
        first = [v1] + rest[: ka + 1]
        second = [v2] + rest[ka + 1:]
        ev = self._log("split", (i, a, b), loc, (v1, v2))
        l1 = self._new_loop(first, ev, "split")
        l2 = self._new_loop(second, ev, "split")
        recompute, rescan = [], []
        if l1 is not None:
            recompute += [v1, a]
            rescan += [a, v1]
        if l2 is not None:
            recompute += [v2, self.PRV[v2]]
            rescan += [self.PRV[v2], v2]
        self._refresh(recompute, rescan)

    def _refresh(self, recompute, rescan):
        for i in dict.fromkeys(int(x) for x in recompute):
            self._recompute(i)
        for a in dict.fromkeys(int(x) for x in rescan):
            self._rescan(a)

    def run(self, max_events=None) -> OffsetPolygonSet:
        for i in range(len(self.verts)):
            self._recompute(i)
        limit = max_events if max_events is not None else 4 * len(self.verts) + 16
        while True:
            top = self._pop_valid()
            if top is None:
                break
            batch = [top]
            while self.heap and self.heap[0][0] <= top[1][0] + EPS_T:
                nxt = self._pop_valid()
                if nxt is None:
                    break
                batch.append(nxt)
                if nxt[1][0] > top[1][0] + EPS_T:
                    break  # a recomputed entry from outside the window
            window = [ic for ic in batch if ic[1][0] <= top[1][0] + EPS_T]
            i, c = min(window, key=lambda ic: (min(ic[1][2]), max(ic[1][2]), ic[1][1], ic[1][2]))
            for j, cj in batch:
                if j == i:
                    continue
                parts = cj[2]
                heapq.heappush(self.heap, (cj[0], min(parts), max(parts), self.seq, j,
                                           self.version[j]))
                self.seq += 1
            if len(self.events) >= limit:
                raise SimulationError("event limit exceeded")
            self.now = max(self.now, c[0])
            if c[1] == _EDGE:
                self._handle_edge(i, c[2][1], c[3])
            elif c[4] >= 0:
                self._handle_corner(i, c[4], c[3])
            else:
                self._handle_split(i, c[2][1], c[2][2], c[3])
        return self._result()

    def _result(self) -> OffsetPolygonSet:
        end = self.now
        arcs = []
        for v in self.verts:
            stop = v.death_time if v.death_time is not None else end
            p, q = v.origin, v.position(stop)
            if math.dist(p, q) > self.eps:
                arcs.append((p, q))
        arcs.extend(self.ridges)
        return OffsetPolygonSet(self.verts, self.states, self.events, arcs, end)


def _tie_key(c):
    # at equal times: edge events first, then plain side hits, then ids
    return (c[1], c[4] >= 0, min(c[2]), c[2])


def _best_index(te, corner, ea, ok):
    masked = np.where(ok, te, np.inf)
    tmin = masked.min()
    close = np.flatnonzero(ok & (masked <= tmin + EPS_T))
    if len(close) == 1:
        return int(close[0])
    # among near-equal times prefer a hit inside a side, then the lower side id
    key = [(bool(corner[k] >= 0), int(ea[k])) for k in close]
    return int(close[min(range(len(close)), key=key.__getitem__)])


def offset_polygons(P: KineticPolygon, record: str = "all", max_events=None) -> OffsetPolygonSet:
    """Run the straight polygon transformation on ``P``.

    ``record="all"`` keeps every polygon produced; ``record="splits"`` keeps
    only the input polygon and the children of split events (polygons born
    of edge events repeat their parent's vertex ancestry).
    """
    if record not in ("all", "splits"):
        raise ValueError(f"unknown record mode {record!r}")
    if len(P) < 3:
        raise ValueError("a kinetic polygon needs at least 3 vertices")
    return _Simulation(P, record).run(max_events)


def straight_skeleton(P: KineticPolygon) -> list:
    """Vertex trajectories of the offset process, as ((x0, y0), (x1, y1)) segments."""
    return offset_polygons(P).skeleton_arcs


def face_count(boundary, arcs, tol: float = 1e-7) -> int:
    """Bounded faces of the planar graph formed by a polygon boundary and skeleton arcs."""
    nodes: list = []

    def node(p):
        for k, q in enumerate(nodes):
            if math.dist(p, q) <= tol:
                return k
        nodes.append(tuple(p))
        return len(nodes) - 1

    edges = set()
    pts = [tuple(map(float, p)) for p in boundary]
    for k in range(len(pts)):
        a, b = node(pts[k]), node(pts[(k + 1) % len(pts)])
        edges.add((min(a, b), max(a, b)))
    for p, q in arcs:
        a, b = node(p), node(q)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    # connected planar graph: V - E + F = 2, minus the outer face
    return len(edges) - len(nodes) + 1

"""Independent reference implementations used only by the tests.

None of these import the package's simulation or grouping code.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


# -- spanning trees ------------------------------------------------------------

def brute_force_mst_weight(xy) -> float:
    """Minimum total length over every spanning tree of the complete graph."""
    xy = np.asarray(xy, dtype=float)
    n = len(xy)
    if n < 2:
        return 0.0
    pairs = list(itertools.combinations(range(n), 2))
    w = {e: math.dist(xy[e[0]], xy[e[1]]) for e in pairs}
    best = math.inf
    for subset in itertools.combinations(pairs, n - 1):
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        ok = True
        for a, b in subset:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
        if ok:
            best = min(best, sum(w[e] for e in subset))
    return best


# -- areas ---------------------------------------------------------------------

def _inside(poly, X, Y):
    """Even-odd point-in-polygon test on grids of sample points."""
    poly = np.asarray(poly, dtype=float)
    inside = np.zeros(X.shape, dtype=bool)
    for (x1, y1), (x2, y2) in zip(poly, np.roll(poly, -1, axis=0)):
        crosses = (y1 > Y) != (y2 > Y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = x1 + (Y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (X < xc)
    return inside


def raster_overlap(P, Q, res: int = 1024):
    """(intersection, union) areas by sampling pixel centres over the joint box."""
    P, Q = np.asarray(P, float), np.asarray(Q, float)
    both = np.vstack([P, Q])
    lo, hi = both.min(axis=0), both.max(axis=0)
    step = (hi - lo) / res
    xs = lo[0] + (np.arange(res) + 0.5) * step[0]
    ys = lo[1] + (np.arange(res) + 0.5) * step[1]
    X, Y = np.meshgrid(xs, ys)
    a, b = _inside(P, X, Y), _inside(Q, X, Y)
    cell = step[0] * step[1]
    return float((a & b).sum() * cell), float((a | b).sum() * cell)


# -- cycles --------------------------------------------------------------------

def simple_cycles_of_walk(walk) -> set:
    """Node sets of all simple cycles (length >= 3) in the graph a closed walk traverses."""
    edges = set()
    for a, b in zip(walk, walk[1:] + walk[:1]):
        if a != b:
            edges.add(frozenset((a, b)))
    adj: dict = {}
    for e in edges:
        a, b = tuple(e)
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    found = set()
    nodes = sorted(adj)
    for s in nodes:
        # cycles whose smallest node is s
        stack = [(s, [s])]
        while stack:
            u, path = stack.pop()
            for v in adj[u]:
                if v == s and len(path) >= 3:
                    found.add(frozenset(path))
                elif v > s and v not in path:
                    stack.append((v, path + [v]))
    return found


# -- kinetic small-step simulation ------------------------------------------------

TOUCH = 1e-9

def _left_normal(d):
    return np.array([-d[1], d[0]])


def _velocity(d_in, d_out):
    n1, n2 = _left_normal(d_in), _left_normal(d_out)
    denom = 1.0 + n1 @ n2
    if denom < 1e-12:
        return np.zeros(2)
    return (n1 + n2) / denom


class _Loop:
    """Vertices: position at time t0, velocity, direction of the side leaving it."""

    def __init__(self, t0, pos, dirs):
        self.t0 = t0
        self.pos = np.asarray(pos, float)
        self.dirs = np.asarray(dirs, float)  # dirs[k]: side k -> k+1
        n = len(self.pos)
        self.vel = np.array([_velocity(self.dirs[k - 1], self.dirs[k]) for k in range(n)])
        cross = np.array([self.dirs[k - 1, 0] * self.dirs[k, 1] - self.dirs[k - 1, 1] * self.dirs[k, 0]
                          for k in range(n)])
        self.reflex = cross < -1e-12


def small_step_events(polygon, dt: float = 1e-4, t_max: float = None, chunk: int = 2000):
    """Events of the inward offset of a counter-clockwise simple polygon.

    Time advances in steps of ``dt``; within the first step where a side
    flips direction (edge event) or a reflex vertex crosses a side (split
    event) the crossing time is found by linear interpolation.  Returns a
    list of (time, kind, (x, y)).
    """
    P = np.asarray(polygon, float)
    if t_max is None:
        t_max = float(np.ptp(P, axis=0).max())
    dirs = np.roll(P, -1, axis=0) - P
    dirs /= np.hypot(dirs[:, 0], dirs[:, 1])[:, None]
    pending = [_Loop(0.0, P, dirs)]
    events = []
    while pending:
        loop = pending.pop()
        found = _run_loop(loop, dt, t_max, chunk)
        if found is None:
            continue
        t, kind, loc, children = found
        events.append((t, kind, loc))
        pending.extend(c for c in children if len(c.pos) >= 3)
    events.sort(key=lambda e: e[0])
    return events


def _run_loop(loop, dt, t_max, chunk):
    n = len(loop.pos)
    k = np.arange(n)
    nxt = (k + 1) % n
    # split candidate pairs: reflex vertex v, side (a, a+1) not touching v
    pairs = [(v, a) for v in k[loop.reflex] for a in k if a != v and (a + 1) % n != v]
    pv = np.array([p[0] for p in pairs], int)
    pa = np.array([p[1] for p in pairs], int)
    pb = (pa + 1) % n
    start = 0
    while loop.t0 + start * dt <= t_max:
        s = np.arange(start, start + chunk + 1) * dt  # elapsed since t0
        X = loop.pos[None, :, :] + s[:, None, None] * loop.vel[None, :, :]
        side = X[:, nxt] - X
        length = np.einsum("tkc,kc->tk", side, loop.dirs)
        best = None
        # a quantity already at zero when the loop starts counts if it is falling
        flips = (length[:-1] > -TOUCH) & (length[1:] <= 0) & (length[1:] < length[:-1])
        if flips.any():
            ts, ks = np.nonzero(flips)
            for r, c in zip(ts, ks):
                f = min(max(length[r, c] / (length[r, c] - length[r + 1, c]), 0.0), 1.0)
                te = s[r] + f * dt
                if best is None or te < best[0] - 1e-9:
                    best = (te, "edge", int(c))
            # only the earliest step matters
        if len(pairs):
            d = loop.dirs[pa]
            nrm = np.stack([-d[:, 1], d[:, 0]], axis=1)
            rel = X[:, pv] - X[:, pa]
            ahead = np.einsum("tpc,pc->tp", rel, nrm)
            span = X[:, pb] - X[:, pa]
            along = np.einsum("tpc,pc->tp", rel, d)
            extent = np.einsum("tpc,pc->tp", span, d)
            cross = (ahead[:-1] > -TOUCH) & (ahead[1:] <= 0) & (ahead[1:] < ahead[:-1])
            if cross.any():
                ts, ps = np.nonzero(cross)
                for r, c in zip(ts, ps):
                    f = min(max(ahead[r, c] / (ahead[r, c] - ahead[r + 1, c]), 0.0), 1.0)
                    u_along = along[r, c] + f * (along[r + 1, c] - along[r, c])
                    u_ext = extent[r, c] + f * (extent[r + 1, c] - extent[r, c])
                    if -1e-9 <= u_along <= u_ext + 1e-9:
                        te = s[r] + f * dt
                        # a split tying with an edge event is that same collision
                        if best is None or te < best[0] - 1e-9:
                            best = (te, "split", int(c))
        if best is not None:
            return _apply(loop, best, pv, pa)
        start += chunk
    return None


def _apply(loop, best, pv, pa):
    te, kind, idx = best
    n = len(loop.pos)
    X = loop.pos + te * loop.vel
    t = loop.t0 + te
    dirs = loop.dirs
    if kind == "edge":
        i, j = idx, (idx + 1) % n
        loc = (X[i] + X[j]) / 2
        order = [(j + 1 + q) % n for q in range(n - 2)]  # j+1 ... i-1
        pos = [loc] + [X[q] for q in order]
        # new vertex keeps i's incoming side and j's outgoing side
        new_dirs = [dirs[j]] + [dirs[q] for q in order]
        child = _Loop(t, pos, new_dirs)
        return t, "edge", tuple(loc), [child]
    v, a = int(pv[idx]), int(pa[idx])
    b = (a + 1) % n
    loc = X[v]
    # first loop: v1, v+1, ..., a ; v1's outgoing side is v's outgoing side
    seq1 = [(v + 1 + q) % n for q in range((a - v) % n)]
    pos1 = [loc] + [X[q] for q in seq1]
    dirs1 = [dirs[v]] + [dirs[q] for q in seq1[:-1]] + [dirs[a]]
    # second loop: v2, b, ..., v-1 ; v2's outgoing side is the hit side
    seq2 = [(b + q) % n for q in range((v - b) % n)]
    pos2 = [loc] + [X[q] for q in seq2]
    dirs2 = [dirs[a]] + [dirs[q] for q in seq2]
    return t, "split", tuple(loc), [_Loop(t, pos1, dirs1), _Loop(t, pos2, dirs2)]

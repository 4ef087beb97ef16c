"""Dot patterns, their Euclidean minimum spanning tree, and the sliver polygon around it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import EPS_GEOM, GeometryError
from .kinetic import KineticPolygon, Line, MovingVertex, make_vertex, vertex_speed

__all__ = [
    "DotPattern",
    "SpanningTree",
    "SliverPolygon",
    "vertex_speed",
    "minimum_spanning_tree",
    "initial_polygon",
]


class DotPattern:
    """An ordered set of distinct 2D dots."""

    def __init__(self, points, meta=None, allow_empty=False):
        xy = np.asarray(points, dtype=float).reshape(-1, 2)
        if len(xy) == 0 and not allow_empty:
            raise GeometryError("a dot pattern needs at least one dot")
        if not np.all(np.isfinite(xy)):
            raise GeometryError("non-finite dot coordinates")
        pairs = cKDTree(xy).query_pairs(EPS_GEOM)
        if pairs:
            i, j = min(pairs)
            raise GeometryError(f"duplicate dots {i} and {j} at {tuple(xy[i])}")
        xy.setflags(write=False)
        self.points = xy
        self.meta = dict(meta or {})

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __repr__(self):
        return f"DotPattern(n={len(self)})"


@dataclass
class SpanningTree:
    node_count: int
    edges: list = field(default_factory=list)  # (a, b, weight) with a < b, in insertion order

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in range(self.node_count)]
        for a, b, _ in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.node_count, dtype=int)
        for a, b, _ in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def leaf_count(self) -> int:
        return int(np.sum(self.degrees() == 1))


def minimum_spanning_tree(Z: DotPattern) -> SpanningTree:
    """Prim's algorithm from dot 0 over the complete Euclidean graph.

    Equal-weight candidates are resolved by the smallest (min index, max index)
    pair, so the result does not depend on floating-point evaluation order.
    """
    if not isinstance(Z, DotPattern):
        Z = DotPattern(Z)
    xy = Z.points
    n = len(xy)
    if n == 0:
        raise GeometryError("cannot span an empty dot pattern")
    tree = SpanningTree(n)
    if n == 1:
        return tree
    idx = np.arange(n)
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    partner = np.full(n, -1)

    def relax(k):
        d = np.hypot(xy[:, 0] - xy[k, 0], xy[:, 1] - xy[k, 1])
        new_lo, new_hi = np.minimum(idx, k), np.maximum(idx, k)
        old_lo, old_hi = np.minimum(idx, partner), np.maximum(idx, partner)
        tie_wins = (new_lo < old_lo) | ((new_lo == old_lo) & (new_hi < old_hi))
        better = ~in_tree & ((d < best) | ((d == best) & tie_wins))
        best[better] = d[better]
        partner[better] = k

    in_tree[0] = True
    relax(0)
    for _ in range(n - 1):
        open_ = np.flatnonzero(~in_tree)
        w = best[open_].min()
        cand = open_[best[open_] == w]
        lo = np.minimum(cand, partner[cand])
        hi = np.maximum(cand, partner[cand])
        j = cand[np.lexsort((hi, lo))[0]]
        a, b = sorted((int(j), int(partner[j])))
        tree.edges.append((a, b, float(w)))
        in_tree[j] = True
        relax(j)
    return tree


class SliverPolygon(KineticPolygon):
    """Zero-width polygon wrapped around a spanning tree."""

    def __init__(self, vertices, tree: SpanningTree):
        super().__init__(vertices, 0.0)
        self.tree = tree


def _sorted_neighbours(tree: SpanningTree, xy: np.ndarray) -> list[list[int]]:
    adj = tree.adjacency()
    out = []
    for u, nbrs in enumerate(adj):
        key = [(math.atan2(xy[b, 1] - xy[u, 1], xy[b, 0] - xy[u, 0]), b) for b in nbrs]
        out.append([b for _, b in sorted(key)])
    return out


def tree_walk(tree: SpanningTree, xy: np.ndarray):
    """Darts (a, u, b) of the boundary walk that keeps the tree on its right.

    Arriving at ``u`` from ``a`` the walk leaves towards ``b``, the first
    neighbour clockwise from ``a``; at a leaf ``b == a``.
    """
    nbrs = _sorted_neighbours(tree, xy)
    start = (nbrs[0][0], 0)
    a, u = start
    darts = []
    while True:
        ring = nbrs[u]
        b = ring[ring.index(a) - 1]
        darts.append((a, u, b))
        a, u = u, b
        if (a, u) == start:
            return darts


def initial_polygon(T: SpanningTree, Z: DotPattern) -> SliverPolygon:
    """Sliver polygon tracing ``T``; every vertex starts on its tree node.

    Internal wedges yield one vertex on the wedge bisector.  A leaf yields two
    vertices joined by a zero-length cap perpendicular to its edge, each moving
    at 45 degrees off the outward edge direction with speed sqrt(2).
    """
    xy = Z.points if isinstance(Z, DotPattern) else np.asarray(Z, dtype=float)
    if T.node_count < 2:
        raise GeometryError("a sliver polygon needs at least 2 dots")
    verts: list[MovingVertex] = []
    for a, u, b in tree_walk(T, xy):
        pa, pu, pb = xy[a], xy[u], xy[b]
        side_in = Line.through(pa, pu)
        if a == b:
            dx, dy = pu - pa
            norm = math.hypot(dx, dy)
            cap = Line(dx / norm, dy / norm, (dx * pu[0] + dy * pu[1]) / norm)
            side_out = Line.through(pu, pa)
            verts.append(make_vertex(len(verts), pu, side_in, cap, tree_node=u))
            verts.append(make_vertex(len(verts), pu, cap, side_out, tree_node=u))
        else:
            verts.append(make_vertex(len(verts), pu, side_in, Line.through(pu, pb), tree_node=u))
    return SliverPolygon(verts, T)

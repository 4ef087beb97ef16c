"""Grouping hypotheses from the polygons generated around a dot pattern's MST.

Every polygon produced while the sliver polygon evolves is traced back
through the vertex ancestry links to the sliver's vertices, then to tree
nodes, and finally cut into simple cycles over the original dots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .geometry import GeometryError, SimplePolygon
from .kinetic import MovingVertex
from .mst import DotPattern, initial_polygon, minimum_spanning_tree
from .skeleton import offset_polygons

__all__ = [
    "Hypothesis",
    "trace_to_initial",
    "map_to_tree",
    "decompose_polygons",
    "normalize_cycle",
    "group",
    "hypotheses_to_json",
]


@dataclass
class Hypothesis:
    dot_indices: tuple
    source_event: Optional[int] = None
    event_time: float = 0.0
    saliency: Optional[float] = None

    def to_json(self) -> dict:
        out = {"dots": list(self.dot_indices), "event_time": self.event_time}
        if self.saliency is not None:
            out["saliency"] = self.saliency
        return out


def _trace_ids(start: int, parents) -> list:
    """Initial-vertex ids reached from ``start``; ``parents[i]`` is (pi_a, pi_b) ids or ()."""
    out = []
    on_path = set()
    stack = [(start, False)]
    while stack:
        i, done = stack.pop()
        if done:
            on_path.discard(i)
            continue
        links = parents[i]
        if not links:
            out.append(i)
            continue
        if i in on_path:
            raise GeometryError(f"cyclic ancestry at vertex {i}")
        on_path.add(i)
        stack.append((i, True))
        # push in reverse so pi_a is expanded first
        for p in reversed(links):
            stack.append((p, False))
    return out


def _parent_table(vertices) -> list:
    table = []
    for v in vertices:
        links = tuple(p.id for p in (v.pi_a, v.pi_b) if p is not None)
        table.append(links)
    return table


def trace_to_initial(v: MovingVertex) -> list:
    """Initial vertices ``v`` descends from, in boundary order.

    An edge-event vertex expands to the trace of ``pi_a`` followed by that of
    ``pi_b``; a split vertex to the trace of ``pi_a``.
    """
    by_id = {}
    stack = [v]
    while stack:
        u = stack.pop()
        if id(u) in by_id:
            continue
        by_id[id(u)] = u
        stack.extend(p for p in (u.pi_a, u.pi_b) if p is not None)
    objs = list(by_id.values())
    index = {id(u): k for k, u in enumerate(objs)}
    parents = [tuple(index[id(p)] for p in (u.pi_a, u.pi_b) if p is not None) for u in objs]
    return [objs[k] for k in _trace_ids(index[id(v)], parents)]


def map_to_tree(seq) -> list:
    """Tree nodes of a traced vertex sequence, consecutive repeats collapsed circularly."""
    nodes = []
    for v in seq:
        u = v.tree_node if isinstance(v, MovingVertex) else int(v)
        if not nodes or nodes[-1] != u:
            nodes.append(u)
    while len(nodes) > 1 and nodes[0] == nodes[-1]:
        nodes.pop()
    return nodes


def _collapse_linear(seq):
    stack = []
    for u in seq:
        if stack and stack[-1] == u:
            continue
        if len(stack) >= 2 and stack[-2] == u:
            stack.pop()
            continue
        stack.append(u)
    return stack


def _collapse_spurs(seq) -> list:
    """Remove out-and-back excursions x,y,x -> x around a circular sequence."""
    cur = list(seq)
    quiet = 0
    while quiet < 2:
        nxt = _collapse_linear(cur)
        while len(nxt) > 1 and nxt[0] == nxt[-1]:
            nxt.pop()
        quiet = quiet + 1 if len(nxt) == len(cur) else 0
        # rotate so spurs straddling the seam are seen by the next pass
        if len(nxt) > 2:
            h = len(nxt) // 2
            nxt = nxt[h:] + nxt[:h]
        cur = nxt
    return cur


def decompose_polygons(seq) -> list:
    """Split a circular node sequence into simple cycles of at least 3 nodes."""
    nodes = _collapse_spurs(map_to_tree(seq))
    if len(nodes) < 3:
        return []
    cycles = []
    stack, where = [], {}
    for u in nodes:
        k = where.get(u)
        if k is None:
            where[u] = len(stack)
            stack.append(u)
            continue
        cycles.append(stack[k:])
        for w in stack[k + 1:]:
            del where[w]
        del stack[k + 1:]
    cycles.append(stack)
    return [c for c in cycles if len(set(c)) >= 3]


def normalize_cycle(cycle) -> tuple:
    """Rotate to start at the smallest index, oriented so the second entry is the smaller neighbour."""
    c = [int(u) for u in cycle]
    k = c.index(min(c))
    c = c[k:] + c[:k]
    if len(c) > 2 and c[-1] < c[1]:
        c = [c[0]] + c[:0:-1]
    return tuple(c)


def group(Z) -> list:
    """Grouping hypotheses of a dot pattern, in order of discovery.

    Polygons born of edge events repeat their parent's ancestry, so only the
    sliver polygon and the children of split events are traced.
    """
    if not isinstance(Z, DotPattern):
        Z = DotPattern(Z)
    if len(Z) < 3:
        return []
    T = minimum_spanning_tree(Z)
    sliver = initial_polygon(T, Z)
    result = offset_polygons(sliver, record="splits")
    parents = _parent_table(result.vertices)
    node_of = [v.tree_node for v in result.vertices]
    seen = set()
    out = []
    for state in result.states:
        psi = []
        for i in state.vertex_ids:
            psi.extend(_trace_ids(i, parents))
        for cyc in decompose_polygons([node_of[i] for i in psi]):
            key = normalize_cycle(cyc)
            if key in seen:
                continue
            seen.add(key)
            try:
                SimplePolygon(Z.points[list(key)])
            except GeometryError:
                continue
            out.append(Hypothesis(key, state.event, float(state.creation_time)))
    return out


def hypotheses_to_json(H) -> str:
    return json.dumps([h.to_json() for h in H], indent=1)

"""Saliency ranking and near-duplicate clustering of grouping hypotheses."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .geometry import shoelace
from .grouping import Hypothesis, normalize_cycle
from .mst import DotPattern

__all__ = ["SelectionParams", "saliency", "overlap", "select"]


@dataclass(frozen=True)
class SelectionParams:
    k: int = 10
    eta: float = 0.5

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta!r}")


def _coords(P, Z):
    if isinstance(P, Hypothesis):
        pts = Z.points if isinstance(Z, DotPattern) else np.asarray(Z, dtype=float)
        return pts[list(P.dot_indices)]
    return np.asarray(P, dtype=float)


def saliency(P, Z=None) -> float:
    """Area over the squared longest side; a hypothesis needs its dot pattern."""
    xy = _coords(P, Z)
    sides = np.roll(xy, -1, axis=0) - xy
    longest = float(np.max(np.einsum("ij,ij->i", sides, sides)))
    if longest == 0.0:
        raise ValueError("polygon has no positive-length side")
    return abs(shoelace(xy)) / longest


def _index_set(P):
    return set(P.dot_indices if isinstance(P, Hypothesis) else P)


def overlap(P, Q) -> float:
    """Jaccard index of the two dot index sets."""
    a, b = _index_set(P), _index_set(Q)
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def select(H, params: SelectionParams = SelectionParams(), Z=None) -> list:
    """Top-K representatives of the clusters of mutually overlapping hypotheses.

    Two hypotheses join a cluster when their overlap is at least ``eta``;
    each cluster is represented by its most salient member.  Returned
    hypotheses carry their saliency, sorted highest first.
    """
    scored = []
    for h in H:
        if Z is not None:
            h = replace(h, saliency=saliency(h, Z))
        elif h.saliency is None:
            raise ValueError("saliency unknown: pass the dot pattern")
        scored.append(h)
    if not scored:
        return []
    # canonical order makes the outcome independent of input order
    scored.sort(key=lambda h: normalize_cycle(h.dot_indices))
    n = len(scored)
    sets = [frozenset(h.dot_indices) for h in scored]
    ds = DisjointSet(range(n))
    inverted: dict = {}
    for i, s in enumerate(sets):
        for d in s:
            inverted.setdefault(d, []).append(i)
    if params.eta <= 0.0:
        # every pair qualifies, including disjoint ones
        for i in range(1, n):
            ds.merge(0, i)
    for i in range(n if params.eta > 0.0 else 0):
        # only hypotheses sharing a dot can reach a positive overlap
        partners = {j for d in sets[i] for j in inverted[d] if j > i}
        for j in sorted(partners):
            inter = len(sets[i] & sets[j])
            if inter / (len(sets[i]) + len(sets[j]) - inter) >= params.eta:
                ds.merge(i, j)
    reps = []
    for comp in ds.subsets():
        best = min(comp, key=lambda i: (-scored[i].saliency, normalize_cycle(scored[i].dot_indices)))
        reps.append(scored[best])
    reps.sort(key=lambda h: (-h.saliency, normalize_cycle(h.dot_indices)))
    return reps[: params.k]

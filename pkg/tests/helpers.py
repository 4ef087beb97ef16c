"""Fixture generators shared by the test modules."""

import numpy as np

from dotgroup.geometry import GeometryError, SimplePolygon
from dotgroup.patterns import sample_shape
from dotgroup.retrieval import ShapeRecord


def star_polygon(rng, m, radius=5.0):
    """Random star-shaped simple polygon with ``m`` vertices (diameter <= 2 * radius)."""
    while True:
        ang = np.sort(rng.uniform(0, 2 * np.pi, m))
        r = rng.uniform(0.3 * radius, radius, m)
        try:
            return SimplePolygon(np.column_stack([r * np.cos(ang), r * np.sin(ang)]))
        except GeometryError:
            continue


def convex_polygon(rng, m, radius=5.0):
    ang = np.sort(rng.uniform(0, 2 * np.pi, m))
    while np.any(np.diff(np.r_[ang, ang[0] + 2 * np.pi]) < 1e-3):
        ang = np.sort(rng.uniform(0, 2 * np.pi, m))
    return SimplePolygon(np.column_stack([radius * np.cos(ang), radius * np.sin(ang)]))


def random_tree_points(rng, n):
    return rng.uniform(0, 100, (n, 2))


def blob_boundary(seed, count=200):
    """Smooth closed curve: a circle with a few random low-frequency harmonics."""
    rng = np.random.default_rng(seed)
    th = 2 * np.pi * np.arange(count) / count
    r = np.ones(count)
    for k in range(2, 6):
        r += rng.uniform(0, 0.7 / k) * np.cos(k * th + rng.uniform(0, 2 * np.pi))
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def fitted_boundary(boundary, stride=10, target=(200.0, 200.0, 800.0, 800.0)):
    """The full boundary under the same similarity ``sample_shape`` applies to its samples."""
    b = np.asarray(boundary, float)
    pts = b[::stride]
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    x0, y0, x1, y1 = target
    scale = min((x1 - x0) / (hi - lo)[0], (y1 - y0) / (hi - lo)[1])
    return (b - (lo + hi) / 2) * scale + np.array([(x0 + x1) / 2, (y0 + y1) / 2])


def procedural_suite(count=10, first_seed=100):
    """(name, shape dots, database record) for ``count`` blob shapes."""
    out = []
    for i in range(count):
        b = blob_boundary(first_seed + i)
        name = f"blob{i:02d}"
        rec = ShapeRecord(name, SimplePolygon(fitted_boundary(b)), "blob")
        out.append((name, sample_shape(b, 10), rec))
    return out

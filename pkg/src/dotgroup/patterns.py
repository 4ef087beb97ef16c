"""Synthetic dot patterns, edge-mask subsampling and pattern file I/O."""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import GeometryError
from .mst import DotPattern

__all__ = [
    "NoiseSpec",
    "sample_shape",
    "mean_spacing",
    "gen_noise",
    "frame_circle",
    "subsample_edges",
    "assemble",
    "load_pattern",
    "save_pattern",
    "load_mask",
    "write_atomic",
]

DEFAULT_BOX = (200.0, 200.0, 800.0, 800.0)


@dataclass(frozen=True)
class NoiseSpec:
    s: float = 1.0
    seed: int = 0
    region: tuple = DEFAULT_BOX  # (xmin, ymin, xmax, ymax)
    margin_fraction: float = 0.10

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("noise level s must be non-negative")
        if not 0.0 <= self.margin_fraction < 0.5:
            raise ValueError("margin_fraction must lie in [0, 0.5)")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError("seed must be an unsigned integer")


def sample_shape(boundary, stride: int = 10, target=DEFAULT_BOX) -> DotPattern:
    """Every ``stride``-th boundary point, scaled and centred to fit ``target``."""
    xy = np.asarray(boundary, dtype=float).reshape(-1, 2)
    if stride < 1:
        raise ValueError("stride must be at least 1")
    if len(xy) < max(stride, 3):
        raise GeometryError(f"boundary has {len(xy)} points, need at least {max(stride, 3)}")
    pts = xy[::stride]
    if len(pts) < 3:
        raise GeometryError("fewer than 3 points left after subsampling")
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    extent = hi - lo
    if extent.max() <= 0:
        raise GeometryError("boundary points coincide")
    x0, y0, x1, y1 = map(float, target)
    box = np.array([x1 - x0, y1 - y0])
    with np.errstate(divide="ignore"):
        scale = float(np.min(np.where(extent > 0, box / extent, np.inf)))
    centre = np.array([(x0 + x1) / 2, (y0 + y1) / 2])
    out = (pts - (lo + hi) / 2) * scale + centre
    return DotPattern(out)


def mean_spacing(points) -> float:
    """Mean distance between consecutive points of a closed sequence."""
    xy = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(xy) < 2:
        raise GeometryError("spacing needs at least 2 points")
    d = np.roll(xy, -1, axis=0) - xy
    return float(np.mean(np.hypot(d[:, 0], d[:, 1])))


def gen_noise(shape_dots, spec: NoiseSpec) -> DotPattern:
    """Shape dots followed by one random dot per grid cell of side ``s * mu``.

    Cells are laid from the region's low corner; cells that would cross the
    far border are skipped.  Each dot avoids a margin of ``margin_fraction``
    of the cell size along every cell border.
    """
    xy = shape_dots.points if isinstance(shape_dots, DotPattern) else np.asarray(shape_dots, float)
    meta = dict(getattr(shape_dots, "meta", {}) or {})
    meta.update(s=spec.s, seed=int(spec.seed))
    if spec.s == 0:
        return DotPattern(xy, meta)
    cell = spec.s * mean_spacing(xy)
    x0, y0, x1, y1 = map(float, spec.region)
    # the small slack keeps an exact fit such as 600 / 60 from losing a cell
    nx = int(math.floor((x1 - x0) / cell + 1e-9))
    ny = int(math.floor((y1 - y0) / cell + 1e-9))
    rng = np.random.default_rng(int(spec.seed))
    u = rng.random((ny * nx, 2))
    gy, gx = np.divmod(np.arange(ny * nx), nx)
    lo = spec.margin_fraction
    frac = lo + (1.0 - 2.0 * lo) * u
    noise = np.column_stack([x0 + (gx + frac[:, 0]) * cell, y0 + (gy + frac[:, 1]) * cell])
    return DotPattern(np.vstack([xy, noise]), meta)


def frame_circle(center=(500.0, 500.0), radius: float = 490.0, count: int = 32) -> DotPattern:
    if count < 3:
        raise ValueError("a frame circle needs at least 3 dots")
    ang = 2.0 * np.pi * np.arange(count) / count
    cx, cy = map(float, center)
    return DotPattern(np.column_stack([cx + radius * np.cos(ang), cy + radius * np.sin(ang)]))


def assemble(shape_dots, spec: NoiseSpec, frame: bool = True, meta=None) -> DotPattern:
    """Shape, noise and (optionally) the frame circle in one pattern."""
    noisy = gen_noise(shape_dots, spec)
    pts = noisy.points
    if frame:
        pts = np.vstack([pts, frame_circle().points])
    info = dict(noisy.meta)
    info.update(meta or {})
    info["frame"] = bool(frame)
    return DotPattern(pts, info)


def subsample_edges(mask) -> DotPattern:
    """One dot per non-empty 4x4 block, at the rounded centroid of its set pixels.

    Dots are (x, y) = (column, row); halves round up.
    """
    m = np.asarray(mask).astype(bool)
    if m.ndim != 2:
        raise ValueError("mask must be a 2D array")
    h, w = m.shape
    if h < 4 or w < 4:
        raise ValueError("mask must be at least 4x4")
    H, W = -(-h // 4) * 4, -(-w // 4) * 4
    pad = np.zeros((H, W), dtype=bool)
    pad[:h, :w] = m
    rows, cols = np.mgrid[0:H, 0:W]
    blocks = lambda a: a.reshape(H // 4, 4, W // 4, 4).sum(axis=(1, 3))
    count = blocks(pad.astype(np.int64))
    sx = blocks(np.where(pad, cols, 0))
    sy = blocks(np.where(pad, rows, 0))
    by, bx = np.nonzero(count)
    c = count[by, bx]
    x = np.floor(sx[by, bx] / c + 0.5)
    y = np.floor(sy[by, bx] / c + 0.5)
    return DotPattern(np.column_stack([x, y]), {"source": "edge-mask"}, allow_empty=True)


# -- files ---------------------------------------------------------------------

def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def pattern_to_json(Z: DotPattern) -> str:
    doc = {"points": [[float(x), float(y)] for x, y in Z.points], "meta": Z.meta}
    return json.dumps(doc, sort_keys=True) + "\n"


def save_pattern(Z: DotPattern, path) -> None:
    write_atomic(path, pattern_to_json(Z))


def load_pattern(path) -> DotPattern:
    """Read a pattern from JSON ({"points", "meta"}) or CSV (x,y per line)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        rows = []
        for k, row in enumerate(csv.reader(text.splitlines()), 1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if k == 1:
                    continue  # header line
                raise ValueError(f"{path}:{k}: expected 'x,y'") from None
        return DotPattern(rows, {"source": path.name})
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed JSON ({exc})") from None
    if isinstance(doc, list):
        return DotPattern(doc)
    if not isinstance(doc, dict) or "points" not in doc:
        raise ValueError(f"{path}: expected an object with a 'points' list")
    return DotPattern(doc["points"], doc.get("meta"))


def load_mask(path) -> np.ndarray:
    """Binary mask from an image file (PGM, PNG, ...); nonzero pixels are set."""
    from PIL import Image

    with Image.open(path) as im:
        return np.asarray(im.convert("L")) > 0

"""Matching selected hypotheses against a database of shapes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .geometry import GeometryError, SimplePolygon, matching_score
from .mst import DotPattern

__all__ = [
    "ShapeRecord",
    "Database",
    "RetrievalResult",
    "build_database",
    "load_shapes",
    "retrieve",
    "format_table",
]

DISTRACTOR_CIRCLE = "circle"
DISTRACTOR_SQUARE = "square"


@dataclass(frozen=True)
class ShapeRecord:
    name: str
    polygon: SimplePolygon
    category: str = ""
    ignorable: bool = False


@dataclass
class Database:
    records: list  # ShapeRecord sorted by name

    def __len__(self):
        return len(self.records)

    def names(self) -> list:
        return [r.name for r in self.records]

    def get(self, name: str) -> Optional[ShapeRecord]:
        for r in self.records:
            if r.name == name:
                return r
        return None


@dataclass
class RetrievalResult:
    best_shape: Optional[str]
    score: float
    success: bool
    per_query: list = field(default_factory=list)  # (query id, shape, score, ignored)

    def to_json(self) -> dict:
        return {
            "best_shape": self.best_shape,
            "score": self.score,
            "success": self.success,
            "per_query": [
                {"query": q, "shape": s, "score": sc, "ignored": ig}
                for q, s, sc, ig in self.per_query
            ],
        }


def _distractors() -> list:
    ang = 2.0 * np.pi * np.arange(64) / 64
    circle = np.column_stack([500.0 + 490.0 * np.cos(ang), 500.0 + 490.0 * np.sin(ang)])
    square = [(200.0, 200.0), (800.0, 200.0), (800.0, 800.0), (200.0, 800.0)]
    return [
        ShapeRecord(DISTRACTOR_CIRCLE, SimplePolygon(circle), "frame", True),
        ShapeRecord(DISTRACTOR_SQUARE, SimplePolygon(square), "frame", True),
    ]


def build_database(shapes=()) -> Database:
    """Caller shapes plus the two ignorable frame distractors."""
    records = list(shapes) + _distractors()
    seen = set()
    for r in records:
        if r.name in seen:
            raise ValueError(f"duplicate shape name {r.name!r}")
        seen.add(r.name)
    return Database(sorted(records, key=lambda r: r.name))


def shape_from_json(doc: dict) -> ShapeRecord:
    try:
        name, points = doc["name"], doc["points"]
    except (KeyError, TypeError):
        raise ValueError("shape file needs 'name' and 'points'") from None
    return ShapeRecord(str(name), SimplePolygon(points), str(doc.get("category", "")))


def load_shapes(directory) -> list:
    """Shape records from every ``*.json`` file in ``directory``, in file-name order."""
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"shape database directory not found: {d}")
    out = []
    for p in sorted(d.glob("*.json")):
        try:
            out.append(shape_from_json(json.loads(p.read_text(encoding="utf-8"))))
        except (ValueError, GeometryError) as exc:
            raise ValueError(f"{p}: {exc}") from None
    return out


def retrieve(queries, db: Database, Z, truth: Optional[str] = None) -> RetrievalResult:
    """Best (query, shape) match, skipping queries whose best match is a distractor.

    Each query keeps its best shape (ties go to the earlier name).  Among the
    queries left, the highest score wins; ties go to the earlier name, then to
    the earlier query.
    """
    pts = Z.points if isinstance(Z, DotPattern) else np.asarray(Z, dtype=float)
    per_query = []
    best = None  # (score, name index, query index)
    for qi, h in enumerate(queries):
        idx = list(getattr(h, "dot_indices", h))
        try:
            poly = SimplePolygon(pts[idx])
        except GeometryError:
            continue
        scores = [matching_score(poly, r.polygon) for r in db.records]
        k = int(np.argmax(scores))  # first maximum, i.e. name order on ties
        rec = db.records[k]
        per_query.append((qi, rec.name, float(scores[k]), rec.ignorable))
        if rec.ignorable:
            continue
        key = (-scores[k], k, qi)
        if best is None or key < best:
            best = key
    if best is None:
        return RetrievalResult(None, 0.0, False, per_query)
    name = db.records[best[1]].name
    return RetrievalResult(name, float(-best[0]), truth is not None and name == truth, per_query)


def format_table(rows: dict, columns: list) -> str:
    """Text table of winners: ``rows[pattern][column]`` is a RetrievalResult.

    A final line reports the success rate and mean score per column.
    """
    cells = {p: [] for p in rows}
    for p, by_col in rows.items():
        for c in columns:
            r = by_col.get(c)
            cells[p].append("-" if r is None or r.best_shape is None
                            else f"{r.best_shape} {r.score:.3f}")
    rate, mean = [], []
    for c in columns:
        res = [by_col[c] for by_col in rows.values() if c in by_col]
        rate.append(f"rate {np.mean([r.success for r in res]):.3f}" if res else "-")
        mean.append(f"mean {np.mean([r.score for r in res]):.3f}" if res else "-")
    header = ["shape"] + [str(c) for c in columns]
    body = [[p] + cells[p] for p in rows] + [["rate"] + rate, ["score"] + mean]
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    fmt = lambda r: "  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip()
    return "\n".join([fmt(header), fmt(["-" * w for w in widths])] + [fmt(r) for r in body]) + "\n"

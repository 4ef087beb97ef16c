"""Command-line front end: dotgroup <command> [options]."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .geometry import GeometryError, SimplePolygon
from .grouping import Hypothesis, group
from .kinetic import KineticPolygon
from .mst import DotPattern, initial_polygon, minimum_spanning_tree
from .patterns import (
    NoiseSpec,
    assemble,
    load_mask,
    load_pattern,
    pattern_to_json,
    sample_shape,
    subsample_edges,
    write_atomic,
)
from .retrieval import RetrievalResult, build_database, format_table, load_shapes, retrieve
from .selection import SelectionParams, select
from .skeleton import SimulationError, offset_polygons
from .svg import render

PATTERN_SUFFIXES = (".json", ".csv")


class DataError(Exception):
    """Bad input data; reported on one line with exit status 1."""


def _dumps(obj) -> str:
    """Deterministic JSON; list items and top-level keys one per line."""
    enc = lambda v: json.dumps(v, sort_keys=True)
    if isinstance(obj, list):
        return "[\n" + ",\n".join(enc(v) for v in obj) + ("\n]\n" if obj else "]\n")
    if isinstance(obj, dict):
        items = [f"{enc(k)}: {enc(obj[k])}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n}\n"
    return enc(obj) + "\n"


def _emit(text: str, out) -> None:
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def _inputs(path) -> list:
    p = Path(path)
    if p.is_dir():
        files = sorted(f for f in p.iterdir() if f.suffix.lower() in PATTERN_SUFFIXES)
        if not files:
            raise DataError(f"no pattern files in {p}")
        return files
    if not p.exists():
        raise DataError(f"file not found: {p}")
    return [p]


def _batch(args, one):
    """Apply ``one(path) -> text`` to each input; a directory input needs --out DIR."""
    files = _inputs(args.input)
    if len(files) == 1 and not Path(args.input).is_dir():
        _emit(one(files[0]), args.out)
        return
    if args.out is None:
        raise DataError("--out DIR is required when --in is a directory")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            texts = list(pool.map(one, files))
    else:
        texts = [one(f) for f in files]
    for f, text in zip(files, texts):
        write_atomic(out_dir / (f.stem + ".json"), text)


def _params(args) -> SelectionParams:
    try:
        return SelectionParams(args.k, args.eta)
    except ValueError as exc:
        raise DataError(str(exc)) from None


# -- commands ----------------------------------------------------------------

def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: malformed JSON ({exc})") from None


def cmd_gen(args):
    try:
        doc = _read_json(args.shape)
        boundary = doc["points"] if isinstance(doc, dict) else doc
    except (KeyError, TypeError):
        raise DataError(f"{args.shape}: expected a shape object with 'points'") from None
    dots = sample_shape(boundary, args.stride)
    name = doc.get("name", Path(args.shape).stem) if isinstance(doc, dict) else Path(args.shape).stem
    Z = assemble(dots, NoiseSpec(s=args.s, seed=args.seed), frame=not args.no_frame,
                 meta={"shape": name, "shape_dots": len(dots)})
    _emit(pattern_to_json(Z), args.out)


class _GroupJob:
    def __init__(self, params, svg):
        self.params, self.svg = params, svg

    def __call__(self, path):
        Z = load_pattern(path)
        H = group(Z)
        if self.svg:
            sel = select(H, self.params, Z)
            write_atomic(self.svg, render(Z, minimum_spanning_tree(Z), sel, best=0))
        return _dumps([h.to_json() for h in H])


def cmd_group(args):
    if args.svg and Path(args.input).is_dir():
        raise DataError("--svg takes a single pattern, not a directory")
    _batch(args, _GroupJob(_params(args), args.svg))


def _load_hypotheses(path) -> list:
    doc = _read_json(path)
    try:
        return [Hypothesis(tuple(int(i) for i in d["dots"]), None, float(d.get("event_time", 0)))
                for d in doc]
    except (KeyError, TypeError):
        raise DataError(f"{path}: expected a list of {{'dots': [...]}} objects") from None


class _SelectJob:
    def __init__(self, params, hyp, svg):
        self.params, self.hyp, self.svg = params, hyp, svg

    def __call__(self, path):
        Z = load_pattern(path)
        H = _load_hypotheses(self.hyp) if self.hyp else group(Z)
        for h in H:
            if min(h.dot_indices) < 0 or max(h.dot_indices) >= len(Z):
                raise DataError(f"hypothesis {list(h.dot_indices)} indexes outside the pattern")
        sel = select(H, self.params, Z)
        if self.svg:
            write_atomic(self.svg, render(Z, minimum_spanning_tree(Z), sel, best=0))
        return _dumps([h.to_json() for h in sel])


def cmd_select(args):
    if (args.hyp or args.svg) and Path(args.input).is_dir():
        raise DataError("--hyp and --svg take a single pattern, not a directory")
    _batch(args, _SelectJob(_params(args), args.hyp, args.svg))


def cmd_skeleton(args):
    doc = _read_json(args.input)
    points = doc.get("points") if isinstance(doc, dict) else doc
    if not isinstance(points, list):
        raise DataError(f"{args.input}: expected a 'points' list")
    if args.sliver:
        Z = DotPattern(points)
        P = initial_polygon(minimum_spanning_tree(Z), Z)
    else:
        P = KineticPolygon.from_polygon(SimplePolygon(points))
    result = offset_polygons(P)
    if args.events:
        write_atomic(args.events, "".join(json.dumps(e.to_json()) + "\n" for e in result.events))
    out = {
        "arcs": [[list(p), list(q)] for p, q in result.skeleton_arcs],
        "events": len(result.events),
        "nodes": [list(p) for p in result.skeleton_nodes()],
        "polygons": len(result.states),
    }
    _emit(_dumps(out), args.out)


class _RetrieveJob:
    def __init__(self, params, db, truth):
        self.params, self.db, self.truth = params, db, truth

    def __call__(self, path):
        Z = load_pattern(path)
        truth = self.truth or Z.meta.get("shape")
        sel = select(group(Z), self.params, Z)
        res = retrieve(sel, self.db, Z, truth)
        report = res.to_json()
        report.update(pattern=Path(path).name, truth=truth, noise=Z.meta.get("s"))
        return _dumps(report)


def cmd_retrieve(args):
    db = build_database(load_shapes(args.db))
    job = _RetrieveJob(_params(args), db, args.truth)
    _batch(args, job)
    if args.table:
        rows: dict = {}
        noise = set()
        out_dir = Path(args.out) if Path(args.input).is_dir() else None
        for f in _inputs(args.input):
            if out_dir is not None:
                rep = json.loads((out_dir / (f.stem + ".json")).read_text(encoding="utf-8"))
            else:
                rep = json.loads(job(f))
            col = "s=-" if rep["noise"] is None else f"s={rep['noise']:g}"
            noise.add((rep["noise"] is None, rep["noise"] or 0, col))
            rows.setdefault(str(rep["truth"]), {})[col] = RetrievalResult(
                rep["best_shape"], rep["score"], rep["success"])
        cols = [c for _, _, c in sorted(noise)]
        write_atomic(args.table, format_table(rows, cols))


def cmd_subsample(args):
    try:
        mask = load_mask(args.mask)
    except OSError as exc:
        raise DataError(f"cannot read mask {args.mask}: {exc}") from None
    _emit(pattern_to_json(subsample_edges(mask)), args.out)


# -- parser --------------------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dotgroup", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def selection_flags(p):
        p.add_argument("--k", type=_positive_int, default=10, help="hypotheses kept (default 10)")
        p.add_argument("--eta", type=float, default=0.5, help="overlap merge threshold (default 0.5)")

    def batch_flags(p):
        p.add_argument("--in", dest="input", required=True, help="pattern file or directory")
        p.add_argument("--out", help="output file, or directory in batch mode (default stdout)")
        p.add_argument("--jobs", type=_positive_int, default=1, help="parallel workers in batch mode")

    p = sub.add_parser("gen", help="synthetic pattern from a shape boundary")
    p.add_argument("--shape", required=True, help="JSON with 'points' (and optional 'name')")
    p.add_argument("--stride", type=_positive_int, default=10)
    p.add_argument("--s", type=float, default=0.0, help="noise level, 0 for none")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-frame", action="store_true", help="omit the 32-dot frame circle")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("group", help="all grouping hypotheses of a pattern")
    batch_flags(p)
    selection_flags(p)
    p.add_argument("--svg", help="figure with the top-K selection")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("select", help="top-K salient hypotheses")
    batch_flags(p)
    selection_flags(p)
    p.add_argument("--hyp", help="hypotheses from 'group' (recomputed if omitted)")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("skeleton", help="offset events and skeleton of a polygon")
    p.add_argument("--in", dest="input", required=True, help="JSON with 'points'")
    p.add_argument("--sliver", action="store_true",
                   help="treat points as dots and offset the polygon around their MST")
    p.add_argument("--events", help="write the event log as JSON lines")
    p.add_argument("--out")
    p.set_defaults(func=cmd_skeleton)

    p = sub.add_parser("retrieve", help="match selected hypotheses against a shape database")
    batch_flags(p)
    selection_flags(p)
    p.add_argument("--db", required=True, help="directory of shape JSON files")
    p.add_argument("--truth", help="expected shape name (default: the pattern's meta.shape)")
    p.add_argument("--table", help="write a text table of winners per noise level")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("subsample", help="dots from a binary edge mask")
    p.add_argument("--mask", required=True, help="PGM/PNG edge mask")
    p.add_argument("--out")
    p.set_defaults(func=cmd_subsample)
    return ap


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors (2) and --help (0)
        return exc.code if isinstance(exc.code, int) else 2
    try:
        args.func(args)
    except (DataError, GeometryError, SimulationError, ValueError, OSError) as exc:
        msg = " ".join(str(exc).split()) or type(exc).__name__
        print(f"dotgroup: error: {msg}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

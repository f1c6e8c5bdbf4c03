"""Command-line interface: ``fvc analyze | batch | compare | synth | config``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FvcError
from .measure import cosine_similarity
from .pipeline import PipelineConfig, analyze
from .raster import read_image, write_image
from .vegetation import EXCESS_GREEN, HUE_WINDOW, vegetation_overlay

log = logging.getLogger("fvc")

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 64

CSV_COLUMNS = (
    "filename",
    "segment",
    "polygon_pixels",
    "vegetation_pixels",
    "percent",
    "area_sq_in",
    "area_sq_cm",
    "daubenmire_class",
    "error",
)
TRUTH_COLUMNS = ("filename", "segment", "opening_pixels", "vegetation_pixels", "fraction", "percent")
IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


class CompareError(FvcError):
    """Reference and candidate tables cannot be compared."""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected H,S,V numbers, got {text!r}") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    return vals


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _segments(text: str) -> int | None:
    return None if text == "auto" else _positive_int(text)


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    d = PipelineConfig()
    p.add_argument("--segments", type=_segments, default=d.n_segments, metavar="N|auto",
                   help="number of frame openings (default: counted from the frame)")
    p.add_argument("--superpixels", type=_positive_int, default=d.superpixels, help="target superpixel count")
    p.add_argument("--compactness", type=float, default=d.compactness)
    p.add_argument("--hsv-lo", type=_triple, default=d.hsv_lo, metavar="H,S,V")
    p.add_argument("--hsv-hi", type=_triple, default=d.hsv_hi, metavar="H,S,V")
    p.add_argument("--green-mode", choices=(HUE_WINDOW, EXCESS_GREEN), default=d.green.mode)
    p.add_argument("--seed", type=int, default=d.seed, help="seed for the Hough pixel sample")


def config_from_args(args) -> PipelineConfig:
    d = PipelineConfig()
    try:
        return replace(
            d,
            n_segments=args.segments,
            superpixels=args.superpixels,
            compactness=args.compactness,
            hsv_lo=tuple(args.hsv_lo),
            hsv_hi=tuple(args.hsv_hi),
            green=replace(d.green, mode=args.green_mode),
            seed=args.seed,
        )
    except ValueError as e:
        raise _UsageError(str(e)) from e


# ---------------------------------------------------------------- drawing


def _draw_segment(img, p0, p1, color, thickness=2):
    h, w = img.shape[:2]
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    n = int(np.ceil(np.linalg.norm(p1 - p0))) + 1
    t = np.linspace(0.0, 1.0, n)[:, None]
    pts = np.rint(p0 + t * (p1 - p0)).astype(int)
    r = thickness // 2
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            x, y = pts[:, 0] + dx, pts[:, 1] + dy
            ok = (x >= 0) & (x < w) & (y >= 0) & (y < h)
            img[y[ok], x[ok]] = color


def lines_image(result) -> np.ndarray:
    """Rectified frame with Hough segments in red and segment quads in yellow."""
    out = result.extraction.rectified.copy()
    for s in result.lines:
        _draw_segment(out, s.p0, s.p1, (255, 0, 0))
    for q in result.quads:
        for a, b in zip(q.quad, np.roll(q.quad, -1, axis=0)):
            _draw_segment(out, a, b, (255, 255, 0))
    return out


def write_overlays(result, out_dir: Path, stem: str) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = result.extraction
    items = [
        (f"{stem}_rectified.png", ext.rectified),
        (f"{stem}_vegetation.png", vegetation_overlay(ext.rectified, result.vegetation)),
        (f"{stem}_lines.png", lines_image(result)),
    ]
    items += [(f"{stem}_segment{i}_mask.png", m) for i, m in enumerate(result.masks)]
    paths = []
    for name, img in items:
        path = out_dir / name
        write_image(path, img)
        paths.append(path)
    return paths


# ---------------------------------------------------------------- commands


def _load(path) -> np.ndarray:
    try:
        return read_image(path)
    except ValueError as e:  # unsupported format counts as an I/O failure
        raise OSError(str(e)) from e


def cmd_analyze(image_path, config: PipelineConfig, overlay_dir=None, out=None) -> dict:
    img = _load(image_path)
    result = analyze(img, config)
    doc = {
        "tool": "fvc",
        "version": __version__,
        "image": str(image_path),
        "config": config.to_dict(),
        "segments": [r.to_dict() for r in result.reports],
    }
    if overlay_dir is not None:
        doc["overlays"] = [str(p) for p in write_overlays(result, Path(overlay_dir), Path(image_path).stem)]
    text = json.dumps(doc, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return doc


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _analyze_rows(job):
    path, config = job
    name = Path(path).name
    try:
        img = _load(path)
    except OSError as e:
        return name, [], f"IOError: {e}"
    try:
        reports = analyze(img, config).reports
    except FvcError as e:
        return name, [], f"{type(e).__name__}: {e}"
    rows = [
        [name, str(r.segment_index), str(r.polygon_pixels), str(r.vegetation_pixels), _fmt(r.percent),
         _fmt(r.area_sq_in), _fmt(r.area_sq_cm), str(r.daubenmire_class), ""]
        for r in reports
    ]
    return name, rows, None


def list_images(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise NotADirectoryError(f"not a directory: {directory}")
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def cmd_batch(directory, config: PipelineConfig, csv_path=None, jobs: int | None = None) -> tuple[str, int]:
    """Analyze every image in ``directory``; returns (csv text, number of failed images)."""
    paths = list_images(directory)
    work = [(str(p), config) for p in paths]
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(work))) as pool:
            results = list(pool.map(_analyze_rows, work))
    else:
        results = [_analyze_rows(w) for w in work]

    rows, failures = [], 0
    for name, image_rows, err in results:
        if err is not None:
            failures += 1
            log.warning("%s: %s", name, err)
            rows.append([name, "", "", "", "", "", "", "", err])
        rows.extend(image_rows)
    rows.sort(key=lambda r: (r[0], int(r[1]) if r[1] else -1))

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)
    text = buf.getvalue()
    if csv_path is None:
        sys.stdout.write(text)
    else:
        Path(csv_path).write_text(text)
    return text, failures


def _read_table(path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        if "filename" not in cols or "percent" not in cols:
            raise CompareError(f"{path}: needs 'filename' and 'percent' columns")
        keyed = {}
        for row in reader:
            if not row["percent"]:
                continue  # failed analysis row
            key = (row["filename"], row.get("segment") or "")
            keyed[key] = float(row["percent"])
        return {"segmented": "segment" in cols, "rows": keyed}


def cmd_compare(ours_path, ref_path) -> dict:
    ours, ref = _read_table(ours_path), _read_table(ref_path)
    by_segment = ours["segmented"] and ref["segmented"]

    def rekey(t):
        if by_segment:
            return t["rows"]
        out = {}
        for (name, _), v in t["rows"].items():
            if name in out:
                raise CompareError(f"duplicate filename {name!r} without a segment column")
            out[name] = v
        return out

    a, b = rekey(ours), rekey(ref)
    keys = sorted(set(a) & set(b))
    if not keys:
        raise CompareError("no overlapping filenames between the two tables")
    va = np.array([a[k] for k in keys])
    vb = np.array([b[k] for k in keys])
    try:
        cos = cosine_similarity(va, vb)
    except ValueError as e:
        raise CompareError(str(e)) from e
    return {
        "n": len(keys),
        "cosine_similarity": cos,
        "ours": {"mean": float(np.mean(va)), "median": float(statistics.median(va.tolist()))},
        "ref": {"mean": float(np.mean(vb)), "median": float(statistics.median(vb.tolist()))},
    }


def load_scene_specs(path) -> list:
    from .synth import SceneSpec

    try:
        doc = json.loads(Path(path).read_text())
        entries = doc["scenes"] if isinstance(doc, dict) and "scenes" in doc else doc
        if isinstance(entries, dict):
            entries = [entries]
        if not isinstance(entries, list):
            raise TypeError("expected a scene object or a list of scenes")
        specs = [SceneSpec.from_dict(e) for e in entries]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise _UsageError(f"malformed scene spec {path}: {e}") from e
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise _UsageError(f"malformed scene spec {path}: duplicate scene names")
    return specs


def cmd_synth(specs, out_dir) -> Path:
    from .synth import render

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRUTH_COLUMNS)
    for spec in specs:
        image, truth = render(spec)
        fname = f"{spec.name}.png"
        write_image(out_dir / fname, image)
        for s in truth.segments:
            w.writerow([fname, s.segment_index, s.opening_pixels, s.vegetation_pixels, f"{s.fraction:.6f}", _fmt(100.0 * s.fraction)])
    truth_path = out_dir / "ground_truth.csv"
    truth_path.write_text(buf.getvalue())
    return truth_path


def default_config_dict() -> dict:
    return PipelineConfig().to_dict()


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fvc", description="Estimate vegetation cover inside a quadrat frame.")
    parser.add_argument("--version", action="version", version=f"fvc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze one image and write a JSON report")
    p.add_argument("path")
    _add_pipeline_args(p)
    p.add_argument("--overlay", metavar="DIR", help="write diagnostic PNGs here")
    p.add_argument("--out", metavar="FILE", help="JSON report path (default stdout)")

    p = sub.add_parser("batch", help="analyze every image in a directory into one CSV")
    p.add_argument("dir")
    p.add_argument("--csv", metavar="FILE", required=True)
    p.add_argument("--jobs", type=_positive_int, default=None, help="worker processes (default: CPU count)")
    _add_pipeline_args(p)

    p = sub.add_parser("compare", help="cosine similarity between two percent tables")
    p.add_argument("--ours", required=True, metavar="FILE")
    p.add_argument("--ref", required=True, metavar="FILE")

    p = sub.add_parser("synth", help="render synthetic scenes with ground truth")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", metavar="FILE", help="JSON scene document")
    src.add_argument("--suite", type=_positive_int, metavar="N", help="render the seeded N-scene test suite")
    p.add_argument("--out", required=True, metavar="DIR")

    sub.add_parser("config", help="print the default configuration as JSON")
    return parser


def _setup_logging():
    level = os.environ.get("FVC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        if args.command == "analyze":
            cmd_analyze(args.path, config_from_args(args), args.overlay, args.out)
        elif args.command == "batch":
            _, failures = cmd_batch(args.dir, config_from_args(args), args.csv, args.jobs)
            if failures:
                print(f"warning: {failures} image(s) failed", file=sys.stderr)
        elif args.command == "compare":
            print(json.dumps(cmd_compare(args.ours, args.ref), indent=2))
        elif args.command == "synth":
            if args.spec:
                specs = load_scene_specs(args.spec)
            else:
                from .synth import acceptance_suite

                specs = acceptance_suite(args.suite)
            cmd_synth(specs, args.out)
        elif args.command == "config":
            print(json.dumps(default_config_dict(), indent=2))
    except _UsageError as e:
        print(f"fvc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FvcError as e:
        print(f"fvc: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"fvc: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

    lsrdet detect --input <path> [--field] [--config <path>] --output <path>
    lsrdet encode --ann <path> [--width W --height H] --output <path>
    lsrdet eval --pred <dir> --ref <dir> [--report <path>]
    lsrdet bench --fields <dir> [--config <path>] [--reps N]
    lsrdet config --output <path>

``detect`` also accepts a directory for ``--input``, writing one
``<stem>.json`` per input into the ``--output`` directory. ``LSR_THREADS``
caps the worker pool of batch commands.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import config as cfgmod
from .bench import bench_fields
from .config import ConfigError, PipelineConfig
from .dataset import (
    IMAGE_SUFFIXES,
    AnnotationError,
    load_annotation_set,
    read_segments,
    write_segments,
)
from .encode import encode_ground_truth
from .evaluate import aggregate, score
from .frontend import ImageReadError, LSDFError, load_field, load_image, save_field
from .pipeline import detect_field, detect_image

log = logging.getLogger("lsrdet")

EXIT_OK = 0
EXIT_FILE_ERRORS = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_LSDF = 4
EXIT_CONFIG = 5
EXIT_ANNOTATION = 6


def worker_count() -> int:
    try:
        n = int(os.environ.get("LSR_THREADS", ""))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _pmap(fn, items):
    items = list(items)
    n = min(worker_count(), max(len(items), 1))
    if n == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _load_config(path) -> PipelineConfig:
    return cfgmod.load(path) if path else PipelineConfig()


def detect_path(path: Path, as_field: bool, config: PipelineConfig):
    if as_field:
        return detect_field(load_field(path), config)
    return detect_image(load_image(path), config)


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, LSDFError):
        return EXIT_LSDF
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, AnnotationError):
        return EXIT_ANNOTATION
    return EXIT_INPUT


def cmd_detect(args) -> int:
    config = _load_config(args.config)
    src, dst = Path(args.input), Path(args.output)
    if not src.is_dir():
        try:
            segs = detect_path(src, args.field, config)
        except (OSError, LSDFError, ValueError) as exc:
            log.error("%s: %s", src, exc)
            return _exit_code_for(exc)
        write_segments(dst, segs)
        log.info("%s: %d segments", src, len(segs))
        return EXIT_OK

    if args.field:
        inputs = sorted(p for p in src.iterdir() if p.suffix.lower() == ".lsdf")
    else:
        inputs = sorted(p for p in src.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    dst.mkdir(parents=True, exist_ok=True)

    def run(p):
        try:
            return detect_path(p, args.field, config), None
        except (OSError, LSDFError, ValueError) as exc:
            return None, exc

    failed = 0
    for p, (segs, exc) in zip(inputs, _pmap(run, inputs)):
        if exc is not None:
            log.error("%s: %s", p, exc)
            failed += 1
            continue
        write_segments(dst / f"{p.stem}.json", segs)
    log.info("detected %d of %d inputs", len(inputs) - failed, len(inputs))
    return EXIT_FILE_ERRORS if failed else EXIT_OK


def cmd_encode(args) -> int:
    try:
        ann = load_annotation_set(args.ann, args.width, args.height)
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except AnnotationError as exc:
        log.error("%s", exc)
        return EXIT_ANNOTATION
    save_field(encode_ground_truth(ann, args.thickness), args.output)
    return EXIT_OK


def _stems(d: Path) -> dict[str, Path]:
    return {p.stem: p for p in sorted(d.glob("*.json"))}


def cmd_eval(args) -> int:
    config = _load_config(args.config)
    pred, ref = _stems(Path(args.pred)), _stems(Path(args.ref))
    missing = sorted(set(pred) ^ set(ref))
    for stem in missing:
        side = "pred" if stem in pred else "ref"
        log.error("%s: present only in %s, skipped", stem, side)
    common = sorted(set(pred) & set(ref))
    frac = args.tolerance or config.eval_tolerance_fraction
    thick = args.thickness or config.raster_thickness

    def run(stem):
        try:
            ann = load_annotation_set(ref[stem], args.width, args.height)
            segs = read_segments(pred[stem])
        except (OSError, AnnotationError) as exc:
            return stem, exc
        return stem, score(segs, list(ann.segments), ann.image_width, ann.image_height, frac, thick)

    reports = []
    failed = len(missing)
    for stem, rep in _pmap(run, common):
        if isinstance(rep, Exception):
            log.error("%s: %s", stem, rep)
            failed += 1
            continue
        reports.append((stem, rep))

    total = aggregate(r for _, r in reports)
    print(f"{'image':<24} {'P':>8} {'R':>8} {'F^H':>8}")
    for stem, r in reports:
        print(f"{stem:<24} {r.precision:8.4f} {r.recall:8.4f} {r.f_h:8.2f}")
    print(f"{'aggregate':<24} {total.precision:8.4f} {total.recall:8.4f} {total.f_h:8.2f}")
    if args.report:
        out = {"images": [r.to_dict(stem) for stem, r in reports], "aggregate": total.to_dict("aggregate")}
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(out, fh, indent=2)
    return EXIT_FILE_ERRORS if failed else EXIT_OK


def cmd_bench(args) -> int:
    config = _load_config(args.config)
    paths = sorted(Path(args.fields).glob("*.lsdf"))
    if not paths:
        log.error("no .lsdf files in %s", args.fields)
        return EXIT_INPUT
    try:
        fields = [load_field(p) for p in paths]
    except LSDFError as exc:
        log.error("%s", exc)
        return EXIT_LSDF
    rep = bench_fields(fields, config, args.reps)
    print(
        f"{rep.images} fields x {rep.repetitions} reps: mean {rep.mean_ms:.3f} ms, "
        f"median {rep.median_ms:.3f} ms, p95 {rep.p95_ms:.3f} ms, {rep.fps:.1f} FPS"
    )
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(rep.to_dict(), fh, indent=2)
    return EXIT_OK


def cmd_config(args) -> int:
    cfgmod.dump(_load_config(args.config), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lsrdet", description="Line segment detection from heatmap and tangent fields.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect segments in an image or LSDF field")
    p.add_argument("--input", required=True)
    p.add_argument("--field", action="store_true", help="input is an LSDF field file")
    p.add_argument("--config")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("encode", help="rasterise an annotation file into an LSDF field")
    p.add_argument("--ann", required=True)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--thickness", type=float, default=1.0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("eval", help="score predicted segments against references")
    p.add_argument("--pred", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--report")
    p.add_argument("--config")
    p.add_argument("--width", type=int, default=288, help="image width for bare-array annotations")
    p.add_argument("--height", type=int, default=288, help="image height for bare-array annotations")
    p.add_argument("--tolerance", type=float, help="fraction of the image diagonal")
    p.add_argument("--thickness", type=int)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="time post-processing on LSDF fields")
    p.add_argument("--fields", required=True)
    p.add_argument("--config")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--report")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("config", help="write a config file (defaults unless --config given)")
    p.add_argument("--config")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_config)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "reps", 3) < 3:
        log.error("--reps must be >= 3")
        return EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Annotation and segment files, and Wireframe-style dataset indexing.

Annotation file: a JSON array of ``[x1, y1, x2, y2]`` quadruples, or an
object ``{"width": W, "height": H, "lines": [...]}`` carrying the image
size. Segment file (detector output): a JSON array of
``[x1, y1, x2, y2, confidence]``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import cv2

from .core import LineDetectionError, LineSegment, segments_from_array
from .encode import AnnotationSet

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".pgm", ".tif", ".tiff")


class AnnotationError(LineDetectionError, ValueError):
    pass


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def parse_annotation(obj) -> tuple[list[list[float]], int | None, int | None]:
    """Return ``(rows, width, height)``; sizes are None for the bare-array form."""
    width = height = None
    if isinstance(obj, dict):
        try:
            rows = obj["lines"]
        except KeyError:
            raise AnnotationError("annotation object lacks 'lines'") from None
        width, height = obj.get("width"), obj.get("height")
        if (width is None) != (height is None):
            raise AnnotationError("give both width and height or neither")
        if width is not None and not (isinstance(width, int) and isinstance(height, int)):
            raise AnnotationError("width and height must be integers")
    else:
        rows = obj
    if not isinstance(rows, list):
        raise AnnotationError("annotation must be a list of segments")
    out = []
    for i, r in enumerate(rows):
        if not isinstance(r, list) or len(r) != 4 or not all(_is_number(v) for v in r):
            raise AnnotationError(f"entry {i} is not [x1, y1, x2, y2]")
        out.append([float(v) for v in r])
    return out, width, height


def read_annotation(path) -> tuple[list[list[float]], int | None, int | None]:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise AnnotationError(f"{path}: malformed JSON: {exc}") from exc
    return parse_annotation(obj)


def load_annotation_set(path, width: int | None = None, height: int | None = None) -> AnnotationSet:
    """Read an annotation file; sizes from the file override the arguments."""
    rows, fw, fh = read_annotation(path)
    width = fw if fw is not None else width
    height = fh if fh is not None else height
    if width is None or height is None:
        raise AnnotationError(f"{path}: image size unknown")
    try:
        return AnnotationSet.from_rows(width, height, rows)
    except ValueError as exc:
        raise AnnotationError(f"{path}: {exc}") from exc


def write_annotation(path, rows, width: int | None = None, height: int | None = None) -> None:
    rows = [list(map(float, r[:4])) for r in rows]
    obj = rows if width is None else {"width": width, "height": height, "lines": rows}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh)


def write_segments(path, segments) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([s.to_list() for s in segments], fh)


def read_segments(path) -> list[LineSegment]:
    with open(path, encoding="utf-8") as fh:
        try:
            rows = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AnnotationError(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(rows, list):
        raise AnnotationError(f"{path}: expected a list of segments")
    try:
        return segments_from_array(rows)
    except (TypeError, ValueError) as exc:
        raise AnnotationError(f"{path}: {exc}") from exc


def image_size(path) -> tuple[int, int]:
    img = cv2.imread(os.fspath(path), cv2.IMREAD_UNCHANGED)
    if img is None:
        raise AnnotationError(f"cannot read image {path}")
    return img.shape[1], img.shape[0]


@dataclass
class DatasetIndex:
    root: Path
    entries: list[tuple[Path, Path]]

    @classmethod
    def from_directory(cls, root, images: str = "images", annotations: str = "annotations") -> "DatasetIndex":
        """Pair ``root/images/<stem>.<ext>`` with ``root/annotations/<stem>.json``.

        Every annotation is checked against its image size.
        """
        root = Path(root)
        img_dir, ann_dir = root / images, root / annotations
        entries = []
        for img in sorted(p for p in img_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES):
            ann = ann_dir / f"{img.stem}.json"
            if not ann.exists():
                raise AnnotationError(f"no annotation for {img.name}")
            w, h = image_size(img)
            rows, fw, fh = read_annotation(ann)
            if fw is not None and (fw, fh) != (w, h):
                raise AnnotationError(f"{ann.name}: size {fw}x{fh} differs from image {w}x{h}")
            try:
                AnnotationSet.from_rows(w, h, rows)
            except ValueError as exc:
                raise AnnotationError(f"{ann.name}: {exc}") from exc
            entries.append((img, ann))
        return cls(root, entries)


def import_wireframe(json_path, out_dir) -> list[Path]:
    """Split a Wireframe/L-CNN style ``[{"filename", "lines", "width", "height"}]``
    list into one annotation file per image."""
    with open(json_path, encoding="utf-8") as fh:
        items = json.load(fh)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for item in items:
        stem = Path(item["filename"]).stem
        dst = out_dir / f"{stem}.json"
        write_annotation(dst, item["lines"], int(item["width"]), int(item["height"]))
        written.append(dst)
    return written

"""Ground-truth encoding of segment annotations and the training losses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    DimensionMismatchError,
    HeatmapField,
    LineSegment,
    OutOfBoundsError,
    angle_distance_sq,
    segment_level_line_angle,
)

BCE_EPS = 1e-7


@dataclass(frozen=True)
class AnnotationSet:
    image_width: int
    image_height: int
    segments: tuple[LineSegment, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.image_width < 1 or self.image_height < 1:
            raise ValueError("image dimensions must be positive")
        segs = tuple(self.segments)
        for i, s in enumerate(segs):
            if not s.in_bounds(self.image_width, self.image_height):
                raise OutOfBoundsError(f"segment {i} {s.to_list()[:4]} lies outside the image")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def from_rows(cls, width: int, height: int, rows: Sequence[Sequence[float]]) -> "AnnotationSet":
        return cls(width, height, tuple(LineSegment(*r[:4]) for r in rows))


def segment_coverage(seg: LineSegment, width: int, height: int, thickness: float = 1.0):
    """Pixels within ``thickness / 2`` of ``seg`` (perpendicular distance, endpoint extent).

    Returns ``(ys, xs)`` index arrays.
    """
    half = 0.5 * thickness
    x0 = max(int(math.floor(min(seg.x1, seg.x2) - half)), 0)
    x1 = min(int(math.ceil(max(seg.x1, seg.x2) + half)), width - 1)
    y0 = max(int(math.floor(min(seg.y1, seg.y2) - half)), 0)
    y1 = min(int(math.ceil(max(seg.y1, seg.y2) + half)), height - 1)
    if x1 < x0 or y1 < y0:
        return np.empty(0, np.intp), np.empty(0, np.intp)
    ys, xs = np.mgrid[y0 : y1 + 1, x0 : x1 + 1]
    dx, dy = seg.x2 - seg.x1, seg.y2 - seg.y1
    length = math.hypot(dx, dy)
    rx, ry = xs - seg.x1, ys - seg.y1
    # unnormalised products keep integer inputs exact at the endpoints
    along = rx * dx + ry * dy
    across = np.abs(rx * dy - ry * dx)
    hit = (across <= half * length) & (along >= 0.0) & (along <= dx * dx + dy * dy)
    return ys[hit], xs[hit]


def coverage_maps(ann: AnnotationSet, thickness: float = 1.0):
    """Owner index (first covering segment, -1 if none) and cover count per pixel."""
    owner = np.full((ann.image_height, ann.image_width), -1, np.int32)
    count = np.zeros((ann.image_height, ann.image_width), np.int32)
    for i, seg in enumerate(ann.segments):
        ys, xs = segment_coverage(seg, ann.image_width, ann.image_height, thickness)
        count[ys, xs] += 1
        free = owner[ys, xs] < 0
        owner[ys[free], xs[free]] = i
    return owner, count


def encode_ground_truth(ann: AnnotationSet, thickness: float = 1.0) -> HeatmapField:
    """Rasterise annotations into a binary mask and a level-line angle field.

    A covered pixel takes the angle of the first covering segment in
    annotation order; background pixels get mask 0 and angle 0.
    """
    if thickness < 1:
        raise ValueError("thickness must be >= 1")
    owner, _ = coverage_maps(ann, thickness)
    angles = np.array([segment_level_line_angle(s) for s in ann.segments] + [0.0])
    mask = (owner >= 0).astype(np.float32)
    # owner == -1 indexes the trailing 0.0
    return HeatmapField(mask, angles[owner])


def overlap_stats(ann: AnnotationSet, thickness: float = 1.0) -> tuple[int, int]:
    """Return ``(overlap_pixels, foreground_pixels)`` of the encoded mask."""
    _, count = coverage_maps(ann, thickness)
    return int(np.count_nonzero(count > 1)), int(np.count_nonzero(count))


def _check_dims(reference: HeatmapField, predicted: HeatmapField):
    if reference.shape != predicted.shape:
        raise DimensionMismatchError(f"reference {reference.shape} vs predicted {predicted.shape}")


def mask_loss(reference: HeatmapField, predicted: HeatmapField, eps: float = BCE_EPS) -> float:
    """Mean binary cross-entropy between the mask channels."""
    _check_dims(reference, predicted)
    t = reference.mask.astype(np.float64)
    p = np.clip(predicted.mask.astype(np.float64), eps, 1.0 - eps)
    return float(-np.mean(t * np.log(p) + (1.0 - t) * np.log1p(-p)))


def field_loss(reference: HeatmapField, predicted: HeatmapField) -> float:
    """Mean squared angle distance over reference foreground pixels (0 if none)."""
    _check_dims(reference, predicted)
    fg = reference.mask == 1.0
    n = int(np.count_nonzero(fg))
    if n == 0:
        return 0.0
    d2 = angle_distance_sq(reference.field[fg], predicted.field[fg])
    return float(np.sum(d2) / n)


def combined_loss(reference: HeatmapField, predicted: HeatmapField, alpha: float = 1.0) -> float:
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    return mask_loss(reference, predicted) + alpha * field_loss(reference, predicted)

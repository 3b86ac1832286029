"""Pixel-wise F^H scoring of detected segments against references."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .core import LineSegment

DEFAULT_TOLERANCE_FRACTION = 0.01


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f_h: float
    matched_pred_pixels: int
    total_pred_pixels: int
    matched_ref_pixels: int
    total_ref_pixels: int

    @classmethod
    def from_counts(cls, matched_pred, total_pred, matched_ref, total_ref) -> "EvalReport":
        p = matched_pred / total_pred if total_pred else 0.0
        r = matched_ref / total_ref if total_ref else 0.0
        f = 100.0 * 2.0 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(p, r, f, int(matched_pred), int(total_pred), int(matched_ref), int(total_ref))

    def to_dict(self, image_id: str | None = None) -> dict:
        d = asdict(self)
        if image_id is not None:
            d["image_id"] = image_id
        return d


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def bresenham(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """8-connected digital line from ``(x0, y0)`` to ``(x1, y1)`` inclusive.

    Endpoints are put in lexicographic order first, so the pixel set does
    not depend on the direction of the segment.
    """
    if (x1, y1) < (x0, y0):
        x0, y0, x1, y1 = x1, y1, x0, y0
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    pts = []
    while True:
        pts.append((x0, y0))
        if x0 == x1 and y0 == y1:
            return pts
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def rasterize_segments(segments: Iterable[LineSegment], width: int, height: int, thickness: int = 1) -> np.ndarray:
    """Boolean ``(height, width)`` raster of the union of digital lines.

    Endpoints are rounded to the nearest pixel; ``thickness > 1`` dilates
    the 1-px lines by a disk of radius ``(thickness - 1) / 2``.
    """
    img = np.zeros((height, width), bool)
    for s in segments:
        pts = np.array(bresenham(_round_half_up(s.x1), _round_half_up(s.y1),
                                 _round_half_up(s.x2), _round_half_up(s.y2)))
        ok = (pts[:, 0] >= 0) & (pts[:, 0] < width) & (pts[:, 1] >= 0) & (pts[:, 1] < height)
        img[pts[ok, 1], pts[ok, 0]] = True
    if thickness > 1 and img.any():
        r = (thickness - 1) / 2.0
        k = int(math.ceil(r))
        yy, xx = np.mgrid[-k : k + 1, -k : k + 1]
        img = ndimage.binary_dilation(img, structure=(xx * xx + yy * yy) <= r * r)
    return img


def tolerance(width: int, height: int, fraction: float = DEFAULT_TOLERANCE_FRACTION) -> float:
    return fraction * math.hypot(width, height)


def match_within(src: np.ndarray, dst: np.ndarray, dist: float) -> np.ndarray:
    """Pixels of ``src`` with some ``dst`` pixel at Euclidean distance <= ``dist``."""
    if not dst.any() or not src.any():
        return np.zeros_like(src)
    _, (iy, ix) = ndimage.distance_transform_edt(~dst, return_indices=True)
    yy, xx = np.indices(src.shape)
    d2 = (yy - iy) ** 2 + (xx - ix) ** 2
    return src & (d2 <= dist * dist)


def score_rasters(pred: np.ndarray, ref: np.ndarray, dist: float) -> EvalReport:
    mp = match_within(pred, ref, dist)
    mr = match_within(ref, pred, dist)
    return EvalReport.from_counts(
        np.count_nonzero(mp), np.count_nonzero(pred), np.count_nonzero(mr), np.count_nonzero(ref)
    )


def score(
    pred: Sequence[LineSegment],
    ref: Sequence[LineSegment],
    width: int,
    height: int,
    tolerance_fraction: float = DEFAULT_TOLERANCE_FRACTION,
    thickness: int = 1,
) -> EvalReport:
    """Rasterise both segment sets and score at ``tolerance_fraction`` of the diagonal."""
    rp = rasterize_segments(pred, width, height, thickness)
    rr = rasterize_segments(ref, width, height, thickness)
    return score_rasters(rp, rr, tolerance(width, height, tolerance_fraction))


def score_with_confidence_sweep(
    pred: Sequence[LineSegment],
    ref: Sequence[LineSegment],
    width: int,
    height: int,
    thresholds: Sequence[float],
    tolerance_fraction: float = DEFAULT_TOLERANCE_FRACTION,
    thickness: int = 1,
) -> list[tuple[float, EvalReport]]:
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be sorted ascending")
    rr = rasterize_segments(ref, width, height, thickness)
    dist = tolerance(width, height, tolerance_fraction)
    out = []
    for t in thresholds:
        rp = rasterize_segments([s for s in pred if s.confidence >= t], width, height, thickness)
        out.append((t, score_rasters(rp, rr, dist)))
    return out


def aggregate(reports: Iterable[EvalReport]) -> EvalReport:
    """Micro-average: precision and recall from summed pixel counts."""
    mp = tp = mr = tr = 0
    for r in reports:
        mp += r.matched_pred_pixels
        tp += r.total_pred_pixels
        mr += r.matched_ref_pixels
        tr += r.total_ref_pixels
    return EvalReport.from_counts(mp, tp, mr, tr)

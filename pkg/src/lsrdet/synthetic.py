"""Synthetic segment layouts and renderings for testing and benchmarking."""

from __future__ import annotations

import math

import numpy as np

from .core import LineSegment


def _point_segment_dist(px, py, s: LineSegment) -> float:
    dx, dy = s.x2 - s.x1, s.y2 - s.y1
    t = ((px - s.x1) * dx + (py - s.y1) * dy) / (dx * dx + dy * dy)
    t = min(max(t, 0.0), 1.0)
    return math.hypot(px - (s.x1 + t * dx), py - (s.y1 + t * dy))


def _cross(ox, oy, ax, ay, bx, by) -> float:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def segment_distance(a: LineSegment, b: LineSegment) -> float:
    """Euclidean distance between two closed segments (0 if they cross)."""
    d1 = _cross(a.x1, a.y1, a.x2, a.y2, b.x1, b.y1)
    d2 = _cross(a.x1, a.y1, a.x2, a.y2, b.x2, b.y2)
    d3 = _cross(b.x1, b.y1, b.x2, b.y2, a.x1, a.y1)
    d4 = _cross(b.x1, b.y1, b.x2, b.y2, a.x2, a.y2)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return 0.0
    return min(
        _point_segment_dist(a.x1, a.y1, b),
        _point_segment_dist(a.x2, a.y2, b),
        _point_segment_dist(b.x1, b.y1, a),
        _point_segment_dist(b.x2, b.y2, a),
    )


def random_segments(
    rng: np.random.Generator,
    width: int,
    height: int,
    count: int,
    min_length: float = 20.0,
    max_length: float = 120.0,
    min_separation: float | None = 5.0,
    margin: float = 3.0,
    integer: bool = False,
    max_tries: int = 20000,
) -> list[LineSegment]:
    """Rejection-sample ``count`` segments inside the image.

    With ``min_separation`` set, accepted segments keep at least that
    distance from each other; ``None`` allows crossings. Fewer than
    ``count`` segments are returned if ``max_tries`` runs out.
    """
    segs: list[LineSegment] = []
    tries = 0
    while len(segs) < count and tries < max_tries:
        tries += 1
        length = rng.uniform(min_length, max_length)
        ang = rng.uniform(0.0, math.pi)
        cx = rng.uniform(margin, width - 1 - margin)
        cy = rng.uniform(margin, height - 1 - margin)
        hx, hy = 0.5 * length * math.cos(ang), 0.5 * length * math.sin(ang)
        x1, y1, x2, y2 = cx - hx, cy - hy, cx + hx, cy + hy
        if integer:
            x1, y1, x2, y2 = (float(round(v)) for v in (x1, y1, x2, y2))
        if min(x1, x2) < margin or max(x1, x2) > width - 1 - margin:
            continue
        if min(y1, y2) < margin or max(y1, y2) > height - 1 - margin:
            continue
        if math.hypot(x2 - x1, y2 - y1) < min_length:
            continue
        s = LineSegment(x1, y1, x2, y2)
        if min_separation is not None and any(segment_distance(s, o) < min_separation for o in segs):
            continue
        segs.append(s)
    return segs


def render_lines(
    segments,
    width: int,
    height: int,
    background: float = 0.9,
    ink: float = 0.1,
    line_width: float = 1.0,
    noise_sigma: float = 0.0,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Anti-aliased dark lines on a light background, values clipped to [0, 1].

    Coverage falls off linearly over one pixel around a core of
    ``line_width``.
    """
    img = np.full((height, width), background, np.float64)
    cover = np.zeros((height, width), np.float64)
    yy, xx = np.mgrid[0:height, 0:width]
    half = 0.5 * line_width
    for s in segments:
        dx, dy = s.x2 - s.x1, s.y2 - s.y1
        L2 = dx * dx + dy * dy
        t = np.clip(((xx - s.x1) * dx + (yy - s.y1) * dy) / L2, 0.0, 1.0)
        d = np.hypot(xx - (s.x1 + t * dx), yy - (s.y1 + t * dy))
        cover = np.maximum(cover, np.clip(half + 0.5 - d, 0.0, 1.0))
    img += (ink - background) * cover
    if noise_sigma > 0:
        rng = rng or np.random.default_rng()
        img += rng.normal(0.0, noise_sigma, img.shape)
    return np.clip(img, 0.0, 1.0).astype(np.float32)

"""Shared types and angle primitives.

Images are numpy arrays of shape ``(height, width)`` indexed ``[y, x]``.
Pixel ``(x, y)`` denotes the point at its center, so integer coordinates
are pixel centers and a valid sub-pixel endpoint lies in
``[-0.5, width - 0.5] x [-0.5, height - 0.5]``.

Level-line angles live in ``[0, pi)``; every trigonometric operation on them
doubles the angle so that ``theta`` and ``theta + pi`` coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

PI = math.pi

# A resultant shorter than this fraction of the total weight has no direction.
ZERO_RESULTANT_RTOL = 1e-12


class LineDetectionError(Exception):
    """Base class for all errors raised by this package."""


class UndefinedMeanError(LineDetectionError, ValueError):
    """The doubled-angle resultant vanishes, so the mean orientation is undefined."""


class EmptyInputError(LineDetectionError, ValueError):
    pass


class DegenerateSegmentError(LineDetectionError, ValueError):
    pass


class DegenerateRegionError(LineDetectionError, ValueError):
    pass


class DimensionMismatchError(LineDetectionError, ValueError):
    pass


class OutOfBoundsError(LineDetectionError, ValueError):
    pass


def level_line_angle(value: float) -> float:
    """Reduce a real angle (radians) into ``[0, pi)``."""
    r = float(value) % PI
    # -1e-20 % pi rounds up to pi
    if r >= PI:
        r = 0.0
    return r


def normalize_angles(values) -> np.ndarray:
    """Vectorised :func:`level_line_angle` returning float32.

    Values that round up to ``pi`` when narrowed to float32 are mapped to 0,
    which is the same orientation.
    """
    a = np.asarray(values, dtype=np.float64) % PI
    out = a.astype(np.float32)
    out[out.astype(np.float64) >= PI] = 0.0
    return out


def angle_distance(a, b):
    """Distance between level-line angles: ``|exp(2ia) - exp(2ib)|``.

    Equals ``2 |sin(a - b)|``; lies in ``[0, 2]`` and is pi-periodic in both
    arguments. Accepts scalars or broadcastable arrays.
    """
    za = np.exp(2j * np.asarray(a, dtype=np.float64))
    zb = np.exp(2j * np.asarray(b, dtype=np.float64))
    d = np.abs(za - zb)
    if d.ndim == 0:
        return float(d)
    return d


def angle_distance_sq(a, b):
    """Squared :func:`angle_distance`, i.e. ``2 - 2 cos(2(a - b))``."""
    d = 2.0 - 2.0 * np.cos(2.0 * (np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)))
    d = np.maximum(d, 0.0)
    if d.ndim == 0:
        return float(d)
    return d


def doubled_resultant(angles, weights=None) -> complex:
    """Return ``sum_k w_k exp(2 i theta_k)``."""
    a = np.asarray(angles, dtype=np.float64).ravel()
    if weights is None:
        w = np.ones_like(a)
    else:
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.shape != a.shape:
            raise DimensionMismatchError("angles and weights differ in length")
    return complex(np.sum(w * np.cos(2 * a)), np.sum(w * np.sin(2 * a)))


def resultant_angle(re: float, im: float, total_weight: float) -> float:
    """Half the phase of a doubled-angle resultant, reduced into ``[0, pi)``."""
    if math.hypot(re, im) <= ZERO_RESULTANT_RTOL * total_weight:
        raise UndefinedMeanError("doubled-angle resultant is zero")
    return level_line_angle(0.5 * math.atan2(im, re))


def circular_mean_angle(angles: Sequence[float], weights: Sequence[float] | None = None) -> float:
    """Weighted mean orientation of axial data.

    Raises
    ------
    EmptyInputError
        If no angles are given or no weight is positive.
    UndefinedMeanError
        If the weighted doubled-angle vectors cancel out.
    """
    a = np.asarray(angles, dtype=np.float64).ravel()
    if a.size == 0:
        raise EmptyInputError("no angles given")
    w = np.ones_like(a) if weights is None else np.asarray(weights, dtype=np.float64).ravel()
    if w.shape != a.shape:
        raise DimensionMismatchError("angles and weights differ in length")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    total = float(w.sum())
    if not total > 0:
        raise EmptyInputError("no strictly positive weight")
    z = doubled_resultant(a, w)
    return resultant_angle(z.real, z.imag, total)


@dataclass(frozen=True)
class LineSegment:
    x1: float
    y1: float
    x2: float
    y2: float
    confidence: float = 1.0
    # set when the source region had an isotropic inertia tensor
    isotropic: bool = False

    def __post_init__(self):
        for name in ("x1", "y1", "x2", "y2", "confidence"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.x1 == self.x2 and self.y1 == self.y2:
            raise DegenerateSegmentError("segment endpoints coincide")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")

    @property
    def p1(self) -> tuple[float, float]:
        return (self.x1, self.y1)

    @property
    def p2(self) -> tuple[float, float]:
        return (self.x2, self.y2)

    @property
    def length(self) -> float:
        return math.hypot(self.x2 - self.x1, self.y2 - self.y1)

    @property
    def angle(self) -> float:
        return segment_level_line_angle(self)

    def in_bounds(self, width: int, height: int) -> bool:
        xs_ok = all(-0.5 <= x <= width - 0.5 for x in (self.x1, self.x2))
        ys_ok = all(-0.5 <= y <= height - 0.5 for y in (self.y1, self.y2))
        return xs_ok and ys_ok

    def scaled(self, sx: float, sy: float) -> "LineSegment":
        """Map pixel-center coordinates through a resize by factors ``sx``, ``sy``."""
        return LineSegment(
            (self.x1 + 0.5) * sx - 0.5,
            (self.y1 + 0.5) * sy - 0.5,
            (self.x2 + 0.5) * sx - 0.5,
            (self.y2 + 0.5) * sy - 0.5,
            self.confidence,
            self.isotropic,
        )

    def to_list(self) -> list[float]:
        return [self.x1, self.y1, self.x2, self.y2, self.confidence]


def segment_level_line_angle(seg: LineSegment) -> float:
    dx = seg.x2 - seg.x1
    dy = seg.y2 - seg.y1
    if dx == 0 and dy == 0:
        raise DegenerateSegmentError("segment endpoints coincide")
    return level_line_angle(math.atan2(dy, dx))


def segments_from_array(rows: Iterable[Sequence[float]]) -> list[LineSegment]:
    """Build segments from ``[x1, y1, x2, y2]`` or ``[x1, y1, x2, y2, conf]`` rows."""
    out = []
    for row in rows:
        if len(row) not in (4, 5):
            raise ValueError(f"expected 4 or 5 numbers per segment, got {len(row)}")
        out.append(LineSegment(*row[:4], confidence=row[4] if len(row) == 5 else 1.0))
    return out


@dataclass(frozen=True)
class HeatmapField:
    """Line mask ``mask`` in [0, 1] paired with level-line angles ``field`` in [0, pi).

    Both channels are stored as read-only float32 arrays of equal shape.
    Angles outside ``[0, pi)`` are reduced on construction.
    """

    mask: np.ndarray
    field: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        m = np.array(self.mask, dtype=np.float32, order="C", copy=True)
        f = np.asarray(self.field, dtype=np.float64)
        if m.ndim != 2 or f.ndim != 2:
            raise ValueError("mask and field must be 2-D")
        if m.shape != f.shape:
            raise DimensionMismatchError(f"mask {m.shape} and field {f.shape} differ")
        if m.shape[0] < 1 or m.shape[1] < 1:
            raise ValueError("empty grid")
        if not (np.all(m >= 0.0) and np.all(m <= 1.0)):
            raise ValueError("mask values must lie in [0, 1]")
        if not np.all(np.isfinite(f)):
            raise ValueError("field angles must be finite")
        f = np.ascontiguousarray(normalize_angles(f))
        m.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "mask", m)
        object.__setattr__(self, "field", f)

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    @classmethod
    def zeros(cls, width: int, height: int) -> "HeatmapField":
        z = np.zeros((height, width), np.float32)
        return cls(z, z)

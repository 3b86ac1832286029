"""Segment extraction from line support regions via the mass inertia tensor."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

from .core import DegenerateRegionError, HeatmapField, LineSegment
from .group import GrowResult, LineSupportRegion

ISOTROPIC_RTOL = 1e-12
# trace below this fraction of the total mass means all mass sits at one point
DEGENERATE_RTOL = 1e-9

# status codes shared with the batch kernel
OK, ISOTROPIC, NO_MASS, DEGENERATE = 0, 1, 2, 3


@dataclass(frozen=True)
class InertiaTensor2:
    """Symmetric ``[[ixx, ixy], [ixy, iyy]]``."""

    ixx: float
    iyy: float
    ixy: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.ixx, self.ixy], [self.ixy, self.iyy]])


class MinorAxis(NamedTuple):
    x: float
    y: float
    ambiguous: bool


@numba.njit(cache=True)
def _minor_axis(ixx, iyy, ixy, scale):
    """Unit minor eigenvector ``(x, y, status)`` with ``x > 0`` or ``x == 0, y > 0``."""
    tr = ixx + iyy
    if tr <= DEGENERATE_RTOL * scale:
        return 1.0, 0.0, DEGENERATE
    gap = math.sqrt((ixx - iyy) ** 2 + 4.0 * ixy * ixy)
    if gap <= ISOTROPIC_RTOL * tr:
        return 1.0, 0.0, ISOTROPIC
    major = 0.5 * math.atan2(2.0 * ixy, ixx - iyy)
    x = -math.sin(major)
    y = math.cos(major)
    if x < 0.0 or (x == 0.0 and y < 0.0):
        x, y = -x, -y
    return x + 0.0, y + 0.0, OK


def center_of_mass(region: LineSupportRegion, hf: HeatmapField) -> tuple[float, float]:
    px = region.pixels
    m = hf.mask[px[:, 1], px[:, 0]].astype(np.float64)
    total = m.sum()
    if not total > 0:
        raise DegenerateRegionError("region has no mass")
    return float(m @ px[:, 0] / total), float(m @ px[:, 1] / total)


def inertia_tensor(region: LineSupportRegion, hf: HeatmapField, p_mu: tuple[float, float]) -> InertiaTensor2:
    px = region.pixels
    m = hf.mask[px[:, 1], px[:, 0]].astype(np.float64)
    dx = px[:, 0] - p_mu[0]
    dy = px[:, 1] - p_mu[1]
    return InertiaTensor2(float(m @ (dy * dy)), float(m @ (dx * dx)), float(-(m @ (dx * dy))))


def minor_eigenvector(t: InertiaTensor2) -> MinorAxis:
    """Direction of least inertia, in closed form.

    Raises :class:`DegenerateRegionError` for the zero tensor. Isotropic
    tensors return ``(1, 0)`` with ``ambiguous`` set.
    """
    scale = max(abs(t.ixx), abs(t.iyy), abs(t.ixy))
    if scale == 0.0:
        raise DegenerateRegionError("zero inertia tensor")
    x, y, status = _minor_axis(t.ixx, t.iyy, t.ixy, scale)
    if status == DEGENERATE:
        raise DegenerateRegionError("inertia tensor is numerically zero")
    return MinorAxis(x, y, status == ISOTROPIC)


def extract_segment(region: LineSupportRegion, hf: HeatmapField) -> LineSegment:
    """Line through the centre of mass along the minor axis, spanning the
    extreme pixel projections. Confidence is the region's mean mask."""
    px = region.pixels
    if len(px) < 2:
        raise DegenerateRegionError("need at least two pixels")
    p_mu = center_of_mass(region, hf)
    m = hf.mask[px[:, 1], px[:, 0]].astype(np.float64)
    t = inertia_tensor(region, hf, p_mu)
    x, y, status = _minor_axis(t.ixx, t.iyy, t.ixy, m.sum())
    if status == DEGENERATE:
        raise DegenerateRegionError("all region mass at one point")
    proj = (px[:, 0] - p_mu[0]) * x + (px[:, 1] - p_mu[1]) * y
    lo, hi = proj.min(), proj.max()
    conf = min(max(region.sum_mask / len(px), 0.0), 1.0)
    return LineSegment(
        p_mu[0] + lo * x, p_mu[1] + lo * y, p_mu[0] + hi * x, p_mu[1] + hi * y,
        conf, status == ISOTROPIC,
    )


@numba.njit(cache=True, nogil=True)
def _extract_kernel(pix, offsets, mask, w):
    n = offsets.shape[0] - 1
    out = np.zeros((n, 5), np.float64)
    status = np.zeros(n, np.int64)
    mask = mask.ravel()
    for k in range(n):
        a, b = offsets[k], offsets[k + 1]
        total = 0.0
        sx = 0.0
        sy = 0.0
        for i in range(a, b):
            p = pix[i]
            m = np.float64(mask[p])
            total += m
            sx += m * (p % w)
            sy += m * (p // w)
        if b - a < 2 or not total > 0.0:
            status[k] = NO_MASS
            continue
        cx = sx / total
        cy = sy / total
        ixx = 0.0
        iyy = 0.0
        ixy = 0.0
        for i in range(a, b):
            p = pix[i]
            m = np.float64(mask[p])
            dx = (p % w) - cx
            dy = (p // w) - cy
            ixx += m * dy * dy
            iyy += m * dx * dx
            ixy -= m * dx * dy
        ux, uy, st = _minor_axis(ixx, iyy, ixy, total)
        status[k] = st
        if st == DEGENERATE:
            continue
        lo = np.inf
        hi = -np.inf
        for i in range(a, b):
            p = pix[i]
            t = ((p % w) - cx) * ux + ((p // w) - cy) * uy
            lo = min(lo, t)
            hi = max(hi, t)
        out[k, 0] = cx + lo * ux
        out[k, 1] = cy + lo * uy
        out[k, 2] = cx + hi * ux
        out[k, 3] = cy + hi * uy
        out[k, 4] = total / (b - a)
    return out, status


def extract_segments(res: GrowResult, hf: HeatmapField, offset: float = 0.0) -> list[LineSegment]:
    """Batch :func:`extract_segment` over a grow result, skipping degenerate regions.

    Confidence here is computed from the mask directly, which equals the
    cached region mean. ``offset`` shifts every endpoint in x and y.
    """
    out, status = _extract_kernel(res.pix, res.offsets, hf.mask, hf.width)
    segs = []
    for row, st in zip(out, status):
        if st == NO_MASS or st == DEGENERATE:
            continue
        x1, y1, x2, y2, conf = row
        if x1 == x2 and y1 == y2:
            continue
        segs.append(LineSegment(x1 + offset, y1 + offset, x2 + offset, y2 + offset,
                                min(max(conf, 0.0), 1.0), st == ISOTROPIC))
    return segs

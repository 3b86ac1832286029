"""Line-support-region growing over a foreground mask.

Seeds are visited in order of decreasing mask value (ties row-major). A
region starts from its seed and repeatedly sweeps its current 8-neighbour
candidates in row-major order, admitting every candidate whose similarity
to the region is below ``distance_tau``. Admissions update the region's
statistics at once. Neighbours uncovered by an admission are swept on the
next pass, and the region is closed after a pass that admits nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .core import (
    ZERO_RESULTANT_RTOL,
    HeatmapField,
    UndefinedMeanError,
    resultant_angle,
)


@dataclass(frozen=True)
class GroupingParams:
    distance_tau: float = 0.5
    min_region_size: int = 10
    alpha: float = 1.0

    def __post_init__(self):
        if not self.distance_tau > 0:
            raise ValueError("distance_tau must be > 0")
        if int(self.min_region_size) != self.min_region_size or self.min_region_size < 1:
            raise ValueError("min_region_size must be an integer >= 1")
        if not self.alpha >= 0:
            raise ValueError("alpha must be >= 0")
        object.__setattr__(self, "min_region_size", int(self.min_region_size))


@dataclass
class LineSupportRegion:
    """Pixels ``(x, y)`` in admission order with running statistics.

    ``resultant`` is ``sum exp(2i F(p))`` stored as ``(re, im)``.
    """

    pixels: np.ndarray
    sum_mask: float
    resultant: tuple[float, float]

    @classmethod
    def from_pixels(cls, pixels, hf: HeatmapField) -> "LineSupportRegion":
        px = np.asarray(pixels, dtype=np.int64).reshape(-1, 2)
        if len(px) == 0:
            raise ValueError("region must contain at least one pixel")
        m = hf.mask[px[:, 1], px[:, 0]].astype(np.float64)
        f = hf.field[px[:, 1], px[:, 0]].astype(np.float64)
        return cls(px, float(m.sum()), (float(np.cos(2 * f).sum()), float(np.sin(2 * f).sum())))

    @property
    def size(self) -> int:
        return len(self.pixels)

    @property
    def mean_mask(self) -> float:
        return self.sum_mask / self.size

    @property
    def angle(self) -> float:
        return resultant_angle(self.resultant[0], self.resultant[1], self.size)

    def add(self, x: int, y: int, hf: HeatmapField) -> None:
        m = float(hf.mask[y, x])
        f = float(hf.field[y, x])
        self.pixels = np.vstack([self.pixels, [[x, y]]])
        self.sum_mask += m
        self.resultant = (self.resultant[0] + math.cos(2 * f), self.resultant[1] + math.sin(2 * f))


def region_stats(region: LineSupportRegion) -> tuple[float, float]:
    """Return ``(mean mask, mean level-line angle)`` from the cached sums."""
    return region.mean_mask, region.angle


def similarity_from_stats(m_g, f_g, count, sum_mask, re, im, alpha) -> float:
    if math.hypot(re, im) <= ZERO_RESULTANT_RTOL * count:
        raise UndefinedMeanError("region orientation undefined")
    d2 = 2.0 - 2.0 * math.cos(2.0 * f_g - math.atan2(im, re))
    dm = m_g - sum_mask / count
    return max(d2, 0.0) + alpha * dm * dm


def similarity(g: tuple[int, int], hf: HeatmapField, region: LineSupportRegion, alpha: float = 1.0) -> float:
    """Squared angle distance to the region orientation plus weighted mask deviation."""
    x, y = g
    return similarity_from_stats(
        float(hf.mask[y, x]),
        float(hf.field[y, x]),
        region.size,
        region.sum_mask,
        region.resultant[0],
        region.resultant[1],
        alpha,
    )


@numba.njit(cache=True, nogil=True)
def _push_neighbours(p, w, h, fg, used, stamp, tag, buf, n):
    py, px = p // w, p % w
    for dy in range(-1, 2):
        for dx in range(-1, 2):
            yy, xx = py + dy, px + dx
            if 0 <= yy < h and 0 <= xx < w:
                q = yy * w + xx
                if fg[q] and not used[q] and stamp[q] != tag:
                    stamp[q] = tag
                    buf[n] = q
                    n += 1
    return n


@numba.njit(cache=True, nogil=True)
def _sort_prefix(a, n):
    if n > 32:
        a[:n].sort()
        return
    for i in range(1, n):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


@numba.njit(cache=True, nogil=True)
def _grow_kernel(mask, field, fg, order, tau, alpha):
    """Flat-index region growing.

    Returns ``(pix, offsets, sums, nreg, status)``: region ``k`` owns
    ``pix[offsets[k]:offsets[k + 1]]`` in admission order and
    ``sums[k] = (sum mask, resultant re, resultant im)``. ``status`` is -1
    if a region orientation became undefined.
    """
    h, w = mask.shape
    mask = mask.ravel()
    field = field.ravel()
    fg = fg.ravel()
    n_fg = order.shape[0]
    used = np.zeros(h * w, np.bool_)
    stamp = np.full(h * w, -1, np.int64)
    pix = np.empty(n_fg, np.int64)
    offsets = np.zeros(n_fg + 1, np.int64)
    sums = np.empty((n_fg, 3), np.float64)
    cand = np.empty(n_fg, np.int64)
    found = np.empty(n_fg, np.int64)
    npix = 0
    nreg = 0
    for seed in order:
        if used[seed]:
            continue
        used[seed] = True
        stamp[seed] = nreg
        pix[npix] = seed
        npix += 1
        count = 1.0
        sm = np.float64(mask[seed])
        a = 2.0 * np.float64(field[seed])
        re = math.cos(a)
        im = math.sin(a)
        phi2 = math.atan2(im, re)
        nc = _push_neighbours(seed, w, h, fg, used, stamp, nreg, cand, 0)
        updated = True
        while updated:
            updated = False
            _sort_prefix(cand, nc)
            keep = 0
            nf = 0
            for i in range(nc):
                g = cand[i]
                a = 2.0 * np.float64(field[g])
                d2 = 2.0 - 2.0 * math.cos(a - phi2)
                if d2 < 0.0:
                    d2 = 0.0
                dm = mask[g] - sm / count
                if d2 + alpha * dm * dm < tau:
                    used[g] = True
                    pix[npix] = g
                    npix += 1
                    count += 1.0
                    sm += mask[g]
                    re += math.cos(a)
                    im += math.sin(a)
                    if math.hypot(re, im) <= 1e-12 * count:
                        return pix, offsets, sums, nreg, -1
                    phi2 = math.atan2(im, re)
                    updated = True
                    nf = _push_neighbours(g, w, h, fg, used, stamp, nreg, found, nf)
                else:
                    cand[keep] = g
                    keep += 1
            cand[keep : keep + nf] = found[:nf]
            nc = keep + nf
        sums[nreg, 0] = sm
        sums[nreg, 1] = re
        sums[nreg, 2] = im
        nreg += 1
        offsets[nreg] = npix
    return pix, offsets, sums, nreg, 0


def seed_order(hf: HeatmapField, fg: np.ndarray) -> np.ndarray:
    """Flat indices of foreground pixels by decreasing mask, ties row-major."""
    idx = np.flatnonzero(fg)
    vals = hf.mask.ravel()[idx]
    return idx[np.argsort(-vals, kind="stable")]


@dataclass
class GrowResult:
    """Flat output of the growing kernel, regions already filtered by size."""

    width: int
    pix: np.ndarray
    offsets: np.ndarray
    sums: np.ndarray

    def __len__(self):
        return len(self.offsets) - 1

    def region(self, k: int) -> LineSupportRegion:
        flat = self.pix[self.offsets[k] : self.offsets[k + 1]]
        xy = np.stack([flat % self.width, flat // self.width], axis=1)
        return LineSupportRegion(xy, float(self.sums[k, 0]), (float(self.sums[k, 1]), float(self.sums[k, 2])))


def _check_fg(hf: HeatmapField, fg: np.ndarray) -> np.ndarray:
    fg = np.asarray(fg, dtype=bool)
    if fg.shape != hf.shape:
        raise ValueError(f"foreground {fg.shape} does not match field {hf.shape}")
    return np.ascontiguousarray(fg)


def grow_flat(hf: HeatmapField, fg: np.ndarray, params: GroupingParams | None = None) -> GrowResult:
    params = params or GroupingParams()
    fg = _check_fg(hf, fg)
    pix, offsets, sums, nreg, status = _grow_kernel(
        hf.mask, hf.field, fg, seed_order(hf, fg), float(params.distance_tau), float(params.alpha)
    )
    if status < 0:
        raise UndefinedMeanError("region orientation became undefined while growing")
    sizes = np.diff(offsets[: nreg + 1])
    keep = np.flatnonzero(sizes >= params.min_region_size)
    if len(keep) == nreg:
        return GrowResult(hf.width, pix[: offsets[nreg]], offsets[: nreg + 1], sums[:nreg])
    parts = [pix[offsets[k] : offsets[k + 1]] for k in keep]
    new_pix = np.concatenate(parts) if parts else np.empty(0, np.int64)
    new_off = np.concatenate([[0], np.cumsum(sizes[keep])]).astype(np.int64)
    return GrowResult(hf.width, new_pix, new_off, sums[keep])


def grow_regions(hf: HeatmapField, fg: np.ndarray, params: GroupingParams | None = None) -> list[LineSupportRegion]:
    """Split the foreground ``fg`` into disjoint line support regions.

    Regions are returned in seed order; each lists its pixels as ``(x, y)``
    in admission order. Regions smaller than ``min_region_size`` are dropped.

    Raises
    ------
    UndefinedMeanError
        If admissions cancel a region's orientation resultant (only
        possible with ``distance_tau`` above 4).
    """
    res = grow_flat(hf, fg, params)
    return [res.region(k) for k in range(len(res))]

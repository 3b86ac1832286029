"""Foreground segmentation of the line mask.

The combined mask is the product of a global threshold, which is coarse and
tends to bridge neighbouring lines, and a local Gaussian-mean threshold,
which separates them but fires on faint noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

from .core import HeatmapField


@dataclass(frozen=True)
class SegmentationParams:
    global_tau: float = 0.2
    local_theta: float = 0.05
    window_radius: int = 10
    gaussian_sigma: float = 5.0

    def __post_init__(self):
        if not 0.0 <= self.global_tau <= 1.0:
            raise ValueError("global_tau must lie in [0, 1]")
        if int(self.window_radius) != self.window_radius or self.window_radius < 1:
            raise ValueError("window_radius must be an integer >= 1")
        if not self.gaussian_sigma > 0:
            raise ValueError("gaussian_sigma must be > 0")
        object.__setattr__(self, "window_radius", int(self.window_radius))


def gaussian_kernel_1d(radius: int, sigma: float) -> np.ndarray:
    d = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (d / sigma) ** 2)
    return k / k.sum()


def gaussian_weights(radius: int, sigma: float) -> np.ndarray:
    """The ``(2r + 1) x (2r + 1)`` averaging window; sums to 1."""
    k = gaussian_kernel_1d(radius, sigma)
    return np.outer(k, k)


def local_mean(m: np.ndarray, radius: int, sigma: float) -> np.ndarray:
    """Gaussian-weighted window mean with replicated borders (float32)."""
    k = gaussian_kernel_1d(radius, sigma).astype(np.float32)
    a = np.ascontiguousarray(m, dtype=np.float32)
    return cv2.sepFilter2D(a, -1, k, k, borderType=cv2.BORDER_REPLICATE)


def global_threshold(m: np.ndarray, tau: float) -> np.ndarray:
    return np.asarray(m) > tau


def local_threshold(m: np.ndarray, params: SegmentationParams) -> np.ndarray:
    a = np.asarray(m, dtype=np.float32)
    mean = local_mean(a, params.window_radius, params.gaussian_sigma)
    return a > mean - np.float32(params.local_theta)


def combined_foreground(hf: HeatmapField, params: SegmentationParams | None = None) -> np.ndarray:
    """Boolean foreground mask: global AND local threshold of ``hf.mask``."""
    params = params or SegmentationParams()
    g = global_threshold(hf.mask, params.global_tau)
    if not g.any():
        return g
    return g & local_threshold(hf.mask, params)

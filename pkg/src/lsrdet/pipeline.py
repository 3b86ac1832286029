"""End-to-end detection: field -> foreground -> regions -> segments."""

from __future__ import annotations

import numpy as np

from .config import PipelineConfig
from .core import HeatmapField, LineSegment
from .extract import extract_segments
from .frontend import GRADIENT_OFFSET, gradient_field, resize_to_input, to_gray
from .group import grow_flat
from .segment import combined_foreground


def postprocess(hf: HeatmapField, config: PipelineConfig | None = None, offset: float = 0.0) -> list[LineSegment]:
    """Segmentation, grouping and extraction; coordinates in field pixels."""
    config = config or PipelineConfig()
    fg = combined_foreground(hf, config.segmentation)
    res = grow_flat(hf, fg, config.grouping)
    return extract_segments(res, hf, offset)


def detect_field(hf: HeatmapField, config: PipelineConfig | None = None) -> list[LineSegment]:
    return postprocess(hf, config)


def detect_image(img: np.ndarray, config: PipelineConfig | None = None) -> list[LineSegment]:
    """Detect on the gradient field of ``img`` resized to ``input_side``.

    Returned coordinates are in the original image's pixel frame.
    """
    config = config or PipelineConfig()
    gray = to_gray(img)
    h, w = gray.shape
    small = resize_to_input(gray, config.input_side)
    segs = postprocess(gradient_field(small), config, GRADIENT_OFFSET)
    if small.shape == gray.shape:
        return segs
    sx = w / config.input_side
    sy = h / config.input_side
    return [s.scaled(sx, sy) for s in segs]

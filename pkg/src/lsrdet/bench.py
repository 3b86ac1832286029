"""Timing of the post-processing stage (segmentation, grouping, extraction)."""

from __future__ import annotations

import time
from dataclasses import dataclass, asdict

import numpy as np

from .config import PipelineConfig
from .core import HeatmapField
from .pipeline import postprocess


@dataclass
class BenchReport:
    images: int
    repetitions: int
    mean_ms: float
    median_ms: float
    p95_ms: float
    fps: float
    per_image_median_ms: list[float]

    def to_dict(self) -> dict:
        return asdict(self)


def time_postprocess(hf: HeatmapField, config: PipelineConfig, reps: int = 10, warmup: int = 1) -> np.ndarray:
    """Wall-clock milliseconds of ``reps`` timed runs after ``warmup`` discarded ones."""
    for _ in range(warmup):
        postprocess(hf, config)
    out = np.empty(reps)
    for i in range(reps):
        t0 = time.perf_counter()
        postprocess(hf, config)
        out[i] = (time.perf_counter() - t0) * 1e3
    return out


def bench_fields(fields, config: PipelineConfig | None = None, reps: int = 10, warmup: int = 1) -> BenchReport:
    """Mean, median and p95 over all timed runs; FPS is ``1000 / mean``
    of the per-image mean times, i.e. averaged over the dataset."""
    if reps < 3:
        raise ValueError("reps must be >= 3")
    fields = list(fields)
    if not fields:
        raise ValueError("no fields to benchmark")
    config = config or PipelineConfig()
    times = np.stack([time_postprocess(hf, config, reps, warmup) for hf in fields])
    mean = float(times.mean())
    return BenchReport(
        images=len(fields),
        repetitions=reps,
        mean_ms=mean,
        median_ms=float(np.median(times)),
        p95_ms=float(np.percentile(times, 95)),
        fps=1e3 / mean if mean > 0 else float("inf"),
        per_image_median_ms=[float(v) for v in np.median(times, axis=1)],
    )

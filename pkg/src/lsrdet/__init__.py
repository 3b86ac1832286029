"""Line segment detection from a line heatmap and tangent field.

A field (from image gradients or an external model) is binarised, split
into line support regions by similarity-gated region growing, and each
region is reduced to one segment through its inertia tensor.
"""

from .config import PipelineConfig
from .core import (
    HeatmapField,
    LineSegment,
    angle_distance,
    circular_mean_angle,
    level_line_angle,
    segment_level_line_angle,
)
from .encode import AnnotationSet, combined_loss, encode_ground_truth, field_loss, mask_loss
from .evaluate import EvalReport, rasterize_segments, score, score_with_confidence_sweep
from .extract import center_of_mass, extract_segment, inertia_tensor, minor_eigenvector
from .frontend import gradient_field, load_field, resize_to_input, save_field
from .group import GroupingParams, LineSupportRegion, grow_regions, region_stats, similarity
from .pipeline import detect_field, detect_image, postprocess
from .segment import SegmentationParams, combined_foreground, global_threshold, local_threshold

__version__ = "0.1.0"

__all__ = [
    "AnnotationSet",
    "EvalReport",
    "GroupingParams",
    "HeatmapField",
    "LineSegment",
    "LineSupportRegion",
    "PipelineConfig",
    "SegmentationParams",
    "angle_distance",
    "center_of_mass",
    "circular_mean_angle",
    "combined_foreground",
    "combined_loss",
    "detect_field",
    "detect_image",
    "encode_ground_truth",
    "extract_segment",
    "field_loss",
    "global_threshold",
    "gradient_field",
    "grow_regions",
    "inertia_tensor",
    "level_line_angle",
    "load_field",
    "local_threshold",
    "mask_loss",
    "minor_eigenvector",
    "postprocess",
    "rasterize_segments",
    "region_stats",
    "resize_to_input",
    "save_field",
    "score",
    "score_with_confidence_sweep",
    "segment_level_line_angle",
    "similarity",
]

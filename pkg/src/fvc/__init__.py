"""Fractional vegetation cover from photographs of a quadrat frame."""

from .errors import (
    DegenerateConfiguration,
    DegenerateRect,
    EmptySegment,
    FvcError,
    InsufficientLines,
    NoFrameFound,
    NoLinesFound,
    ParallelInnerLines,
)
from .frame import FrameExtraction, FrameExtractor, HsvRange, extract_frame
from .gridlines import HoughParams, SegmentPolygon, detect_segment_quads, hough_lines
from .measure import (
    CoverReport,
    FrameSpec,
    braun_blanquet_class,
    cosine_similarity,
    coverage_percent,
    daubenmire_class,
    metric_area,
)
from .pipeline import Analysis, CoverEstimator, PipelineConfig, analyze
from .slic import SlicParams, SlicSegmenter, SuperpixelLabeling, enforce_connectivity, segment
from .vegetation import GreenCriterion, VegetationDetector, vegetation_mask

__version__ = "0.1.0"

__all__ = [
    "Analysis",
    "CoverEstimator",
    "CoverReport",
    "DegenerateConfiguration",
    "DegenerateRect",
    "EmptySegment",
    "FrameExtraction",
    "FrameExtractor",
    "FrameSpec",
    "FvcError",
    "GreenCriterion",
    "HoughParams",
    "HsvRange",
    "InsufficientLines",
    "NoFrameFound",
    "NoLinesFound",
    "ParallelInnerLines",
    "PipelineConfig",
    "SegmentPolygon",
    "SlicParams",
    "SlicSegmenter",
    "SuperpixelLabeling",
    "VegetationDetector",
    "analyze",
    "braun_blanquet_class",
    "cosine_similarity",
    "coverage_percent",
    "daubenmire_class",
    "detect_segment_quads",
    "enforce_connectivity",
    "extract_frame",
    "hough_lines",
    "metric_area",
    "segment",
    "vegetation_mask",
]

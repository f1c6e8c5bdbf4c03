"""Cover arithmetic, ocular cover-class scales and cosine similarity."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ._validation import check_mask, check_same_shape
from .errors import EmptySegment

SQ_IN_TO_SQ_CM = 6.4516

# lower bounds of each class; the last class is closed at 100
_DAUBENMIRE_EDGES = (5.0, 25.0, 50.0, 75.0, 95.0)
_BRAUN_BLANQUET_EDGES = (5.0, 25.0, 50.0, 75.0)


@dataclass(frozen=True)
class FrameSpec:
    """Physical size of one inner opening of the quadrat frame, in inches."""

    inner_width_in: float = 19.75
    inner_height_in: float = 6.75
    n_segments: int = 1

    def __post_init__(self):
        if self.inner_width_in <= 0 or self.inner_height_in <= 0:
            raise ValueError("frame dimensions must be positive")
        if self.n_segments < 1:
            raise ValueError("n_segments must be >= 1")

    @property
    def opening_area_sq_in(self) -> float:
        return self.inner_width_in * self.inner_height_in


@dataclass(frozen=True)
class CoverReport:
    segment_index: int
    polygon_pixels: int
    vegetation_pixels: int
    percent: float
    area_sq_in: float
    area_sq_cm: float
    daubenmire_class: int

    def to_dict(self) -> dict:
        return asdict(self)


def coverage_percent(veg, seg) -> float:
    """100 * |veg AND seg| / |seg|."""
    veg = check_mask(veg, "veg")
    seg = check_mask(seg, "seg")
    check_same_shape(veg, seg, "vegetation and segment masks")
    total = int(np.count_nonzero(seg))
    if total == 0:
        raise EmptySegment("segment mask is empty")
    return 100.0 * int(np.count_nonzero((veg > 0) & (seg > 0))) / total


def metric_area(veg_px: int, polygon_px: int, spec: FrameSpec = FrameSpec()) -> float:
    """Vegetated area in square inches: opening area scaled by the pixel ratio."""
    if polygon_px <= 0:
        raise EmptySegment("polygon has no pixels")
    if veg_px < 0 or veg_px > polygon_px:
        raise ValueError(f"vegetation pixels {veg_px} outside [0, {polygon_px}]")
    return spec.opening_area_sq_in * (veg_px / polygon_px)


def _check_percent(percent: float) -> float:
    p = float(percent)
    if math.isnan(p) or p < 0.0 or p > 100.0:
        raise ValueError(f"percent must lie in [0, 100], got {percent}")
    return p


def daubenmire_class(percent: float) -> int:
    """Six-class scale: [0,5) [5,25) [25,50) [50,75) [75,95) [95,100]."""
    p = _check_percent(percent)
    return 1 + sum(p >= edge for edge in _DAUBENMIRE_EDGES)


def braun_blanquet_class(percent: float) -> int:
    """Five-class scale: [0,5) [5,25) [25,50) [50,75) [75,100]."""
    p = _check_percent(percent)
    return 1 + sum(p >= edge for edge in _BRAUN_BLANQUET_EDGES)


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def cover_report(segment_index: int, veg, seg, spec: FrameSpec = FrameSpec()) -> CoverReport:
    veg = check_mask(veg, "veg")
    seg = check_mask(seg, "seg")
    check_same_shape(veg, seg, "vegetation and segment masks")
    poly_px = int(np.count_nonzero(seg))
    if poly_px == 0:
        raise EmptySegment(f"segment {segment_index} polygon is empty")
    veg_px = int(np.count_nonzero((veg > 0) & (seg > 0)))
    percent = 100.0 * veg_px / poly_px
    area = metric_area(veg_px, poly_px, spec)
    return CoverReport(segment_index, poly_px, veg_px, percent, area, area * SQ_IN_TO_SQ_CM, daubenmire_class(percent))

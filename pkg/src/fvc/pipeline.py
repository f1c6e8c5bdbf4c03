"""End-to-end cover estimation: frame -> superpixels -> vegetation -> openings -> cover."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_rgb
from .edges import canny
from .frame import FrameExtraction, HsvRange, extract_frame
from .gridlines import HoughParams, SegmentPolygon, count_openings, detect_segment_quads, segment_masks
from .measure import CoverReport, FrameSpec, cover_report
from .raster import rgb_to_lab
from .slic import SlicParams, SuperpixelLabeling, segment
from .vegetation import GreenCriterion, vegetation_mask


@dataclass
class PipelineConfig:
    hsv_lo: tuple = (70.0, 0.0, 110.0)
    hsv_hi: tuple = (180.0, 255.0, 255.0)
    median_k: int = 5
    canny_low: float = 50.0
    canny_high: float = 150.0
    superpixels: int = 300
    compactness: float = 10.0
    max_iters: int = 10
    residual_eps: float = 1.0
    green: GreenCriterion = field(default_factory=GreenCriterion)
    hough: HoughParams = field(default_factory=HoughParams)
    extend_factor: float = 5.0
    merge_dist_px: float = 10.0
    merge_ang_deg: float = 0.2
    n_segments: int | None = None  # None: count openings in the frame mask
    inner_width_in: float = 19.75
    inner_height_in: float = 6.75
    seed: int = 0

    @property
    def hsv_range(self) -> HsvRange:
        return HsvRange(tuple(self.hsv_lo), tuple(self.hsv_hi))

    @property
    def slic_params(self) -> SlicParams:
        return SlicParams(self.superpixels, self.compactness, self.max_iters, self.residual_eps)

    def frame_spec(self, n_segments: int | None = None) -> FrameSpec:
        return FrameSpec(self.inner_width_in, self.inner_height_in, n_segments or self.n_segments or 1)

    def hough_params(self) -> HoughParams:
        from dataclasses import replace

        return replace(self.hough, seed=self.seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hsv_lo"] = list(self.hsv_lo)
        d["hsv_hi"] = list(self.hsv_hi)
        return d


@dataclass
class Analysis:
    reports: list[CoverReport]
    extraction: FrameExtraction
    labeling: SuperpixelLabeling
    vegetation: np.ndarray
    frame_edges: np.ndarray
    quads: list[SegmentPolygon]
    lines: list
    masks: list[np.ndarray]


def analyze(img, config: PipelineConfig = PipelineConfig()) -> Analysis:
    img = check_rgb(img)
    ext = extract_frame(img, config.hsv_range, config.median_k, config.canny_low, config.canny_high)
    labeling = segment(rgb_to_lab(ext.rectified), config.slic_params)
    veg = vegetation_mask(ext.rectified, labeling, config.green)
    edges = canny(ext.frame_mask, config.canny_low, config.canny_high)
    n = config.n_segments or max(1, count_openings(ext.frame_mask))
    quads, _, lines = detect_segment_quads(
        edges, n, config.hough_params(), config.extend_factor, config.merge_dist_px, config.merge_ang_deg
    )
    h, w = ext.frame_mask.shape
    masks = segment_masks(quads, w, h)
    spec = config.frame_spec(n)
    reports = [cover_report(i, veg, m, spec) for i, m in enumerate(masks)]
    return Analysis(reports, ext, labeling, veg, edges, quads, lines, masks)


class CoverEstimator(BaseEstimator):
    """Estimator facade: ``predict`` maps images to per-segment percent cover.

    ``fit`` only validates the configuration; there is nothing to learn.
    """

    def __init__(self, n_segments=None, superpixels=300, compactness=10.0, green_mode="hue",
                 hsv_lo=(70, 0, 110), hsv_hi=(180, 255, 255), seed=0):
        self.n_segments = n_segments
        self.superpixels = superpixels
        self.compactness = compactness
        self.green_mode = green_mode
        self.hsv_lo = hsv_lo
        self.hsv_hi = hsv_hi
        self.seed = seed

    def _config(self) -> PipelineConfig:
        return PipelineConfig(
            hsv_lo=tuple(self.hsv_lo), hsv_hi=tuple(self.hsv_hi), superpixels=self.superpixels,
            compactness=self.compactness, green=GreenCriterion(mode=self.green_mode),
            n_segments=self.n_segments, seed=self.seed,
        )

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        return self

    def analyze(self, img) -> Analysis:
        check_is_fitted(self)
        return analyze(img, self.config_)

    def predict(self, X) -> np.ndarray:
        """Percent cover per segment for each image; ``X`` is an image or a list of images.

        Returns a 2-D array when every image has the same segment count,
        else a list of 1-D arrays.
        """
        check_is_fitted(self)
        images = [X] if isinstance(X, np.ndarray) and X.ndim == 3 else list(X)
        out = [np.array([r.percent for r in analyze(im, self.config_).reports]) for im in images]
        if len({len(o) for o in out}) <= 1:
            return np.array(out)
        return out

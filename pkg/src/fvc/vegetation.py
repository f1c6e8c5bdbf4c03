"""Per-superpixel mean colour and green classification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_rgb, check_same_shape
from .raster import bitwise_and, rgb_to_hsv, rgb_to_lab
from .slic import SlicParams, SuperpixelLabeling, segment

HUE_WINDOW = "hue"
EXCESS_GREEN = "exg"


@dataclass(frozen=True)
class GreenCriterion:
    """Rule deciding whether a mean superpixel colour counts as vegetation.

    ``mode="hue"``: HSV hue in ``[hue_lo, hue_hi]`` (half degrees) with
    saturation >= ``s_min`` and value >= ``v_min``.
    ``mode="exg"``: excess green ``2G - R - B`` above ``exg_threshold``.
    """

    mode: str = HUE_WINDOW
    hue_lo: float = 35
    hue_hi: float = 85
    s_min: float = 60
    v_min: float = 40
    exg_threshold: float = 20

    def __post_init__(self):
        if self.mode not in (HUE_WINDOW, EXCESS_GREEN):
            raise ValueError(f"unknown green mode {self.mode!r}")
        if self.hue_lo > self.hue_hi:
            raise ValueError("hue_lo exceeds hue_hi")
        if not (0 <= self.hue_lo <= 180 and 0 <= self.hue_hi <= 180):
            raise ValueError("hue bounds must lie in [0, 180]")
        if not (0 <= self.s_min <= 255 and 0 <= self.v_min <= 255):
            raise ValueError("saturation/value floors must lie in [0, 255]")


def mean_superpixel_color(img, labeling: SuperpixelLabeling) -> np.ndarray:
    """``(n_labels, 3)`` array of per-label mean R, G, B."""
    img = check_rgb(img)
    labels = labeling.labels
    check_same_shape(img, labels, "image and labeling")
    flat = labels.ravel()
    counts = np.bincount(flat, minlength=labeling.n_labels).astype(np.float64)
    means = np.stack(
        [np.bincount(flat, weights=img[..., c].ravel().astype(np.float64), minlength=labeling.n_labels) for c in range(3)],
        axis=1,
    )
    return means / np.maximum(counts, 1)[:, None]


def green_flags(colors, c: GreenCriterion = GreenCriterion()) -> np.ndarray:
    """Vectorised :func:`is_green` over an ``(n, 3)`` array of RGB colours."""
    colors = np.asarray(colors, dtype=np.float64).reshape(-1, 3)
    if c.mode == EXCESS_GREEN:
        exg = 2 * colors[:, 1] - colors[:, 0] - colors[:, 2]
        return exg > c.exg_threshold
    hsv = rgb_to_hsv(colors.reshape(1, -1, 3))[0] if len(colors) else np.zeros((0, 3))
    h, s, v = hsv[:, 0], hsv[:, 1], hsv[:, 2]
    return (h >= c.hue_lo) & (h <= c.hue_hi) & (s >= c.s_min) & (v >= c.v_min)


def is_green(color, c: GreenCriterion = GreenCriterion()) -> bool:
    return bool(green_flags([color], c)[0])


def vegetation_mask(img, labeling: SuperpixelLabeling, c: GreenCriterion = GreenCriterion()) -> np.ndarray:
    """White wherever the pixel's superpixel has a green mean colour."""
    flags = green_flags(mean_superpixel_color(img, labeling), c)
    return flags[labeling.labels].astype(np.uint8) * 255


def vegetation_overlay(img, mask) -> np.ndarray:
    """Image with non-vegetation pixels blacked out (for visual checks)."""
    return bitwise_and(check_rgb(img), mask)


class VegetationDetector(TransformerMixin, BaseEstimator):
    """SLIC + green filter as a transformer: RGB image in, 0/255 mask out."""

    def __init__(self, n_segments=300, compactness=10.0, max_iter=10, tol=1.0, green_mode=HUE_WINDOW,
                 hue_lo=35, hue_hi=85, s_min=60, v_min=40, exg_threshold=20):
        self.n_segments = n_segments
        self.compactness = compactness
        self.max_iter = max_iter
        self.tol = tol
        self.green_mode = green_mode
        self.hue_lo = hue_lo
        self.hue_hi = hue_hi
        self.s_min = s_min
        self.v_min = v_min
        self.exg_threshold = exg_threshold

    def criterion(self) -> GreenCriterion:
        return GreenCriterion(self.green_mode, self.hue_lo, self.hue_hi, self.s_min, self.v_min, self.exg_threshold)

    def fit(self, X=None, y=None):
        self.criterion_ = self.criterion()
        return self

    def transform(self, X):
        img = check_rgb(X)
        params = SlicParams(self.n_segments, self.compactness, self.max_iter, self.tol)
        labeling = segment(rgb_to_lab(img), params)
        self.labeling_ = labeling
        return vegetation_mask(img, labeling, self.criterion())

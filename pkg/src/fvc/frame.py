"""Locate the quadrat frame and rectify the photograph to a top view."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_hsv_triple, check_rgb
from .edges import canny, contour_area, find_contours, largest_contour
from .errors import NoFrameFound
from .geometry import RotatedRect, min_area_rect, rasterize_polygon, solve_homography, warp_perspective
from .raster import bitwise_and, median_blur, rgb_to_gray, rgb_to_hsv, threshold_range

_EDGE_PAD = 4  # keeps frames that touch the image border closed for tracing


@dataclass(frozen=True)
class HsvRange:
    lo: tuple[float, float, float] = (70.0, 0.0, 110.0)
    hi: tuple[float, float, float] = (180.0, 255.0, 255.0)

    def __post_init__(self):
        lo = check_hsv_triple(self.lo, "lo")
        hi = check_hsv_triple(self.hi, "hi")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"HSV lower bound {lo} exceeds upper bound {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def mask(self, rgb) -> np.ndarray:
        return threshold_range(rgb_to_hsv(rgb), self.lo, self.hi)


@dataclass
class FrameExtraction:
    rectified: np.ndarray
    frame_mask: np.ndarray
    homography: np.ndarray
    source_rect: RotatedRect
    source_corners: np.ndarray


def order_corners(corners, landscape: bool = False) -> np.ndarray:
    """Reorder rectangle corners as top-left, top-right, bottom-right, bottom-left.

    By default the top edge is the side closest in direction to the image x-axis,
    so the rectification rotates by at most 45 degrees.  With ``landscape`` the
    longer side is made horizontal instead.
    """
    c = np.asarray(corners, dtype=np.float64)
    if c.shape != (4, 2):
        raise ValueError("expected four corners")
    # enforce clockwise-on-screen order (positive signed area with y down)
    x, y = c[:, 0], c[:, 1]
    if np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)) < 0:
        c = c[::-1]
    best, best_score = 0, -math.inf
    for r in range(4):
        tl, tr, bl = c[r], c[(r + 1) % 4], c[(r + 3) % 4]
        top = tr - tl
        side = bl - tl
        score = top[0] / np.hypot(*top)
        if landscape:
            score += 10.0 * (np.hypot(*top) > np.hypot(*side) + 1e-9)
        if score > best_score + 1e-12:
            best, best_score = r, score
    return np.roll(c, -best, axis=0)


def extract_frame(
    img,
    hsv_range: HsvRange = HsvRange(),
    blur: int = 5,
    canny_low: float = 50,
    canny_high: float = 150,
    min_area_fraction: float = 0.01,
    landscape: bool = False,
) -> FrameExtraction:
    """Find the frame, crop it with its minimum-area rectangle and rectify."""
    img = check_rgb(img)
    h, w = img.shape[:2]
    detected = hsv_range.mask(img)
    gray = median_blur(rgb_to_gray(bitwise_and(img, detected)), blur)
    edges = canny(np.pad(gray, _EDGE_PAD, mode="constant"), canny_low, canny_high)
    contours = find_contours(edges)
    if not contours:
        raise NoFrameFound("no frame-coloured edges found")
    outline = largest_contour(contours) - _EDGE_PAD
    if contour_area(outline) < min_area_fraction * h * w:
        raise NoFrameFound("largest frame contour is below the minimum area")

    rect = min_area_rect(outline)
    loose = RotatedRect(rect.center, rect.width + 2.0, rect.height + 2.0, rect.angle)
    roi = bitwise_and(img, rasterize_polygon(loose.corners(), w, h, check=False))

    src = order_corners(rect.corners(), landscape=landscape)
    # corners are pixel centres, so a side of length L spans L + 1 pixels at unit scale
    out_w = int(round(np.hypot(*(src[1] - src[0])))) + 1
    out_h = int(round(np.hypot(*(src[3] - src[0])))) + 1
    dst = np.array([(0, 0), (out_w - 1, 0), (out_w - 1, out_h - 1), (0, out_h - 1)], dtype=np.float64)
    hom = solve_homography(src, dst)
    rectified = warp_perspective(roi, hom, out_w, out_h)
    frame_mask = hsv_range.mask(rectified)
    return FrameExtraction(rectified, frame_mask, hom, rect, src)


class FrameExtractor(TransformerMixin, BaseEstimator):
    """Transformer returning the rectified frame image."""

    def __init__(self, hsv_lo=(70, 0, 110), hsv_hi=(180, 255, 255), blur=5, canny_low=50, canny_high=150,
                 min_area_fraction=0.01, landscape=False):
        self.hsv_lo = hsv_lo
        self.hsv_hi = hsv_hi
        self.blur = blur
        self.canny_low = canny_low
        self.canny_high = canny_high
        self.min_area_fraction = min_area_fraction
        self.landscape = landscape

    def fit(self, X=None, y=None):
        self.hsv_range_ = HsvRange(tuple(self.hsv_lo), tuple(self.hsv_hi))
        return self

    def transform(self, X):
        rng = HsvRange(tuple(self.hsv_lo), tuple(self.hsv_hi))
        self.extraction_ = extract_frame(X, rng, self.blur, self.canny_low, self.canny_high,
                                         self.min_area_fraction, self.landscape)
        return self.extraction_.rectified

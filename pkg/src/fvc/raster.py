"""Pixel buffers and per-pixel primitives.

Images are plain numpy arrays:

* RGB images: ``(height, width, 3)`` uint8, channels in R, G, B order.
* Gray images: ``(height, width)`` uint8.
* Binary masks: ``(height, width)`` uint8 holding only 0 and 255.
* HSV images: ``(height, width, 3)`` float64 using the half-degree hue
  convention: hue in [0, 180), saturation and value in [0, 255].  This is the
  scale in which the frame threshold ``(70, 0, 110)``-``(180, 255, 255)`` is
  expressed.  Values are kept unquantized so the conversion is invertible.
* Lab images: ``(height, width, 3)`` float64, CIE L*a*b* under D65.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from ._validation import check_gray, check_mask, check_rgb, check_same_shape

# sRGB primaries to CIE XYZ, D65 white, 2 degree observer.
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# White point taken from the matrix itself so sRGB white lands on L=100, a=b=0.
_D65_WHITE = _SRGB_TO_XYZ.sum(axis=1)
_LAB_EPS = (6.0 / 29.0) ** 3


def rgb_to_hsv(img) -> np.ndarray:
    """Convert an RGB image to HSV with hue in half degrees.

    Achromatic pixels get hue 0 and saturation 0.
    """
    rgb = check_rgb(img).astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    vmax = rgb.max(axis=-1)
    delta = vmax - rgb.min(axis=-1)
    safe = np.where(delta > 0, delta, 1.0)
    hue = np.where(
        vmax == r,
        60.0 * (g - b) / safe,
        np.where(vmax == g, 120.0 + 60.0 * (b - r) / safe, 240.0 + 60.0 * (r - g) / safe),
    )
    hue[delta == 0] = 0.0
    hue[hue < 0] += 360.0
    sat = 255.0 * delta / np.where(vmax > 0, vmax, 1.0)
    return np.stack([hue / 2.0, sat, vmax], axis=-1)


def hsv_to_rgb(hsv) -> np.ndarray:
    """Inverse of :func:`rgb_to_hsv`; returns float RGB in [0, 255]."""
    hsv = np.asarray(hsv, dtype=np.float64)
    h = np.mod(hsv[..., 0] * 2.0, 360.0) / 60.0
    s = hsv[..., 1] / 255.0
    v = hsv[..., 2]
    c = v * s
    x = c * (1 - np.abs(np.mod(h, 2.0) - 1))
    m = v - c
    sector = np.floor(h).astype(int) % 6
    zeros = np.zeros_like(c)
    table = [
        (c, x, zeros),
        (x, c, zeros),
        (zeros, c, x),
        (zeros, x, c),
        (x, zeros, c),
        (c, zeros, x),
    ]
    out = np.zeros(hsv.shape, dtype=np.float64)
    for i, (rr, gg, bb) in enumerate(table):
        sel = sector == i
        out[..., 0][sel] = rr[sel]
        out[..., 1][sel] = gg[sel]
        out[..., 2][sel] = bb[sel]
    return out + m[..., None]


def _srgb_to_linear(c: np.ndarray) -> np.ndarray:
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def rgb_to_lab(img) -> np.ndarray:
    """sRGB -> linear RGB -> XYZ (D65) -> CIE L*a*b*."""
    rgb = check_rgb(img).astype(np.float64) / 255.0
    xyz = _srgb_to_linear(rgb) @ _SRGB_TO_XYZ.T
    t = xyz / _D65_WHITE
    f = np.where(t > _LAB_EPS, np.cbrt(t), t / (3 * (6.0 / 29.0) ** 2) + 4.0 / 29.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    # black maps to exactly zero rather than a rounding residue
    lab[..., 0] = np.clip(lab[..., 0], 0.0, 100.0)
    return lab


def rgb_to_gray(img) -> np.ndarray:
    """ITU-R BT.601 luma, rounded to uint8."""
    rgb = check_rgb(img).astype(np.float64)
    gray = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.rint(gray), 0, 255).astype(np.uint8)


def threshold_range(hsv, lo, hi) -> np.ndarray:
    """White where every channel lies in the closed interval ``[lo, hi]``."""
    hsv = np.asarray(hsv)
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if lo.shape != (3,) or hi.shape != (3,):
        raise ValueError("lo and hi must be (h, s, v) triples")
    if np.any(lo > hi):
        raise ValueError(f"lower bound {tuple(lo)} exceeds upper bound {tuple(hi)}")
    inside = np.all((hsv >= lo) & (hsv <= hi), axis=-1)
    return inside.astype(np.uint8) * 255


def median_blur(img, k: int = 5) -> np.ndarray:
    """k x k median filter with edge replication at the borders."""
    if k < 1 or k % 2 == 0:
        raise ValueError(f"window size must be a positive odd integer, got {k}")
    img = check_gray(img)
    if k == 1:
        return img.copy()
    return ndimage.median_filter(img, size=k, mode="nearest")


def bitwise_and(img, mask) -> np.ndarray:
    """Keep pixels under white mask entries, zero the rest."""
    img = np.asarray(img)
    mask = check_mask(mask)
    check_same_shape(img, mask)
    keep = mask > 0
    if img.ndim == 3:
        keep = keep[..., None]
    return np.where(keep, img, 0).astype(img.dtype)


def count_nonzero(mask) -> int:
    return int(np.count_nonzero(np.asarray(mask)))


def read_image(path) -> np.ndarray:
    """Read a PNG or JPEG file as an 8-bit RGB array (alpha dropped)."""
    path = Path(path)
    if path.suffix.lower() not in {".png", ".jpg", ".jpeg"}:
        raise ValueError(f"unsupported image format: {path.suffix or path.name}")
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def write_image(path, img) -> None:
    img = np.asarray(img)
    if img.ndim == 2:
        Image.fromarray(check_gray(img), mode="L").save(path)
    else:
        Image.fromarray(check_rgb(img), mode="RGB").save(path)

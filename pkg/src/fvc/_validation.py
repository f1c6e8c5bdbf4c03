"""Input validation helpers used across the package."""

from __future__ import annotations

import numpy as np


def check_rgb(img, name="img") -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"{name} must have shape (height, width, 3), got {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"{name} must be at least 1x1")
    if img.dtype != np.uint8:
        if np.issubdtype(img.dtype, np.floating) or np.issubdtype(img.dtype, np.integer):
            if img.min(initial=0) < 0 or img.max(initial=0) > 255:
                raise ValueError(f"{name} values must lie in [0, 255]")
            img = np.rint(img).astype(np.uint8)
        else:
            raise TypeError(f"{name} has unsupported dtype {img.dtype}")
    return img


def check_gray(img, name="img") -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"{name} must be at least 1x1")
    if img.dtype != np.uint8:
        if img.min(initial=0) < 0 or img.max(initial=0) > 255:
            raise ValueError(f"{name} values must lie in [0, 255]")
        img = np.rint(img).astype(np.uint8)
    return img


def check_mask(mask, name="mask") -> np.ndarray:
    """Return ``mask`` as a uint8 array holding only 0 and 255.

    Boolean input is accepted and mapped to {0, 255}.
    """
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {mask.shape}")
    if mask.dtype == bool:
        return mask.astype(np.uint8) * 255
    if mask.dtype != np.uint8:
        if not np.all((mask == 0) | (mask == 255)):
            raise ValueError(f"{name} must contain only 0 and 255")
        return mask.astype(np.uint8)
    if np.count_nonzero((mask != 0) & (mask != 255)):
        raise ValueError(f"{name} must contain only 0 and 255")
    return mask


def check_same_shape(a: np.ndarray, b: np.ndarray, what="image and mask") -> None:
    if a.shape[:2] != b.shape[:2]:
        raise ValueError(f"{what} dimensions differ: {a.shape[:2]} vs {b.shape[:2]}")


def check_hsv_triple(t, name) -> tuple[float, float, float]:
    t = tuple(float(v) for v in t)
    if len(t) != 3:
        raise ValueError(f"{name} must have three components")
    return t

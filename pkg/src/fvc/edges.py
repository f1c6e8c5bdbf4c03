"""Canny edge detection and outer-border contour tracing."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ._validation import check_gray, check_mask
from .geometry import polygon_area

# (drow, dcol) neighbours in clockwise order on screen (y grows downwards)
_CW = [(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1)]
_EIGHT = np.ones((3, 3), dtype=bool)


def gaussian_kernel(size: int = 5, sigma: float = 1.4) -> np.ndarray:
    r = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(r**2) / (2 * sigma**2))
    k = np.outer(g, g)
    return k / k.sum()


def gradients(img, smooth: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Sobel derivatives (d/dx, d/dy) after optional 5x5 Gaussian smoothing."""
    f = np.asarray(img, dtype=np.float64)
    if smooth:
        f = ndimage.convolve(f, gaussian_kernel(), mode="nearest")
    gx = ndimage.sobel(f, axis=1, mode="nearest")
    gy = ndimage.sobel(f, axis=0, mode="nearest")
    return gx, gy


def canny(img, low: float = 50, high: float = 150) -> np.ndarray:
    """Canny edge map as a 0/255 mask.

    Gaussian 5x5 (sigma 1.4) smoothing, Sobel gradients, non-maximum
    suppression over four direction bins, then hysteresis: pixels at or above
    ``high`` seed edges, pixels in ``[low, high)`` survive only when
    8-connected to a seed.
    """
    if not 0 <= low <= high <= 255:
        raise ValueError(f"need 0 <= low <= high <= 255, got low={low}, high={high}")
    gray = check_gray(img)
    gx, gy = gradients(gray)
    mag = np.hypot(gx, gy)

    # direction bin of the gradient: 0 -> horizontal neighbours, 2 -> vertical
    ang = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (np.floor((ang + 22.5) / 45.0).astype(int)) % 4
    padded = np.pad(mag, 1, mode="constant")
    h, w = mag.shape
    nbrs = {
        0: ((0, 1), (0, -1)),
        1: ((1, 1), (-1, -1)),
        2: ((1, 0), (-1, 0)),
        3: ((1, -1), (-1, 1)),
    }
    # ties within rounding noise are kept so symmetric steps give symmetric edges
    slack = mag * 1e-9
    keep = np.zeros_like(mag, dtype=bool)
    for s, ((dr1, dc1), (dr2, dc2)) in nbrs.items():
        n1 = padded[1 + dr1 : 1 + dr1 + h, 1 + dc1 : 1 + dc1 + w]
        n2 = padded[1 + dr2 : 1 + dr2 + h, 1 + dc2 : 1 + dc2 + w]
        keep |= (sector == s) & (mag + slack >= n1) & (mag + slack >= n2)
    keep &= mag > 0

    weak = keep & (mag >= low)
    strong = keep & (mag >= high)
    labels, n = ndimage.label(weak, structure=_EIGHT)
    if n == 0:
        return np.zeros(mag.shape, dtype=np.uint8)
    seeded = np.zeros(n + 1, dtype=bool)
    seeded[np.unique(labels[strong])] = True
    seeded[0] = False
    return seeded[labels].astype(np.uint8) * 255


def _trace_outer(img: np.ndarray, r0: int, c0: int) -> list[tuple[int, int]]:
    """Follow the outer border from its top-left pixel (Suzuki-Abe, outer case).

    ``img`` must carry a one-pixel background margin around the component.
    """
    first = None
    for k in range(8):
        dr, dc = _CW[(4 + k) % 8]  # clockwise from the west neighbour
        if img[r0 + dr, c0 + dc]:
            first = (r0 + dr, c0 + dc)
            break
    if first is None:
        return [(r0, c0)]
    start = (r0, c0)
    pts = [start]
    prev, cur = first, start
    while True:
        d_prev = _CW.index((prev[0] - cur[0], prev[1] - cur[1]))
        for k in range(1, 9):
            dr, dc = _CW[(d_prev - k) % 8]
            if img[cur[0] + dr, cur[1] + dc]:
                nxt = (cur[0] + dr, cur[1] + dc)
                break
        if nxt == start and cur == first:
            return pts
        pts.append(nxt)
        prev, cur = cur, nxt


def find_contours(mask) -> list[np.ndarray]:
    """Outer border of every 8-connected white component, in raster scan order.

    Each contour is an ``(n, 2)`` int array of ``(x, y)`` pixel coordinates.
    """
    m = check_mask(mask) > 0
    labels, n = ndimage.label(m, structure=_EIGHT)
    contours = []
    for lab, sl in enumerate(ndimage.find_objects(labels), start=1):
        sub = np.pad(labels[sl] == lab, 1, mode="constant")
        c0 = int(np.flatnonzero(sub[1])[0])
        pts = _trace_outer(sub, 1, c0)
        arr = np.array(pts, dtype=np.int64)[:, ::-1] - 1
        arr += (sl[1].start, sl[0].start)
        contours.append(arr)
    return contours


def contour_area(contour) -> float:
    c = np.asarray(contour, dtype=np.float64)
    if len(c) < 3:
        return 0.0
    return abs(polygon_area(c))


def largest_contour(contours) -> np.ndarray:
    """Contour enclosing the largest shoelace area; earliest wins ties."""
    if len(contours) == 0:
        raise ValueError("no contours given")
    areas = [contour_area(c) for c in contours]
    return contours[int(np.argmax(areas))]

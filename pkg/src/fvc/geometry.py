"""Planar geometry: segments, lines, hulls, rectangles, homographies, fills.

Pixel ``(col, row)`` has its center at the real coordinate ``(x, y) = (col, row)``.
All homographies, intersections and rasterization share that convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateConfiguration, DegenerateRect

_PARALLEL_EPS = 1e-9


@dataclass(frozen=True)
class PolarLine:
    """Line ``rho = x cos(theta) + y sin(theta)``; theta in [0, pi), rho signed."""

    rho: float
    theta: float


@dataclass(frozen=True)
class LineSegment:
    p0: tuple[float, float]
    p1: tuple[float, float]

    def __post_init__(self):
        p0 = (float(self.p0[0]), float(self.p0[1]))
        p1 = (float(self.p1[0]), float(self.p1[1]))
        if p0 == p1:
            raise DegenerateConfiguration("segment endpoints coincide")
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)

    @property
    def midpoint(self) -> tuple[float, float]:
        return ((self.p0[0] + self.p1[0]) / 2.0, (self.p0[1] + self.p1[1]) / 2.0)

    @property
    def length(self) -> float:
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])

    def direction(self) -> np.ndarray:
        d = np.subtract(self.p1, self.p0)
        return d / np.hypot(d[0], d[1])

    def polar(self) -> PolarLine:
        """Supporting line in normal form."""
        theta = segment_angle(self) + math.pi / 2.0
        if theta >= math.pi:
            theta -= math.pi
        rho = self.p0[0] * math.cos(theta) + self.p0[1] * math.sin(theta)
        return PolarLine(rho, theta)

    def distance_to_point(self, pt) -> float:
        """Perpendicular distance from ``pt`` to the supporting line."""
        d = self.direction()
        vx, vy = pt[0] - self.p0[0], pt[1] - self.p0[1]
        return abs(vx * d[1] - vy * d[0])


@dataclass(frozen=True)
class RotatedRect:
    """Rectangle with ``width`` along direction ``angle`` in [0, pi/2)."""

    center: tuple[float, float]
    width: float
    height: float
    angle: float

    @property
    def area(self) -> float:
        return self.width * self.height

    def corners(self) -> np.ndarray:
        """Corners as a (4, 2) array: -u-v, +u-v, +u+v, -u+v."""
        u = np.array([math.cos(self.angle), math.sin(self.angle)])
        v = np.array([-u[1], u[0]])
        c = np.asarray(self.center, dtype=float)
        hw, hh = self.width / 2.0, self.height / 2.0
        return np.array([c - hw * u - hh * v, c + hw * u - hh * v, c + hw * u + hh * v, c - hw * u + hh * v])


def segment_angle(s: LineSegment) -> float:
    """Undirected angle of ``s`` in [0, pi)."""
    a = math.atan2(s.p1[1] - s.p0[1], s.p1[0] - s.p0[0]) % math.pi
    if a >= math.pi - 1e-15:
        a = 0.0
    return a + 0.0


def extend_segment(s: LineSegment, factor: float) -> LineSegment:
    """Scale ``s`` about its midpoint by ``factor``."""
    if factor < 1:
        raise ValueError(f"extension factor must be >= 1, got {factor}")
    mx, my = s.midpoint
    hx = (s.p1[0] - s.p0[0]) / 2.0 * factor
    hy = (s.p1[1] - s.p0[1]) / 2.0 * factor
    return LineSegment((mx - hx, my - hy), (mx + hx, my + hy))


def intersect_lines(a: LineSegment, b: LineSegment):
    """Intersection of the supporting lines, or ``None`` when parallel."""
    da, db = a.direction(), b.direction()
    cross = da[0] * db[1] - da[1] * db[0]
    if abs(cross) < _PARALLEL_EPS:
        return None
    w = np.subtract(b.p0, a.p0)
    t = (w[0] * db[1] - w[1] * db[0]) / cross
    return (a.p0[0] + t * da[0], a.p0[1] + t * da[1])


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Convex hull by monotone chain, counterclockwise (positive shoelace area).

    Collinear boundary points are dropped.
    """
    pts = np.unique(np.asarray(points, dtype=np.float64).reshape(-1, 2), axis=0)
    if len(pts) < 3:
        raise DegenerateConfiguration("convex hull needs at least 3 distinct points")
    pts = [tuple(p) for p in pts]  # np.unique sorts lexicographically
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        raise DegenerateConfiguration("all points are collinear")
    return hull


def polygon_area(poly) -> float:
    """Signed shoelace area; positive for counterclockwise vertex order."""
    p = np.asarray(poly, dtype=np.float64)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def polygon_perimeter(poly) -> float:
    p = np.asarray(poly, dtype=np.float64)
    return float(np.hypot(*(np.roll(p, -1, axis=0) - p).T).sum())


def min_area_rect(points) -> RotatedRect:
    """Smallest enclosing rectangle via rotating calipers over the convex hull."""
    try:
        hull = convex_hull(points)
    except DegenerateConfiguration as exc:
        raise DegenerateRect(str(exc)) from exc
    n = len(hull)
    edges = np.roll(hull, -1, axis=0) - hull
    units = edges / np.hypot(edges[:, 0], edges[:, 1])[:, None]

    def proj(idx, axis):
        return hull[idx % n] @ axis

    u0 = units[0]
    v0 = np.array([-u0[1], u0[0]])
    j = int(np.argmax(hull @ u0))  # far end along the edge
    k = int(np.argmax(hull @ v0))  # opposite side
    m = int(np.argmin(hull @ u0))  # near end along the edge
    best = None
    for i in range(n):
        u = units[i]
        v = np.array([-u[1], u[0]])
        while proj(j + 1, u) > proj(j, u) + 1e-12:
            j += 1
        while proj(k + 1, v) > proj(k, v) + 1e-12:
            k += 1
        while proj(m + 1, u) < proj(m, u) - 1e-12:
            m += 1
        lo_u, hi_u = proj(m, u), proj(j, u)
        lo_v, hi_v = hull[i] @ v, proj(k, v)
        area = (hi_u - lo_u) * (hi_v - lo_v)
        if best is None or area < best[0] - 1e-12 * max(1.0, abs(best[0])):
            best = (area, u, v, lo_u, hi_u, lo_v, hi_v)
    area, u, v, lo_u, hi_u, lo_v, hi_v = best
    if area <= 1e-12:
        raise DegenerateRect("points are collinear; enclosing rectangle has zero area")
    cu, cv = (lo_u + hi_u) / 2.0, (lo_v + hi_v) / 2.0
    center = cu * u + cv * v
    width, height = hi_u - lo_u, hi_v - lo_v
    angle = math.atan2(u[1], u[0]) % math.pi
    if angle >= math.pi / 2:
        angle -= math.pi / 2
        width, height = height, width
    if angle > math.pi / 2 - 1e-12:
        angle = 0.0
        width, height = height, width
    return RotatedRect((float(center[0]), float(center[1])), float(width), float(height), float(angle))


def _collinear_triple(pts: np.ndarray) -> bool:
    scale = max(1.0, float(np.ptp(pts, axis=0).max()) ** 2)
    return any(abs(_cross(a, b, c)) < 1e-9 * scale for a, b, c in combinations(pts, 3))


def solve_homography(src, dst) -> np.ndarray:
    """Direct linear transform for four correspondences; ``H[2, 2] == 1``."""
    src = np.asarray(src, dtype=np.float64).reshape(4, 2)
    dst = np.asarray(dst, dtype=np.float64).reshape(4, 2)
    if _collinear_triple(src) or _collinear_triple(dst):
        raise DegenerateConfiguration("three of the four points are collinear")
    a = np.zeros((8, 8))
    rhs = np.zeros(8)
    for i, ((x, y), (u, v)) in enumerate(zip(src, dst)):
        a[2 * i] = [x, y, 1, 0, 0, 0, -u * x, -u * y]
        a[2 * i + 1] = [0, 0, 0, x, y, 1, -v * x, -v * y]
        rhs[2 * i], rhs[2 * i + 1] = u, v
    try:
        h = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateConfiguration("singular correspondence system") from exc
    return np.append(h, 1.0).reshape(3, 3)


def apply_homography(h, points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    hom = np.column_stack([pts, np.ones(len(pts))]) @ np.asarray(h, dtype=np.float64).T
    return hom[:, :2] / hom[:, 2:3]


def _check_invertible(h) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (3, 3):
        raise ValueError("homography must be 3x3")
    if abs(np.linalg.det(h)) < 1e-9:
        raise DegenerateConfiguration("homography is not invertible")
    return h


def warp_perspective(img, h, out_w: int, out_h: int, interpolation: str = "bilinear") -> np.ndarray:
    """Resample ``img`` so that output pixel ``p`` takes the input value at ``H^-1 p``.

    Samples falling outside the input (beyond half a pixel) become 0.
    """
    h = _check_invertible(h)
    src = np.asarray(img)
    ih, iw = src.shape[:2]
    hinv = np.linalg.inv(h)
    ys, xs = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    den = hinv[2, 0] * xs + hinv[2, 1] * ys + hinv[2, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        sx = (hinv[0, 0] * xs + hinv[0, 1] * ys + hinv[0, 2]) / den
        sy = (hinv[1, 0] * xs + hinv[1, 1] * ys + hinv[1, 2]) / den
    valid = (den > 0) & (sx >= -0.5) & (sx <= iw - 0.5) & (sy >= -0.5) & (sy <= ih - 0.5)
    sx = np.where(valid, np.clip(sx, 0, iw - 1), 0.0)
    sy = np.where(valid, np.clip(sy, 0, ih - 1), 0.0)
    data = src.astype(np.float64) if src.ndim == 2 else src.astype(np.float64)
    if interpolation == "nearest":
        out = data[np.rint(sy).astype(int), np.rint(sx).astype(int)]
    elif interpolation == "bilinear":
        x0 = np.floor(sx).astype(int)
        y0 = np.floor(sy).astype(int)
        x1 = np.minimum(x0 + 1, iw - 1)
        y1 = np.minimum(y0 + 1, ih - 1)
        fx = sx - x0
        fy = sy - y0
        if src.ndim == 3:
            fx, fy = fx[..., None], fy[..., None]
        top = data[y0, x0] * (1 - fx) + data[y0, x1] * fx
        bottom = data[y1, x0] * (1 - fx) + data[y1, x1] * fx
        out = top * (1 - fy) + bottom * fy
    else:
        raise ValueError(f"unknown interpolation {interpolation!r}")
    if src.ndim == 3:
        out = out * valid[..., None]
    else:
        out = out * valid
    if np.issubdtype(src.dtype, np.integer):
        info = np.iinfo(src.dtype)
        return np.clip(np.rint(out), info.min, info.max).astype(src.dtype)
    return out.astype(src.dtype)


def _segments_cross(p1, p2, q1, q2) -> bool:
    d1, d2 = _cross(q1, q2, p1), _cross(q1, q2, p2)
    d3, d4 = _cross(p1, p2, q1), _cross(p1, p2, q2)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4)


def is_simple(poly) -> bool:
    p = np.asarray(poly, dtype=np.float64)
    n = len(p)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]):
                return False
    return True


def rasterize_polygon(poly, w: int, h: int, check: bool = True) -> np.ndarray:
    """Scanline fill: a pixel is white iff its center is inside (even-odd rule).

    Crossings are half-open (``y0 <= y < y1`` and ``x_in <= x < x_out``) so that
    polygons sharing an edge never both claim a pixel.
    """
    p = np.asarray(poly, dtype=np.float64).reshape(-1, 2)
    if len(p) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    if check and not is_simple(p):
        raise DegenerateConfiguration("polygon is self-intersecting")
    mask = np.zeros((h, w), dtype=np.uint8)
    if w <= 0 or h <= 0:
        return mask
    q = np.roll(p, -1, axis=0)
    ylo = max(0, int(math.ceil(p[:, 1].min())))
    yhi = min(h - 1, int(math.floor(p[:, 1].max())))
    if ylo > yhi:
        return mask
    rows = np.arange(ylo, yhi + 1, dtype=np.float64)
    y0, y1 = p[:, 1][:, None], q[:, 1][:, None]
    x0, x1 = p[:, 0][:, None], q[:, 0][:, None]
    spans = ((y0 <= rows) & (rows < y1)) | ((y1 <= rows) & (rows < y0))
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = x0 + (rows - y0) * (x1 - x0) / (y1 - y0)
    xs = np.where(spans, xs, np.inf)
    xs.sort(axis=0)
    counts = spans.sum(axis=0)
    diff = np.zeros((len(rows), w + 1), dtype=np.int32)
    ridx = np.arange(len(rows))
    for k in range(0, xs.shape[0] - 1, 2):
        has = counts >= k + 2
        if not has.any():
            break
        start = np.clip(np.ceil(xs[k, has]), 0, w).astype(int)
        stop = np.clip(np.ceil(xs[k + 1, has]), 0, w).astype(int)
        np.add.at(diff, (ridx[has], start), 1)
        np.add.at(diff, (ridx[has], stop), -1)
    inside = np.cumsum(diff[:, :w], axis=1) > 0
    mask[ylo : yhi + 1] = inside.astype(np.uint8) * 255
    return mask

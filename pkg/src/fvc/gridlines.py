"""Frame bar lines: probabilistic Hough detection and per-opening quadrilaterals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from ._validation import check_mask
from .errors import InsufficientLines, NoLinesFound, ParallelInnerLines
from .geometry import LineSegment, extend_segment, intersect_lines, rasterize_polygon, segment_angle

HORIZONTAL = "horizontal"
VERTICAL = "vertical"
OTHER = "other"


@dataclass(frozen=True)
class HoughParams:
    rho_res: float = 1.0
    theta_res_deg: float = 1.0
    vote_start: int = 180
    vote_step: int = 10
    vote_floor: int = 50
    sample_fraction: float = 0.3
    min_len: float = 50.0
    max_gap: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.rho_res <= 0 or self.theta_res_deg <= 0:
            raise ValueError("accumulator resolutions must be positive")
        if self.vote_floor > self.vote_start:
            raise ValueError("vote_floor exceeds vote_start")
        if self.vote_step <= 0:
            raise ValueError("vote_step must be positive")
        if not 0 < self.sample_fraction <= 1:
            raise ValueError("sample_fraction must lie in (0, 1]")

    def thresholds(self) -> list[int]:
        return list(range(self.vote_start, self.vote_floor - 1, -self.vote_step))


@dataclass
class SegmentLines:
    segment_index: int
    horizontals: list = field(default_factory=list)
    verticals: list = field(default_factory=list)
    band_top: float | None = None
    band_bottom: float | None = None
    center_x: float | None = None

    @property
    def expected_counts_ok(self) -> bool:
        return len(self.horizontals) <= 4 and len(self.verticals) <= 2


@dataclass
class SegmentPolygon:
    segment_index: int
    quad: np.ndarray  # (4, 2): top-left, top-right, bottom-right, bottom-left


def hough_accumulator(xs, ys, shape, rho_res: float = 1.0, theta_res_deg: float = 1.0):
    """Vote every point over all theta bins.

    Returns ``(acc, rhos, thetas)`` where ``acc[i, j]`` counts points on the line
    ``rhos[i] = x cos(thetas[j]) + y sin(thetas[j])``.
    """
    h, w = shape
    thetas = np.deg2rad(np.arange(0.0, 180.0, theta_res_deg))
    diag = math.hypot(h, w)
    n_rho = int(math.ceil(diag / rho_res))
    rhos = np.arange(-n_rho, n_rho + 1) * rho_res
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    acc = np.zeros((len(rhos), len(thetas)), dtype=np.int64)
    if len(xs):
        r = np.outer(xs, np.cos(thetas)) + np.outer(ys, np.sin(thetas))
        ri = np.rint(r / rho_res).astype(np.int64) + n_rho
        flat = ri * len(thetas) + np.arange(len(thetas))[None, :]
        acc = np.bincount(flat.ravel(), minlength=acc.size).reshape(acc.shape)
    return acc, rhos, thetas


def _fit_line(xs, ys):
    """Total least squares line: (centroid, unit direction)."""
    cx, cy = xs.mean(), ys.mean()
    dx, dy = xs - cx, ys - cy
    sxx, syy, sxy = (dx * dx).sum(), (dy * dy).sum(), (dx * dy).sum()
    ang = 0.5 * math.atan2(2 * sxy, sxx - syy)
    return cx, cy, math.cos(ang), math.sin(ang)


def _runs(t: np.ndarray, max_gap: float):
    order = np.argsort(t, kind="stable")
    ts = t[order]
    breaks = np.flatnonzero(np.diff(ts) > max_gap) + 1
    return [order[a:b] for a, b in zip(np.r_[0, breaks], np.r_[breaks, len(ts)])]


def _extract_segments(xs, ys, peaks, rhos, thetas, threshold, p: HoughParams, scale):
    consumed = np.zeros(len(xs), dtype=bool)
    found = []
    band = max(1.0, p.rho_res)
    for ri, ti, votes in peaks:
        if votes * scale < threshold:
            break
        c, s = math.cos(thetas[ti]), math.sin(thetas[ti])
        near = ~consumed & (np.abs(xs * c + ys * s - rhos[ri]) <= band)
        if near.sum() < threshold:
            continue
        # refine the coarse bin line on its own support, then regather
        cx, cy, ux, uy = _fit_line(xs[near], ys[near])
        for _ in range(2):
            dist = np.abs((xs - cx) * uy - (ys - cy) * ux)
            near = ~consumed & (dist <= 1.5)
            if near.sum() < 2:
                break
            cx, cy, ux, uy = _fit_line(xs[near], ys[near])
        if near.sum() < threshold:
            continue
        idx = np.flatnonzero(near)
        t = (xs[idx] - cx) * ux + (ys[idx] - cy) * uy
        for run in _runs(t, p.max_gap):
            if len(run) < 2:
                continue
            sel = idx[run]
            rx, ry, vx, vy = _fit_line(xs[sel], ys[sel])
            tt = (xs[sel] - rx) * vx + (ys[sel] - ry) * vy
            t0, t1 = tt.min(), tt.max()
            if t1 - t0 < p.min_len:
                continue
            found.append(LineSegment((rx + t0 * vx, ry + t0 * vy), (rx + t1 * vx, ry + t1 * vy)))
            consumed[sel] = True
    return found


def hough_lines(edges, p: HoughParams = HoughParams()) -> list[LineSegment]:
    """Probabilistic Hough line segments.

    A seeded random subset (``sample_fraction``) of edge pixels votes; bin
    counts are rescaled by the inverse fraction before comparison with the
    threshold.  Peaks are visited in decreasing vote order and confirmed on all
    unclaimed edge pixels along the line, which are split into runs at gaps
    larger than ``max_gap``; runs of at least ``min_len`` become segments and
    claim their pixels.  The threshold starts at ``vote_start`` and drops by
    ``vote_step`` until some segment is found or ``vote_floor`` is passed.
    """
    mask = check_mask(edges, "edges")
    ys, xs = np.nonzero(mask)
    if len(xs) == 0:
        raise NoLinesFound("edge map is empty")
    xs = xs.astype(np.float64)
    ys = ys.astype(np.float64)
    n = len(xs)
    if p.sample_fraction < 1.0:
        rng = np.random.default_rng(p.seed)
        m = max(1, int(round(p.sample_fraction * n)))
        pick = np.sort(rng.choice(n, size=m, replace=False))
    else:
        pick = np.arange(n)
    scale = n / len(pick)
    acc, rhos, thetas = hough_accumulator(xs[pick], ys[pick], mask.shape, p.rho_res, p.theta_res_deg)

    local_max = (acc == ndimage.maximum_filter(acc, size=3, mode="constant")) & (acc > 0)
    ri, ti = np.nonzero(local_max)
    votes = acc[ri, ti]
    order = np.lexsort((ri, ti, -votes))
    peaks = list(zip(ri[order].tolist(), ti[order].tolist(), votes[order].tolist()))

    for threshold in p.thresholds():
        segs = _extract_segments(xs, ys, peaks, rhos, thetas, threshold, p, scale)
        if segs:
            return segs
    raise NoLinesFound(f"no line reached {p.vote_floor} votes")


def classify_orientation(s: LineSegment, tol_deg: float = 10.0) -> str:
    a = math.degrees(segment_angle(s))
    if a <= tol_deg or a >= 180.0 - tol_deg:
        return HORIZONTAL
    if abs(a - 90.0) <= tol_deg:
        return VERTICAL
    return OTHER


def _angle_gap_deg(a: LineSegment, b: LineSegment) -> float:
    d = abs(math.degrees(segment_angle(a) - segment_angle(b))) % 180.0
    return min(d, 180.0 - d)


def merge_lines(segs, dist_px: float = 10.0, ang_deg: float = 0.2) -> list[LineSegment]:
    """Collapse groups of nearly coincident segments to their longest member.

    Two segments are linked when each midpoint lies within ``dist_px`` of the
    other's supporting line and their orientations differ by less than
    ``ang_deg``; groups are the transitive closure of that relation.
    """
    segs = list(segs)
    n = len(segs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            a, b = segs[i], segs[j]
            if _angle_gap_deg(a, b) >= ang_deg:
                continue
            if max(a.distance_to_point(b.midpoint), b.distance_to_point(a.midpoint)) >= dist_px:
                continue
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for root in sorted(groups):
        members = groups[root]
        best = max(members, key=lambda i: (segs[i].length, -i))
        out.append(segs[best])
    return out


def assign_lines(segs, frame_height: float, n_segments: int, margin: float | None = None,
                 frame_width: float | None = None) -> list[SegmentLines]:
    """Distribute lines among ``n_segments`` vertically stacked bands.

    A horizontal line joins every band with an edge within ``margin`` of it
    (bars between openings are shared), or else the band holding its
    midpoint.  A vertical line joins every band it
    overlaps for at least half the band height, or else the band holding its
    midpoint.  Other orientations are dropped.
    """
    if n_segments < 1:
        raise ValueError("n_segments must be >= 1")
    band_h = frame_height / n_segments
    if margin is None:
        margin = band_h / 4.0
    bands = [
        SegmentLines(i, band_top=i * band_h, band_bottom=(i + 1) * band_h,
                     center_x=None if frame_width is None else (frame_width - 1) / 2.0)
        for i in range(n_segments)
    ]
    for s in segs:
        kind = classify_orientation(s)
        if kind == HORIZONTAL:
            y = s.midpoint[1]
            hits = [b for b in bands if abs(y - b.band_top) <= margin or abs(y - b.band_bottom) <= margin]
            if not hits:
                hits = [bands[min(n_segments - 1, max(0, int(y // band_h)))]]
            for b in hits:
                b.horizontals.append(s)
        elif kind == VERTICAL:
            lo, hi = sorted((s.p0[1], s.p1[1]))
            hits = [b for b in bands if min(hi, b.band_bottom) - max(lo, b.band_top) >= 0.5 * band_h]
            if not hits:
                k = min(n_segments - 1, max(0, int(s.midpoint[1] // band_h)))
                hits = [bands[k]]
            for b in hits:
                b.verticals.append(s)
    return bands


def _y_at(s: LineSegment, x: float) -> float:
    (x0, y0), (x1, y1) = s.p0, s.p1
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0)


def _x_at(s: LineSegment, y: float) -> float:
    (x0, y0), (x1, y1) = s.p0, s.p1
    return x0 + (y - y0) * (x1 - x0) / (y1 - y0)


def inner_quad(sl: SegmentLines) -> SegmentPolygon:
    """Quadrilateral bounded by the innermost horizontal and vertical lines.

    Innermost means nearest the band centre from above/below (horizontals)
    and from left/right (verticals).  Vertices run top-left, top-right,
    bottom-right, bottom-left: positive signed area, counterclockwise in
    x/y terms.
    """
    if len(sl.horizontals) < 2 or len(sl.verticals) < 2:
        raise InsufficientLines(
            f"segment {sl.segment_index}: {len(sl.horizontals)} horizontal and "
            f"{len(sl.verticals)} vertical lines, need 2 of each"
        )
    if sl.band_top is not None and sl.band_bottom is not None:
        cy = (sl.band_top + sl.band_bottom) / 2.0
    else:
        cy = float(np.mean([s.midpoint[1] for s in sl.horizontals]))
    cx = sl.center_x if sl.center_x is not None else float(np.mean([s.midpoint[0] for s in sl.verticals]))

    hy = [(_y_at(s, cx), s) for s in sl.horizontals]
    vx = [(_x_at(s, cy), s) for s in sl.verticals]
    above = [t for t in hy if t[0] < cy]
    below = [t for t in hy if t[0] > cy]
    left = [t for t in vx if t[0] < cx]
    right = [t for t in vx if t[0] > cx]
    if not (above and below and left and right):
        raise InsufficientLines(f"segment {sl.segment_index}: no inner line on some side of the opening")
    top = max(above, key=lambda t: t[0])[1]
    bottom = min(below, key=lambda t: t[0])[1]
    lft = max(left, key=lambda t: t[0])[1]
    rgt = min(right, key=lambda t: t[0])[1]
    corners = [intersect_lines(top, lft), intersect_lines(top, rgt), intersect_lines(bottom, rgt), intersect_lines(bottom, lft)]
    if any(c is None for c in corners):
        raise ParallelInnerLines(f"segment {sl.segment_index}: inner lines do not intersect")
    return SegmentPolygon(sl.segment_index, np.array(corners, dtype=np.float64))


def segment_masks(quads, w: int, h: int) -> list[np.ndarray]:
    return [rasterize_polygon(q.quad, w, h) for q in quads]


def count_openings(frame_mask, min_run: float | None = None, coverage: float = 0.5) -> int:
    """Number of stacked openings in a rectified frame mask.

    Rows where the frame covers at least ``coverage`` of the central half
    of the width are bar rows; openings are the runs of other rows that
    lie between two bar runs and are at least ``min_run`` rows tall.
    """
    m = check_mask(frame_mask, "frame_mask") > 0
    h, w = m.shape
    if min_run is None:
        min_run = max(5.0, 0.02 * h)
    cols = slice(w // 4, max(w // 4 + 1, (3 * w) // 4))
    bar = m[:, cols].mean(axis=1) >= coverage
    rows = np.flatnonzero(bar)
    if rows.size == 0:
        return 0
    inner = ~bar[rows[0]: rows[-1] + 1]
    # run lengths of open rows strictly between the first and last bar rows
    edges = np.diff(np.concatenate([[0], inner.astype(np.int8), [0]]))
    starts, stops = np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)
    return int(np.count_nonzero(stops - starts >= min_run))


def _off_border(s: LineSegment, w: int, h: int, border: float) -> bool:
    kind = classify_orientation(s)
    if kind == HORIZONTAL:
        y = s.midpoint[1]
        return border <= y <= h - 1 - border
    if kind == VERTICAL:
        x = s.midpoint[0]
        return border <= x <= w - 1 - border
    return False


def detect_segment_quads(edges, n_segments: int, p: HoughParams = HoughParams(), extend_factor: float = 5.0,
                         merge_dist: float = 10.0, merge_ang: float = 0.2, border: float = 2.0):
    """Hough lines -> per-band inner quadrilaterals.

    The vote threshold keeps dropping while some band still lacks its inner
    lines, not only while no line at all is found.  Lines are assigned to bands
    before merging so collinear pieces of the side bars are kept per band.
    Lines within ``border`` pixels of the image edge are the frame's outer
    outline after rectification and are ignored.

    Returns ``(quads, bands, segments)``.
    """
    mask = check_mask(edges, "edges")
    h, w = mask.shape
    last_error: Exception | None = None
    any_lines = False
    for threshold in p.thresholds():
        try:
            segs = hough_lines(mask, replace(p, vote_start=threshold, vote_floor=threshold))
        except NoLinesFound as exc:
            last_error = exc
            continue
        any_lines = True
        inner = [s for s in segs if _off_border(s, w, h, border)]
        bands = assign_lines(inner, h, n_segments, frame_width=w)
        for b in bands:
            b.horizontals = [extend_segment(s, extend_factor) for s in merge_lines(b.horizontals, merge_dist, merge_ang)]
            b.verticals = [extend_segment(s, extend_factor) for s in merge_lines(b.verticals, merge_dist, merge_ang)]
        try:
            quads = [inner_quad(b) for b in bands]
        except InsufficientLines as exc:
            last_error = exc
            continue
        return quads, bands, segs
    if not any_lines:
        raise NoLinesFound(f"no frame lines found down to {p.vote_floor} votes")
    raise last_error

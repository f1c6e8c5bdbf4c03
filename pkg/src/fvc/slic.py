"""SLIC superpixels: grid-seeded k-means in [L, a, b, x, y] with windowed search."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numba import njit
from scipy import ndimage
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .raster import rgb_to_lab


class ClusterCenter(NamedTuple):
    l: float
    a: float
    b: float
    x: float
    y: float


@dataclass(frozen=True)
class SlicParams:
    k: int = 300
    m: float = 10.0
    max_iters: int = 10
    residual_eps: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.m > 0:
            raise ValueError(f"compactness m must be > 0, got {self.m}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class SuperpixelLabeling:
    """Per-pixel labels in ``[0, n_labels)`` and one [L, a, b, x, y] row per label."""

    labels: np.ndarray
    n_labels: int
    centers: np.ndarray
    interval: float
    energy: list[float] = field(default_factory=list)
    n_iter: int = 0

    def center(self, i: int) -> ClusterCenter:
        return ClusterCenter(*map(float, self.centers[i]))


def grid_interval(n_pixels: int, k: int) -> float:
    if k < 1 or k > n_pixels:
        raise ValueError(f"need 1 <= k <= n_pixels, got k={k}, n_pixels={n_pixels}")
    return math.sqrt(n_pixels / k)


def gradient_map(lab) -> np.ndarray:
    """Squared central differences of the Lab vector, borders clamped."""
    lab = np.asarray(lab, dtype=np.float64)
    p = np.pad(lab, ((1, 1), (1, 1), (0, 0)), mode="edge")
    dx = p[1:-1, 2:] - p[1:-1, :-2]
    dy = p[2:, 1:-1] - p[:-2, 1:-1]
    return (dx**2).sum(axis=-1) + (dy**2).sum(axis=-1)


def gradient(lab, x: int, y: int) -> float:
    lab = np.asarray(lab, dtype=np.float64)
    h, w = lab.shape[:2]

    def px(xx, yy):
        return lab[min(max(yy, 0), h - 1), min(max(xx, 0), w - 1)]

    gx = px(x + 1, y) - px(x - 1, y)
    gy = px(x, y + 1) - px(x, y - 1)
    return float(gx @ gx + gy @ gy)


def init_centers(lab, k: int) -> np.ndarray:
    """Seed centers on the S-spaced grid, each moved to its 3x3 gradient minimum.

    Returns an ``(n, 5)`` array of [L, a, b, x, y] rows.  Ties keep the grid
    position, otherwise the first minimum in row-major order wins.
    """
    lab = np.asarray(lab, dtype=np.float64)
    h, w = lab.shape[:2]
    s = grid_interval(h * w, k)
    nx = max(1, int(round(w / s)))
    ny = max(1, int(round(h / s)))
    xs = np.floor((np.arange(nx) + 0.5) * w / nx).astype(int)
    ys = np.floor((np.arange(ny) + 0.5) * h / ny).astype(int)
    grad = gradient_map(lab)
    rows = []
    for y in ys:
        for x in xs:
            bx, by = x, y
            best = grad[y, x]
            for yy in range(max(0, y - 1), min(h, y + 2)):
                for xx in range(max(0, x - 1), min(w, x + 2)):
                    if grad[yy, xx] < best:
                        best, bx, by = grad[yy, xx], xx, yy
            rows.append([*lab[by, bx], bx, by])
    return np.array(rows, dtype=np.float64)


def slic_distance(c, pixel, m: float, s: float) -> float:
    """D_lab + (m / S) * D_xy between a center and a pixel, both [l, a, b, x, y]."""
    if not s > 0:
        raise ValueError("grid interval must be positive")
    c = np.asarray(c, dtype=np.float64)
    p = np.asarray(pixel, dtype=np.float64)
    d_lab = math.sqrt(float(((c[:3] - p[:3]) ** 2).sum()))
    d_xy = math.sqrt(float(((c[3:] - p[3:]) ** 2).sum()))
    return d_lab + (m / s) * d_xy


@njit(cache=True, inline="always")
def _pixel_dist(lab, y, x, c, ratio):
    d_lab = math.sqrt((lab[y, x, 0] - c[0]) ** 2 + (lab[y, x, 1] - c[1]) ** 2 + (lab[y, x, 2] - c[2]) ** 2)
    return d_lab + ratio * math.sqrt((x - c[3]) ** 2 + (y - c[4]) ** 2)


@njit(cache=True)
def _assign_windows(lab, centers, ratio, s, labels, dist):
    h, w = labels.shape
    for i in range(centers.shape[0]):
        c = centers[i]
        x0 = max(0, math.ceil(c[3] - s))
        x1 = min(w, math.floor(c[3] + s) + 1)
        y0 = max(0, math.ceil(c[4] - s))
        y1 = min(h, math.floor(c[4] + s) + 1)
        for y in range(y0, y1):
            for x in range(x0, x1):
                d = _pixel_dist(lab, y, x, c, ratio)
                if d < dist[y, x]:
                    dist[y, x] = d
                    labels[y, x] = i


@njit(cache=True)
def _region_sums(lab, labels, n):
    h, w = labels.shape
    sums = np.zeros((n, 5))
    counts = np.zeros(n)
    for y in range(h):
        for x in range(w):
            k = labels[y, x]
            sums[k, 0] += lab[y, x, 0]
            sums[k, 1] += lab[y, x, 1]
            sums[k, 2] += lab[y, x, 2]
            sums[k, 3] += x
            sums[k, 4] += y
            counts[k] += 1.0
    return sums, counts


def _assign(lab, centers, ratio, s):
    """One assignment pass; returns (labels, per-pixel distance)."""
    h, w = lab.shape[:2]
    dist = np.full((h, w), np.inf)
    labels = np.zeros((h, w), dtype=np.int64)
    _assign_windows(lab, centers, ratio, s, labels, dist)
    orphan = ~np.isfinite(dist)
    if orphan.any():
        # pixels outside every window go to their nearest center over all centers
        ys, xs = np.nonzero(orphan)
        pix = np.column_stack([lab[ys, xs], xs, ys])
        d_lab = np.sqrt(((pix[:, None, :3] - centers[None, :, :3]) ** 2).sum(-1))
        d_xy = np.sqrt(((pix[:, None, 3:] - centers[None, :, 3:]) ** 2).sum(-1))
        d = d_lab + ratio * d_xy
        best = d.argmin(axis=1)
        labels[ys, xs] = best
        dist[ys, xs] = d[np.arange(len(best)), best]
    return labels, dist


def _region_means(lab, labels, n):
    return _region_sums(np.ascontiguousarray(lab, dtype=np.float64), np.ascontiguousarray(labels, dtype=np.int64), n)


def segment(lab, params: SlicParams = SlicParams()) -> SuperpixelLabeling:
    """Cluster a Lab image into superpixels.

    Iterates assignment (each pixel to the nearest center whose 2S x 2S window
    covers it; lowest index wins ties) and mean update until no center moves by
    ``residual_eps`` pixels or more, ``max_iters`` is reached, or an
    assignment would raise the summed pixel-to-center distance (that
    assignment is discarded).  Then enforces 4-connectivity.  ``energy``
    records the summed distance of each kept assignment and never increases.
    """
    lab = np.ascontiguousarray(lab, dtype=np.float64)
    h, w = lab.shape[:2]
    k = min(params.k, h * w)
    s = grid_interval(h * w, k)
    ratio = params.m / s
    centers = init_centers(lab, k)
    labels = None
    energy = []
    n_iter = 0
    for it in range(1, params.max_iters + 1):
        new_labels, dist = _assign(lab, centers, ratio, s)
        e = float(dist.sum())
        if energy and e > energy[-1]:
            break
        labels = new_labels
        energy.append(e)
        n_iter = it
        sums, counts = _region_means(lab, labels, len(centers))
        moved = centers.copy()
        nz = counts > 0
        moved[nz] = sums[nz] / counts[nz, None]
        shift = float(np.hypot(*(moved[:, 3:] - centers[:, 3:]).T).max())
        centers = moved
        if shift < params.residual_eps:
            break
    raw = SuperpixelLabeling(labels, len(centers), centers, s, energy, n_iter)
    return enforce_connectivity(raw, lab)


def enforce_connectivity(labeling: SuperpixelLabeling, lab=None, min_size: float | None = None) -> SuperpixelLabeling:
    """Make every label 4-connected and compact the label range.

    Each 4-connected piece becomes its own region; pieces smaller than
    ``min_size`` (default S^2 / 4) are merged into an adjacent region: the one
    closest in mean Lab colour when ``lab`` is given, else the largest one.
    Labels are renumbered in raster order of first appearance.  Centers are
    recomputed from ``lab`` when given.
    """
    labels = np.asarray(labeling.labels)
    h, w = labels.shape
    if min_size is None:
        min_size = labeling.interval**2 / 4.0

    comp = np.zeros((h, w), dtype=np.int64)
    n_comp = 0
    for lab_idx, sl in enumerate(ndimage.find_objects(labels + 1)):
        if sl is None:
            continue
        sub = labels[sl] == lab_idx
        pieces, n = ndimage.label(sub)
        comp[sl][sub] = pieces[sub] + n_comp - 1
        n_comp += n
    sizes = np.bincount(comp.ravel(), minlength=n_comp)
    colors = None
    if lab is not None:
        lab = np.asarray(lab, dtype=np.float64)
        colors = np.stack(
            [np.bincount(comp.ravel(), weights=lab[..., c].ravel(), minlength=n_comp) for c in range(3)], axis=1
        ) / sizes[:, None]

    pairs = np.concatenate(
        [
            np.stack([comp[:, :-1].ravel(), comp[:, 1:].ravel()], axis=1),
            np.stack([comp[:-1, :].ravel(), comp[1:, :].ravel()], axis=1),
        ]
    )
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    pairs = np.unique(np.sort(pairs, axis=1), axis=0)
    adj: dict[int, set[int]] = {}
    for a, b in pairs.tolist():
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)

    parent = np.arange(n_comp)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    _, first_idx = np.unique(comp.ravel(), return_index=True)
    order = np.argsort(first_idx, kind="stable")
    for c in order.tolist():
        r = find(c)
        if sizes[r] >= min_size:
            continue
        nbrs = {find(b) for b in adj.get(r, ())} - {r}
        if not nbrs:
            continue
        if colors is None:
            target = min(nbrs, key=lambda t: (-sizes[t], t))
        else:
            target = min(nbrs, key=lambda t: (float(((colors[t] - colors[r]) ** 2).sum()), -sizes[t], t))
            colors[target] = (colors[target] * sizes[target] + colors[r] * sizes[r]) / (sizes[target] + sizes[r])
        parent[r] = target
        sizes[target] += sizes[r]
        adj.setdefault(target, set()).update(adj.pop(r, set()))
        adj[target].discard(target)
        adj[target].discard(r)

    roots = np.array([find(i) for i in range(n_comp)])
    merged = roots[comp]
    _, first, inverse = np.unique(merged.ravel(), return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    final = rank[inverse].reshape(h, w)
    n = len(first)

    if lab is not None:
        sums, counts = _region_means(lab, final, n)
        centers = sums / counts[:, None]
    else:
        centers = np.full((n, 5), np.nan)
        ys, xs = np.mgrid[0:h, 0:w]
        counts = np.bincount(final.ravel(), minlength=n)
        centers[:, 3] = np.bincount(final.ravel(), weights=xs.ravel(), minlength=n) / counts
        centers[:, 4] = np.bincount(final.ravel(), weights=ys.ravel(), minlength=n) / counts
    return SuperpixelLabeling(final, n, centers, labeling.interval, list(labeling.energy), labeling.n_iter)


class SlicSegmenter(ClusterMixin, BaseEstimator):
    """Estimator wrapper: ``fit`` an RGB image, read ``labels_``.

    Parameters mirror :class:`SlicParams`.
    """

    def __init__(self, n_segments=300, compactness=10.0, max_iter=10, tol=1.0):
        self.n_segments = n_segments
        self.compactness = compactness
        self.max_iter = max_iter
        self.tol = tol

    def _params(self) -> SlicParams:
        return SlicParams(self.n_segments, self.compactness, self.max_iter, self.tol)

    def fit(self, X, y=None):
        lab = rgb_to_lab(X)
        result = segment(lab, self._params())
        self.labeling_ = result
        self.labels_ = result.labels
        self.cluster_centers_ = result.centers
        self.n_labels_ = result.n_labels
        self.n_iter_ = result.n_iter
        self.energy_ = result.energy
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_

    def mean_colors(self, X) -> np.ndarray:
        """Per-label mean RGB of ``X`` under the fitted labels."""
        check_is_fitted(self)
        from .vegetation import mean_superpixel_color

        return mean_superpixel_color(X, self.labeling_)

"""Synthetic quadrat photographs with exact vegetation ground truth.

A scene is painted in an upright layout (frame centred, openings stacked
top to bottom), pixel counts are taken there, then the whole picture is
warped by the pose homography.

JSON scene document (all keys optional)::

    {
      "name": "scene_000",
      "width": 1024, "height": 768,
      "n_segments": 2, "bar_width": 14,
      "frame_color": [200, 220, 245], "background": [110, 80, 50],
      "noise": 8, "seed": 0, "layout_seed": 0,
      "rotation_deg": 10.0, "keystone": [0.0, 0.0], "pose": null,
      "vegetation": [
        {"fraction": 0.3},
        {"polygons": [[[0, 0], [0.5, 0], [0.5, 1], [0, 1]]]}
      ]
    }

``polygons`` are given in opening-relative coordinates (0..1 across the
opening).  ``pose`` (a 3x3 matrix) overrides ``rotation_deg``/``keystone``.
A spec file holds either one scene object or ``{"scenes": [...]}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import apply_homography, rasterize_polygon, warp_perspective
from .measure import FrameSpec

OPENING_ASPECT = 19.75 / 6.75
MAX_TILT_DEG = 15.0

GREENS = ((50, 130, 45), (40, 105, 35), (70, 150, 50), (55, 140, 60))


@dataclass
class VegetationSpec:
    fraction: float | None = None
    polygons: list | None = None
    n_blobs: int | None = None

    def __post_init__(self):
        if self.fraction is not None and not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"vegetation fraction must lie in [0, 1], got {self.fraction}")


@dataclass
class SceneSpec:
    name: str = "scene"
    width: int = 1024
    height: int = 768
    n_segments: int = 1
    bar_width: int = 14
    frame_color: tuple = (200, 220, 245)
    background: tuple = (110, 80, 50)
    noise: int = 8
    seed: int = 0
    layout_seed: int = 0
    rotation_deg: float = 0.0
    keystone: tuple = (0.0, 0.0)
    pose: list | None = None
    vegetation: list = field(default_factory=list)

    def __post_init__(self):
        if self.bar_width < 3:
            raise ValueError("bar_width must be >= 3")
        if self.n_segments < 1:
            raise ValueError("n_segments must be >= 1")
        self.vegetation = [v if isinstance(v, VegetationSpec) else VegetationSpec(**v) for v in self.vegetation]
        if len(self.vegetation) > self.n_segments:
            raise ValueError("more vegetation entries than segments")

    @classmethod
    def from_dict(cls, d: dict) -> "SceneSpec":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown scene keys: {sorted(unknown)}")
        d = dict(d)
        for key in ("frame_color", "background", "keystone"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass
class SegmentTruth:
    segment_index: int
    opening_pixels: int
    vegetation_pixels: int
    fraction: float
    quad: np.ndarray  # opening corners after the pose, TL, TR, BR, BL


@dataclass
class GroundTruth:
    segments: list[SegmentTruth]
    pose: np.ndarray
    frame_mask: np.ndarray  # painted frame pixels, upright layout
    opening_masks: list[np.ndarray]
    vegetation_mask: np.ndarray

    @property
    def percents(self) -> list[float]:
        return [100.0 * s.fraction for s in self.segments]


@dataclass(frozen=True)
class Layout:
    x0: int
    y0: int
    opening_w: int
    opening_h: int
    bar: int
    n: int

    @property
    def outer_w(self) -> int:
        return self.opening_w + 2 * self.bar

    @property
    def outer_h(self) -> int:
        return self.n * self.opening_h + (self.n + 1) * self.bar

    def opening(self, i: int) -> tuple[int, int, int, int]:
        """Pixel box ``(x, y, w, h)`` of opening ``i``."""
        return (self.x0 + self.bar, self.y0 + self.bar + i * (self.opening_h + self.bar), self.opening_w, self.opening_h)


def layout(width: int, height: int, n_segments: int, bar: int, fill: float = 0.9) -> Layout:
    """Largest centred frame whose bounding box still fits when tilted 15 degrees."""
    c, s = math.cos(math.radians(MAX_TILT_DEG)), math.sin(math.radians(MAX_TILT_DEG))
    # outer_w = a*oh + 2b, outer_h = n*oh + (n+1)b
    a, n = OPENING_ASPECT, n_segments
    lim_w = (fill * width - c * 2 * bar - s * (n + 1) * bar) / (c * a + s * n)
    lim_h = (fill * height - s * 2 * bar - c * (n + 1) * bar) / (s * a + c * n)
    oh = int(math.floor(min(lim_w, lim_h)))
    if oh < 8:
        raise ValueError("image too small for the requested frame")
    ow = int(round(a * oh))
    lay = Layout(0, 0, ow, oh, bar, n)
    return Layout((width - lay.outer_w) // 2, (height - lay.outer_h) // 2, ow, oh, bar, n)


def pose_matrix(spec: SceneSpec) -> np.ndarray:
    """Rotation about the image centre followed by a mild keystone."""
    if spec.pose is not None:
        h = np.asarray(spec.pose, dtype=np.float64)
        return h / h[2, 2]
    cx, cy = (spec.width - 1) / 2.0, (spec.height - 1) / 2.0
    t = math.radians(spec.rotation_deg)
    to_c = np.array([[1, 0, -cx], [0, 1, -cy], [0, 0, 1.0]])
    back = np.array([[1, 0, cx], [0, 1, cy], [0, 0, 1.0]])
    rot = np.array([[math.cos(t), -math.sin(t), 0], [math.sin(t), math.cos(t), 0], [0, 0, 1.0]])
    kx, ky = spec.keystone
    persp = np.array([[1, 0, 0], [0, 1, 0], [kx, ky, 1.0]])
    h = back @ persp @ rot @ to_c
    return h / h[2, 2]


def _blob(rng, cx, cy, rx, ry, n_vertices=28) -> np.ndarray:
    phi = np.linspace(0, 2 * np.pi, n_vertices, endpoint=False)
    wobble = np.ones_like(phi)
    for k in (2, 3, 5):
        wobble += rng.uniform(0.0, 0.12) * np.cos(k * phi + rng.uniform(0, 2 * np.pi))
    return np.column_stack([cx + rx * wobble * np.cos(phi), cy + ry * wobble * np.sin(phi)])


def _fraction_polygons(rng, ow: int, oh: int, fraction: float, n_blobs: int | None):
    """Blob polygons (opening pixel coords) covering ~``fraction`` of the opening."""
    if fraction <= 0:
        return [], []
    if n_blobs is None:
        n_blobs = 1 if fraction < 0.15 else int(rng.integers(1, 4))
    shapes = []
    for _ in range(n_blobs):
        cx = rng.uniform(0.2, 0.8) * ow
        cy = rng.uniform(0.3, 0.7) * oh
        stretch = rng.uniform(1.0, 2.0)
        shapes.append((rng, cx, cy, stretch, rng.integers(0, 2**31)))
    colors = [GREENS[int(rng.integers(0, len(GREENS)))] for _ in range(n_blobs)]
    area = ow * oh

    def polys(scale):
        out = []
        for _, cx, cy, stretch, sub in shapes:
            r = np.random.default_rng(int(sub))
            out.append(_blob(r, cx, cy, scale * stretch, scale))
        return out

    def covered(scale):
        m = np.zeros((oh, ow), dtype=bool)
        for p in polys(scale):
            m |= rasterize_polygon(p, ow, oh, check=False) > 0
        return m.sum() / area

    lo, hi = 0.0, 2.0 * math.hypot(ow, oh)
    for _ in range(40):
        mid = (lo + hi) / 2
        if covered(mid) < fraction:
            lo = mid
        else:
            hi = mid
    return polys(hi), colors


def render(spec: SceneSpec):
    """Paint a scene; returns ``(rgb_image, GroundTruth)``."""
    w, h = spec.width, spec.height
    lay = layout(w, h, spec.n_segments, spec.bar_width)
    canvas = np.empty((h, w, 3), dtype=np.int64)
    canvas[:] = spec.background

    frame = np.zeros((h, w), dtype=bool)
    frame[lay.y0 : lay.y0 + lay.outer_h, lay.x0 : lay.x0 + lay.outer_w] = True
    openings = []
    veg_total = np.zeros((h, w), dtype=bool)
    layout_rng = np.random.default_rng(spec.layout_seed)
    entries = list(spec.vegetation) + [VegetationSpec(fraction=0.0)] * (spec.n_segments - len(spec.vegetation))
    counts = []
    for i, veg in enumerate(entries):
        ox, oy, ow, oh = lay.opening(i)
        om = np.zeros((h, w), dtype=bool)
        om[oy : oy + oh, ox : ox + ow] = True
        frame &= ~om
        openings.append(om)
        if veg.polygons is not None:
            polys = [np.asarray(p, dtype=np.float64) * (ow, oh) - 0.5 for p in veg.polygons]
            colors = [GREENS[int(layout_rng.integers(0, len(GREENS)))] for _ in polys]
        else:
            polys, colors = _fraction_polygons(layout_rng, ow, oh, veg.fraction or 0.0, veg.n_blobs)
        seg_veg = np.zeros((h, w), dtype=bool)
        for poly, color in zip(polys, colors):
            local = rasterize_polygon(poly, ow, oh, check=False) > 0
            m = np.zeros((h, w), dtype=bool)
            m[oy : oy + oh, ox : ox + ow] = local
            canvas[m] = color
            seg_veg |= m
        veg_total |= seg_veg
        counts.append((int(om.sum()), int(seg_veg.sum())))
    canvas[frame] = spec.frame_color

    if spec.noise > 0:
        noise_rng = np.random.default_rng(spec.seed)
        canvas += noise_rng.integers(-spec.noise, spec.noise + 1, size=canvas.shape)
    upright = np.clip(canvas, 0, 255).astype(np.uint8)

    pose = pose_matrix(spec)
    image = upright if np.allclose(pose, np.eye(3)) else warp_perspective(upright, pose, w, h)

    segments = []
    for i, (n_open, n_veg) in enumerate(counts):
        ox, oy, ow, oh = lay.opening(i)
        corners = np.array([(ox - 0.5, oy - 0.5), (ox + ow - 0.5, oy - 0.5), (ox + ow - 0.5, oy + oh - 0.5), (ox - 0.5, oy + oh - 0.5)])
        segments.append(SegmentTruth(i, n_open, n_veg, n_veg / n_open, apply_homography(pose, corners)))
    return image, GroundTruth(segments, pose, frame, openings, veg_total)


def frame_spec_for(spec: SceneSpec) -> FrameSpec:
    return FrameSpec(n_segments=spec.n_segments)


def acceptance_suite(n_scenes: int = 50, seed: int = 2024, width: int = 1024, height: int = 768) -> list[SceneSpec]:
    """Seeded family of scenes: 1-5 segments, fractions in [0, 0.9], tilt up to 15 degrees."""
    rng = np.random.default_rng(seed)
    scenes = []
    for i in range(n_scenes):
        n = int(rng.integers(1, 6))
        veg = [{"fraction": float(np.round(rng.uniform(0.0, 0.9), 3))} for _ in range(n)]
        scenes.append(
            SceneSpec(
                name=f"scene_{i:03d}",
                width=width,
                height=height,
                n_segments=n,
                bar_width=int(rng.integers(12, 19)),
                seed=int(rng.integers(0, 2**31)),
                layout_seed=int(rng.integers(0, 2**31)),
                rotation_deg=float(np.round(rng.uniform(-MAX_TILT_DEG, MAX_TILT_DEG), 3)),
                keystone=(float(np.round(rng.uniform(-2e-5, 2e-5), 8)), float(np.round(rng.uniform(-2e-5, 2e-5), 8))),
                vegetation=veg,
            )
        )
    return scenes

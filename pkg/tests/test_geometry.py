import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fvc.errors import DegenerateConfiguration, DegenerateRect
from fvc.geometry import (
    LineSegment,
    apply_homography,
    convex_hull,
    extend_segment,
    intersect_lines,
    min_area_rect,
    polygon_area,
    polygon_perimeter,
    rasterize_polygon,
    segment_angle,
    solve_homography,
    warp_perspective,
)


def point_in_polygon(x, y, poly):
    inside = False
    n = len(poly)
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        if (y1 > y) != (y2 > y) and x < x1 + (y - y1) * (x2 - x1) / (y2 - y1):
            inside = not inside
    return inside


def sweep_min_rect_area(points):
    """Minimum bounding-box area over every hull-edge orientation."""
    hull = convex_hull(points)
    best = math.inf
    for a, b in zip(hull, np.roll(hull, -1, axis=0)):
        u = (b - a) / np.linalg.norm(b - a)
        v = np.array([-u[1], u[0]])
        pu, pv = points @ u, points @ v
        best = min(best, (pu.max() - pu.min()) * (pv.max() - pv.min()))
    return best


# ---------------------------------------------------------------- homography


def test_homography_identity_and_translation():
    src = np.array([(0, 0), (10, 0), (10, 5), (0, 5)], float)
    np.testing.assert_allclose(solve_homography(src, src), np.eye(3), atol=1e-9)
    h = solve_homography(src, src + (10, 0))
    np.testing.assert_allclose(h, [[1, 0, 10], [0, 1, 0], [0, 0, 1]], atol=1e-9)


def test_homography_square_to_quad():
    src = np.array([(0, 0), (1, 0), (1, 1), (0, 1)], float)
    dst = np.array([(3, 2), (11, 1), (12, 9), (2, 7)], float)
    h = solve_homography(src, dst)
    assert h[2, 2] == 1.0
    np.testing.assert_allclose(apply_homography(h, src), dst, atol=1e-9)


def test_homography_rejects_collinear():
    src = np.array([(0, 0), (1, 1), (2, 2), (0, 5)], float)
    with pytest.raises(DegenerateConfiguration):
        solve_homography(src, src)


def test_homography_round_trip_random(rng):
    for _ in range(50):
        src = rng.uniform(0, 100, (4, 2))
        dst = rng.uniform(0, 100, (4, 2))
        try:
            h = solve_homography(src, dst)
        except DegenerateConfiguration:
            continue
        np.testing.assert_allclose(apply_homography(h, src), dst, atol=1e-6)


# ---------------------------------------------------------------- warp


def test_warp_identity(rng):
    img = rng.integers(0, 256, (12, 15, 3), dtype=np.uint8)
    assert np.array_equal(warp_perspective(img, np.eye(3), 15, 12), img)


def test_warp_rotation_matches_index_permutation(rng):
    n = 16
    img = rng.integers(0, 256, (n, n, 3), dtype=np.uint8)
    # (x, y) -> (n-1-y, x) rotates the picture by 90 degrees
    h = np.array([[0, -1, n - 1], [1, 0, 0], [0, 0, 1]], float)
    out = warp_perspective(img, h, n, n)
    expected = np.rot90(img, k=-1)
    assert np.abs(out.astype(int) - expected.astype(int)).max() <= 1


def test_warp_out_of_bounds_is_black(rng):
    img = rng.integers(1, 256, (10, 20, 3), dtype=np.uint8)
    h = np.array([[1, 0, 20], [0, 1, 0], [0, 0, 1]], float)
    assert not warp_perspective(img, h, 20, 10).any()


def test_warp_rejects_singular():
    with pytest.raises(DegenerateConfiguration):
        warp_perspective(np.zeros((4, 4, 3), np.uint8), np.zeros((3, 3)), 4, 4)


def test_warp_forward_back_interior():
    yy, xx = np.mgrid[0:60, 0:80]
    img = np.stack([xx * 3, yy * 4, (xx + yy) * 2], -1).clip(0, 255).astype(np.uint8)
    src = np.array([(0, 0), (79, 0), (79, 59), (0, 59)], float)
    dst = np.array([(4, 3), (76, 1), (78, 57), (2, 58)], float)
    h = solve_homography(src, dst)
    back = warp_perspective(warp_perspective(img, h, 80, 60), np.linalg.inv(h), 80, 60)
    inner = (slice(10, 50), slice(10, 70))
    assert np.abs(back[inner].astype(int) - img[inner].astype(int)).max() <= 2


# ---------------------------------------------------------------- hull and rectangles


def test_hull_examples():
    tri = np.array([(0, 0), (4, 0), (0, 3)], float)
    assert len(convex_hull(tri)) == 3
    sq = np.array([(0, 0), (2, 0), (2, 2), (0, 2), (1, 1)], float)
    hull = convex_hull(sq)
    assert len(hull) == 4 and polygon_area(hull) == pytest.approx(4.0)


def test_hull_contains_cloud(rng):
    pts = rng.normal(size=(200, 2))
    hull = convex_hull(pts)
    assert polygon_area(hull) > 0  # counterclockwise
    for a, b in zip(hull, np.roll(hull, -1, axis=0)):
        cross = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
        assert np.all(cross >= -1e-12)


def test_hull_rejects_too_few():
    with pytest.raises(DegenerateConfiguration):
        convex_hull(np.array([(0, 0), (1, 1), (0, 0)], float))


def test_min_rect_axis_aligned():
    r = min_area_rect(np.array([(0, 0), (6, 0), (6, 2), (0, 2)], float))
    assert r.area == pytest.approx(12.0)
    assert r.angle == pytest.approx(0.0)
    assert r.center == pytest.approx((3.0, 1.0))


def test_min_rect_rotated_square():
    c = math.sqrt(2)
    r = min_area_rect(np.array([(0, -c), (c, 0), (0, c), (-c, 0)]))
    assert r.area == pytest.approx(4.0)
    assert r.angle == pytest.approx(math.pi / 4)


def test_min_rect_collinear_raises():
    with pytest.raises(DegenerateRect):
        min_area_rect(np.array([(0, 0), (1, 1), (2, 2), (3, 3)], float))


def test_min_rect_vs_sweep(rng):
    for _ in range(20):
        pts = rng.uniform(-50, 50, (50, 2))
        r = min_area_rect(pts)
        assert r.area == pytest.approx(sweep_min_rect_area(pts), abs=1e-6)
        # the rectangle really encloses the cloud
        u = np.array([math.cos(r.angle), math.sin(r.angle)])
        v = np.array([-u[1], u[0]])
        d = pts - r.center
        assert np.all(np.abs(d @ u) <= r.width / 2 + 1e-9)
        assert np.all(np.abs(d @ v) <= r.height / 2 + 1e-9)


def test_min_rect_rotation_invariant(rng):
    pts = rng.normal(size=(40, 2)) * (5, 2)
    a = 0.7
    rot = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
    assert min_area_rect(pts @ rot.T).area == pytest.approx(min_area_rect(pts).area, rel=1e-6)


# ---------------------------------------------------------------- lines


def test_intersect_lines_examples():
    x_axis = LineSegment((0, 0), (1, 0))
    y_axis = LineSegment((0, 0), (0, 1))
    assert intersect_lines(x_axis, y_axis) == pytest.approx((0, 0))
    assert intersect_lines(x_axis, LineSegment((0, 3), (5, 3))) is None
    p = intersect_lines(LineSegment((0, 0), (2, 2)), LineSegment((0, 2), (2, 0)))
    assert p == pytest.approx((1, 1))


def test_extend_segment_examples():
    s = LineSegment((0, 0), (2, 0))
    assert extend_segment(s, 1) == s
    e = extend_segment(s, 5)
    assert e.p0 == pytest.approx((-4, 0)) and e.p1 == pytest.approx((6, 0))
    v = extend_segment(LineSegment((3, 1), (3, 4)), 3)
    assert v.p0[0] == v.p1[0] == 3
    with pytest.raises(ValueError):
        extend_segment(s, 0.5)


@given(
    st.tuples(st.floats(-100, 100), st.floats(-100, 100)),
    st.tuples(st.floats(-100, 100), st.floats(-100, 100)),
    st.floats(1, 10),
)
def test_extend_preserves_midpoint_and_scales_length(p0, p1, f):
    if math.dist(p0, p1) < 1e-3:
        return
    s = LineSegment(p0, p1)
    e = extend_segment(s, f)
    assert e.midpoint == pytest.approx(s.midpoint, abs=1e-9)
    assert e.length == pytest.approx(f * s.length, rel=1e-9)


def test_segment_angle_examples():
    assert segment_angle(LineSegment((0, 0), (5, 0))) == pytest.approx(0)
    assert segment_angle(LineSegment((0, 0), (0, 5))) == pytest.approx(math.pi / 2)
    assert segment_angle(LineSegment((0, 0), (1, 1))) == pytest.approx(math.pi / 4)
    assert segment_angle(LineSegment((1, 1), (0, 0))) == pytest.approx(math.pi / 4)


def test_degenerate_segment():
    with pytest.raises(DegenerateConfiguration):
        LineSegment((1, 2), (1, 2))


def test_polar_form():
    pl = LineSegment((0, 5), (10, 5)).polar()
    assert pl.theta == pytest.approx(math.pi / 2) and pl.rho == pytest.approx(5)


# ---------------------------------------------------------------- rasterization


def test_rasterize_full_and_outside():
    assert rasterize_polygon([(-1, -1), (20, -1), (20, 10), (-1, 10)], 20, 10).all()
    assert not rasterize_polygon([(30, 30), (40, 30), (40, 40)], 20, 10).any()


def test_rasterize_half_square_triangle():
    w = 101
    m = rasterize_polygon([(-0.5, -0.5), (w - 0.5, -0.5), (-0.5, w - 0.5)], w, w)
    assert abs(np.count_nonzero(m) - w * w / 2) <= 0.01 * w * w / 2


def test_rasterize_matches_point_in_polygon(rng):
    for _ in range(5):
        c = rng.uniform(10, 30, 2)
        ang = np.sort(rng.uniform(0, 2 * np.pi, 7))
        rad = rng.uniform(4, 12, 7)
        poly = np.column_stack([c[0] + rad * np.cos(ang), c[1] + rad * np.sin(ang)])
        m = rasterize_polygon(poly, 40, 40)
        oracle = np.array([[point_in_polygon(x, y, poly) for x in range(40)] for y in range(40)])
        assert np.array_equal(m > 0, oracle)


def test_rasterize_perimeter_bound(rng):
    for _ in range(10):
        c = rng.uniform(40, 60, 2)
        ang = np.sort(rng.uniform(0, 2 * np.pi, 9))
        rad = rng.uniform(10, 35, 9)
        poly = np.column_stack([c[0] + rad * np.cos(ang), c[1] + rad * np.sin(ang)])
        count = np.count_nonzero(rasterize_polygon(poly, 100, 100))
        assert abs(count - abs(polygon_area(poly))) <= polygon_perimeter(poly)


def test_rasterize_rejects_self_intersection():
    with pytest.raises(DegenerateConfiguration):
        rasterize_polygon([(0, 0), (10, 10), (10, 0), (0, 10)], 12, 12)

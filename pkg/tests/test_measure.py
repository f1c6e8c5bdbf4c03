import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fvc.errors import EmptySegment
from fvc.measure import (
    SQ_IN_TO_SQ_CM,
    FrameSpec,
    braun_blanquet_class,
    cosine_similarity,
    cover_report,
    coverage_percent,
    daubenmire_class,
    metric_area,
)


def test_coverage_examples():
    seg = np.zeros((10, 10), np.uint8)
    seg[2:8, 2:8] = 255
    assert coverage_percent(seg, seg) == 100.0
    assert coverage_percent(np.zeros_like(seg), seg) == 0.0
    veg = np.zeros_like(seg)
    veg[2:5, 2:8] = 255
    assert coverage_percent(veg, seg) == 50.0
    with pytest.raises(EmptySegment):
        coverage_percent(seg, np.zeros_like(seg))


def test_coverage_ignores_outside_vegetation(rng):
    seg = np.zeros((20, 20), np.uint8)
    seg[5:15, 3:17] = 255
    veg = (rng.random((20, 20)) > 0.5).astype(np.uint8) * 255
    inside = np.where(seg > 0, veg, 0).astype(np.uint8)
    assert coverage_percent(veg, seg) == coverage_percent(inside, seg)


def test_metric_area_examples():
    assert metric_area(1000, 1000) == 133.3125
    assert metric_area(0, 1000) == 0.0
    assert metric_area(500, 1000) == 66.65625
    with pytest.raises(ValueError):
        metric_area(1, 0)
    with pytest.raises(ValueError):
        metric_area(11, 10)


def test_metric_area_linear():
    assert metric_area(300, 900) + metric_area(600, 900) == pytest.approx(metric_area(900, 900))


@pytest.mark.parametrize(
    "p, cls",
    [(0, 1), (3, 1), (4.9, 1), (5, 2), (24.9, 2), (25, 3), (49.9, 3), (50, 4), (74.9, 4), (75, 5), (94.9, 5), (95, 6),
     (96, 6), (100, 6)],
)
def test_daubenmire(p, cls):
    assert daubenmire_class(p) == cls


@pytest.mark.parametrize("p, cls", [(3, 1), (5, 2), (25, 3), (50, 4), (80, 5), (100, 5)])
def test_braun_blanquet(p, cls):
    assert braun_blanquet_class(p) == cls


@pytest.mark.parametrize("bad", [-0.1, 100.01, float("nan")])
def test_class_out_of_range(bad):
    with pytest.raises(ValueError):
        daubenmire_class(bad)
    with pytest.raises(ValueError):
        braun_blanquet_class(bad)


@given(st.floats(0, 100), st.floats(0, 100))
def test_daubenmire_monotone(a, b):
    lo, hi = sorted((a, b))
    assert daubenmire_class(lo) <= daubenmire_class(hi)


def test_cosine_examples():
    assert cosine_similarity([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)
    assert cosine_similarity([1, 0], [0, 1]) == 0.0
    assert cosine_similarity([1, 2, 3], [4, 5, 6]) == pytest.approx(0.974631846, abs=1e-8)
    with pytest.raises(ValueError):
        cosine_similarity([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        cosine_similarity([0, 0], [1, 2])


vec = st.lists(st.floats(0.01, 100), min_size=3, max_size=3)


@given(vec, vec, st.floats(0.1, 10))
def test_cosine_scale_invariant_and_symmetric(a, b, c):
    assert cosine_similarity(np.multiply(a, c), b) == pytest.approx(cosine_similarity(a, b), abs=1e-12)
    assert cosine_similarity(a, b) == cosine_similarity(b, a)
    assert -1 <= cosine_similarity(a, b) <= 1 + 1e-12


def test_cover_report():
    seg = np.zeros((10, 10), np.uint8)
    seg[:, :8] = 255
    veg = np.zeros_like(seg)
    veg[:5] = 255
    r = cover_report(2, veg, seg, FrameSpec(n_segments=3))
    assert (r.segment_index, r.polygon_pixels, r.vegetation_pixels) == (2, 80, 40)
    assert r.percent == 50.0 and r.daubenmire_class == 4
    assert r.area_sq_in == 66.65625
    assert r.area_sq_cm == pytest.approx(66.65625 * SQ_IN_TO_SQ_CM)
    assert set(r.to_dict()) >= {"percent", "area_sq_cm", "daubenmire_class"}


def test_frame_spec_validation():
    assert FrameSpec().opening_area_sq_in == 133.3125
    with pytest.raises(ValueError):
        FrameSpec(n_segments=0)
    with pytest.raises(ValueError):
        FrameSpec(inner_width_in=-1)

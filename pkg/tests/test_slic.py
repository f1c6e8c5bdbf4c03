import numpy as np
import pytest
from scipy import ndimage

from fvc.raster import rgb_to_lab
from fvc.slic import (
    SlicParams,
    SlicSegmenter,
    SuperpixelLabeling,
    enforce_connectivity,
    gradient,
    grid_interval,
    init_centers,
    segment,
    slic_distance,
)


def random_image(seed, smooth=True):
    rng = np.random.default_rng(seed)
    h, w = rng.integers(40, 100, 2)
    img = rng.integers(0, 256, (h, w, 3)).astype(float)
    if smooth:
        img = ndimage.uniform_filter(img, (7, 7, 1))
    return img.astype(np.uint8)


def quadrants(h=80, w=80):
    img = np.zeros((h, w, 3), np.uint8)
    img[: h // 2, : w // 2] = (200, 30, 30)
    img[: h // 2, w // 2:] = (30, 200, 30)
    img[h // 2:, : w // 2] = (30, 30, 200)
    img[h // 2:, w // 2:] = (220, 220, 40)
    return img


def is_4_connected(region):
    _, n = ndimage.label(region)
    return n == 1


def test_grid_interval_examples():
    assert grid_interval(90000, 900) == 10
    assert grid_interval(50, 50) == 1
    assert grid_interval(3_000_000, 300) == 100
    with pytest.raises(ValueError):
        grid_interval(10, 11)


def test_gradient_examples():
    flat = np.full((6, 6, 3), 40.0)
    assert gradient(flat, 3, 3) == 0 and gradient(flat, 0, 0) == 0
    ramp = np.zeros((6, 8, 3))
    ramp[..., 0] = np.arange(8)[None, :]
    assert gradient(ramp, 4, 2) == pytest.approx(4.0)


def test_init_centers_uniform_stays_on_grid():
    c = init_centers(np.full((40, 40, 3), 10.0), 16)
    assert len(c) == 16
    assert set(c[:, 3]) == {5, 15, 25, 35} and set(c[:, 4]) == {5, 15, 25, 35}


def test_init_centers_single():
    c = init_centers(np.full((31, 41, 3), 10.0), 1)
    assert len(c) == 1 and abs(c[0, 3] - 20) <= 1 and abs(c[0, 4] - 15) <= 1


def test_init_centers_moves_to_pit():
    lab = np.zeros((20, 20, 3))
    lab[..., 0] = np.add.outer(np.arange(20) ** 2, np.arange(20) ** 2) * 0.01
    # one flat pit next to the single grid point at (10, 10)
    lab[10:13, 10:13, 0] = 0.0
    lab[10:13, 10:13, 0] = lab[10, 10, 0]
    lab[11, 11, 0] = lab[10, 10, 0]
    c = init_centers(lab, 1)
    from fvc.slic import gradient_map

    g = gradient_map(lab)
    x, y = int(c[0, 3]), int(c[0, 4])
    assert g[y, x] == g[9:12, 9:12].min()


def test_slic_distance_examples():
    c = (50, 1, 2, 10, 10)
    assert slic_distance(c, c, 10, 5) == 0
    assert slic_distance(c, (50, 1, 2, 13, 14), 10, 5) == pytest.approx(2 * 5)
    assert slic_distance(c, (53, 5, 2, 10, 10), 10, 5) == pytest.approx(5)
    # doubling m doubles the spatial term
    d1 = slic_distance(c, (50, 1, 2, 20, 10), 10, 5)
    d2 = slic_distance(c, (50, 1, 2, 20, 10), 20, 5)
    assert d2 == 2 * d1


def test_single_superpixel():
    lab = rgb_to_lab(random_image(3))
    res = segment(lab, SlicParams(k=1))
    assert res.n_labels == 1 and not res.labels.any()


def test_quadrant_purity():
    img = quadrants()
    res = segment(rgb_to_lab(img), SlicParams(k=4))
    truth = np.zeros(img.shape[:2], int)
    truth[:40, 40:] = 1
    truth[40:, :40] = 2
    truth[40:, 40:] = 3
    agree = 0
    for lab_id in range(res.n_labels):
        members = truth[res.labels == lab_id]
        agree += np.bincount(members).max()
    assert agree / truth.size >= 0.99


@pytest.mark.parametrize("seed", range(6))
def test_partition_and_connectivity(seed):
    img = random_image(seed, smooth=seed % 2 == 0)
    k = 30
    res = segment(rgb_to_lab(img), SlicParams(k=k))
    labels = res.labels
    assert labels.min() == 0 and labels.max() == res.n_labels - 1
    assert np.all(np.bincount(labels.ravel(), minlength=res.n_labels) > 0)
    assert 1 <= res.n_labels <= 2 * k
    assert len(res.centers) == res.n_labels
    for i in range(res.n_labels):
        assert is_4_connected(labels == i)


@pytest.mark.parametrize("seed", range(6))
def test_energy_non_increasing(seed):
    res = segment(rgb_to_lab(random_image(seed)), SlicParams(k=25, residual_eps=0.0))
    e = np.array(res.energy)
    assert 2 <= len(e) <= 10 and res.n_iter == len(e)
    assert np.all(np.diff(e) <= 1e-9 * e[:-1])


def test_deterministic():
    lab = rgb_to_lab(random_image(11))
    a, b = segment(lab), segment(lab)
    assert np.array_equal(a.labels, b.labels) and np.array_equal(a.centers, b.centers)


def test_invalid_params():
    with pytest.raises(ValueError):
        SlicParams(k=0)
    with pytest.raises(ValueError):
        SlicParams(m=0)
    with pytest.raises(ValueError):
        SlicParams(max_iters=0)


def _labeling(labels, s=4.0):
    n = int(labels.max()) + 1
    return SuperpixelLabeling(labels, n, np.zeros((n, 5)), s)


def test_connectivity_keeps_connected_labeling():
    labels = np.zeros((8, 8), int)
    labels[:, 4:] = 1
    out = enforce_connectivity(_labeling(labels, s=2.0))
    assert np.array_equal(out.labels, labels)


def test_connectivity_absorbs_orphan():
    labels = np.zeros((10, 10), int)
    labels[:, 5:] = 1
    labels[2, 2] = 1  # stray pixel of label 1 inside label 0
    out = enforce_connectivity(_labeling(labels))
    assert out.n_labels == 2 and out.labels[2, 2] == 0


def test_connectivity_compacts_labels():
    labels = np.full((6, 6), 7)
    labels[:, 3:] = 3
    out = enforce_connectivity(_labeling(labels, s=1.0))
    assert out.n_labels == 2 and set(np.unique(out.labels)) == {0, 1}
    assert out.labels[0, 0] == 0


def test_estimator_wrapper():
    img = quadrants()
    est = SlicSegmenter(n_segments=4)
    labels = est.fit_predict(img)
    assert labels.shape == img.shape[:2]
    assert est.get_params()["n_segments"] == 4
    assert est.mean_colors(img).shape == (est.n_labels_, 3)

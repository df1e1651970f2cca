import math

import numpy as np
import pytest

import geofront


def test_distance_map_matches_brute_force():
    seeds = np.zeros((9, 12), dtype=bool)
    seeds[2, 3] = True
    seeds[7, 10] = True
    d = geofront.euclidean_distance_map(seeds)
    ys, xs = np.mgrid[0:9, 0:12]
    ref = np.minimum(np.hypot(xs - 3, ys - 2), np.hypot(xs - 10, ys - 7))
    assert d.shape == (9, 12)
    assert np.allclose(d, ref, atol=1e-12)


def test_metric_is_asymmetric():
    eye = np.eye(2)
    assert geofront.eval_metric(eye, (0.0, 0.0), 1.0, (3.0, 4.0)) == pytest.approx(5.0)
    assert geofront.eval_metric(eye, (1.0, 0.0), 1.0, (-1.0, 0.0)) == pytest.approx(math.sqrt(2.0))
    assert geofront.eval_metric(eye, (1.0, 0.0), 1.0, (1.0, 0.0)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        geofront.eval_metric(np.array([[1.0, 2.0], [2.0, 1.0]]), (0.0, 0.0), 1.0, (1.0, 0.0))


def test_geodesic_distance_unit_metric():
    d = geofront.geodesic_distance([(0, 0)], 16, 16)
    assert d[0, 0] == 0.0
    assert d[0, 10] == pytest.approx(10.0)
    assert d[4, 3] == pytest.approx(5.0, rel=0.01)


def test_segment_clean_disk():
    image, gt = geofront.make_synthetic("disk", 64, 64, noise=0.0, seed=0)
    assert image.shape == (64, 64)
    assert gt.dtype == bool
    out = geofront.segment(image, circles=[(30, 30, 6)], config={"ell": 10, "symmetric_mode": False}, gt=gt)
    assert out["jaccard"] >= 0.98
    assert out["regions"] == 2
    assert geofront.jaccard(out["labels"] == 2, gt) == pytest.approx(out["jaccard"])


def test_segment_rejects_unknown_key():
    image, _ = geofront.make_synthetic("disk", 32, 32)
    with pytest.raises(ValueError, match="unknown config key"):
        geofront.segment(image, config={"bogus": 1})


def test_farthest_point_sampling():
    region = np.ones((10, 10), dtype=bool)
    pts = geofront.farthest_point_sampling(region, 3, first=(0, 0))
    assert pts[0] == (0, 0)
    assert pts[1] == (9, 9)
    assert len(pts) == 3


def test_jaccard_examples():
    a = np.zeros((4, 4), dtype=bool)
    assert geofront.jaccard(a, a) == 1.0
    b = a.copy()
    b[0, :] = True
    assert geofront.jaccard(a, b) == 0.0

import numpy as np
import pytest

import pairfeat


def test_white_square_corners():
    img = pairfeat.white_square_image(100, 20, 40, 40)
    pts = pairfeat.detect(img)
    assert len(pts) == 4
    got = sorted((x, y) for x, y, _ in pts)
    for (x, y), (vx, vy) in zip(got, [(40, 40), (40, 59), (59, 40), (59, 59)]):
        assert abs(x - vx) <= 2 and abs(y - vy) <= 2


def test_score_field_shape_and_constant_image():
    field = pairfeat.score_field(np.full((12, 9), 50.0))
    assert field.shape == (12, 9)
    assert not field.any()


def test_delaunay_four_points():
    tris, edges = pairfeat.delaunay(np.array([[0, 0], [4, 0], [0, 4], [1, 1]], dtype=float))
    assert tris.shape == (3, 3)
    assert edges.shape == (6, 2)
    assert all(3 in t for t in tris.tolist())


def test_collinear_raises_typed_error():
    with pytest.raises(pairfeat.PairfeatError) as info:
        pairfeat.delaunay(np.array([[0, 0], [1, 1], [2, 2]], dtype=float))
    assert info.value.code == "collinear points"


def test_joint_map_rows_are_endpoint_means():
    rng = np.random.default_rng(0)
    pts = np.array([[0, 0], [4, 0], [0, 4], [1, 1]], dtype=float)
    feats = rng.normal(size=(4, 16))
    rows = pairfeat.joint_map(feats, pts, "paired")
    _, edges = pairfeat.delaunay(pts)
    assert rows.shape == (4 + len(edges), 16)
    np.testing.assert_array_equal(rows[:4], feats)
    for k, (i, j) in enumerate(edges):
        np.testing.assert_allclose(rows[4 + k], (feats[i] + feats[j]) / 2, rtol=0, atol=1e-12)
    assert pairfeat.joint_map(feats, pts, "non_paired").shape == (4, 16)
    assert pairfeat.joint_map(feats, pts, "horizontal", 5).shape == (1, 80)


def test_metrics_hand_example():
    m = pairfeat.metrics(np.array([[5, 5], [0, 10]]))
    assert m["accuracy"] == 0.75
    assert m["recall"] == 0.75
    assert m["precision"] == pytest.approx(5 / 6, abs=1e-15)
    assert m["f1"] == pytest.approx(11 / 15, abs=1e-15)
    assert m["specificity"] == 0.75


def test_feature_file_round_trip(tmp_path):
    img = pairfeat.synthetic_image(2, 0)
    pts = [(x, y) for x, y, _ in pairfeat.detect(img)]
    vecs = pairfeat.describe(img, pts, 64)
    assert vecs.shape == (len(pts), 64)
    path = tmp_path / "f.pfv1"
    pairfeat.write_features(path, ["img"] * len(pts), list(range(len(pts))), np.array(pts, dtype=float), vecs)
    back = pairfeat.read_features(path)
    assert back["format"] == "PFV1"
    assert back["point_index"] == list(range(len(pts)))
    np.testing.assert_array_equal(back["vector"], vecs.astype(np.float32).astype(np.float64))


def test_cli_reports_config_errors(tmp_path):
    code, _, err = pairfeat.run_cli(["evaluate", "--config", str(tmp_path / "missing.json")])
    assert code == 2
    assert "error" in err

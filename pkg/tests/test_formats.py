import numpy as np
import pytest

from mocapkit import formats
from mocapkit.camera import WeakPerspectiveCamera
from mocapkit.errors import SchemaError
from mocapkit.integration import BodyPrediction, HandPrediction, WholeBodyParams
from mocapkit.model import ShapeParams


def test_model_round_trip(toy, tmp_path):
    path = tmp_path / "toy.json"
    formats.save_model(path, toy)
    loaded = formats.load_model(path)
    np.testing.assert_array_equal(loaded.template_vertices, toy.template_vertices)
    np.testing.assert_array_equal(loaded.faces, toy.faces)
    np.testing.assert_array_equal(loaded.shape_basis, toy.shape_basis)
    np.testing.assert_array_equal(loaded.skin_weights, toy.skin_weights)
    np.testing.assert_array_equal(loaded.joint_regressor, toy.joint_regressor)
    np.testing.assert_array_equal(loaded.tree.parents, toy.tree.parents)
    assert loaded.tree.joint_names == toy.tree.joint_names
    assert loaded.hand_joint_ids == {s: list(v) for s, v in toy.hand_joint_ids.items()}
    assert loaded.reference_knuckle_length == toy.reference_knuckle_length


def test_model_write_is_byte_stable(toy, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    formats.save_model(a, toy)
    formats.save_model(b, formats.load_model(a))
    assert a.read_bytes() == b.read_bytes()


def test_strict_mode_rejects_unknown_keys(toy, tmp_path):
    doc = formats.model_to_doc(toy)
    doc["extra_field"] = 1
    with pytest.raises(SchemaError):
        formats.model_from_doc(doc)
    # non-strict tolerates forward-compatible extras
    formats.model_from_doc(doc, strict=False)


def test_header_validation(toy):
    doc = formats.model_to_doc(toy)
    bad = dict(doc, format="something-else")
    with pytest.raises(SchemaError):
        formats.model_from_doc(bad)
    bad = dict(doc, schema_version=99)
    with pytest.raises(SchemaError):
        formats.model_from_doc(bad)
    with pytest.raises(SchemaError):
        formats.model_from_doc([1, 2, 3])


def test_pose_correctives_must_stay_null(toy):
    doc = formats.model_to_doc(toy)
    doc["pose_correctives"] = {"basis": []}
    with pytest.raises(SchemaError):
        formats.model_from_doc(doc)


def test_triplet_bounds_checked(toy):
    doc = formats.model_to_doc(toy)
    doc["skin_weights"]["triplets"].append([10 ** 6, 0, 0.5])
    with pytest.raises(SchemaError):
        formats.model_from_doc(doc)


def test_sparse_round_trip_dense_matrix(rng):
    m = rng.uniform(size=(7, 5))
    m[m < 0.5] = 0.0
    np.testing.assert_array_equal(
        formats._from_triplets(formats._triplets(m), m.shape), m)


def test_predictions_round_trip(rng):
    body = BodyPrediction(rng.normal(size=3), rng.normal(size=(21, 3)),
                          ShapeParams(rng.normal(size=10)),
                          WeakPerspectiveCamera(2.0, np.array([1.0, 2.0])))
    hand = HandPrediction("left", rng.normal(size=3), rng.normal(size=(15, 3)),
                          ShapeParams(rng.normal(size=10)),
                          WeakPerspectiveCamera(3.0, np.zeros(2)))
    doc = formats.predictions_to_doc([(0, body, hand, None)])
    [(i, b2, l2, r2)] = formats.predictions_from_doc(doc)
    assert i == 0 and r2 is None
    np.testing.assert_array_equal(b2.theta_b, body.theta_b)
    np.testing.assert_array_equal(l2.phi_h, hand.phi_h)
    assert l2.side == "left"


def test_predictions_require_body(rng):
    body = BodyPrediction(np.zeros(3), np.zeros((21, 3)), ShapeParams.zeros(10),
                          WeakPerspectiveCamera.identity())
    doc = formats.predictions_to_doc([(0, body, None, None)])
    doc["frames"][0]["body"] = None
    with pytest.raises(SchemaError):
        formats.predictions_from_doc(doc)


def test_frame_indices_must_increase(rng):
    doc = formats.keypoints_to_doc([(1, np.zeros((3, 2)), None), (1, np.zeros((3, 2)), None)])
    with pytest.raises(SchemaError):
        formats.keypoints_from_doc(doc)
    doc = formats.keypoints_to_doc([(2, np.zeros((3, 2)), None), (0, np.zeros((3, 2)), None)])
    with pytest.raises(SchemaError):
        formats.keypoints_from_doc(doc)


def test_keypoints_round_trip(rng):
    pts = rng.normal(size=(21, 3))
    conf = rng.uniform(size=21)
    doc = formats.keypoints_to_doc([(0, pts, conf), (3, pts + 1, None)])
    out = formats.keypoints_from_doc(doc)
    assert [i for i, _, _ in out] == [0, 3]
    np.testing.assert_array_equal(out[0][1], pts)
    np.testing.assert_array_equal(out[0][2], conf)
    assert out[1][2] is None


def test_keypoints_shape_validation():
    doc = formats.keypoints_to_doc([(0, np.zeros((3, 2)), None)])
    doc["frames"][0]["points"] = [[1.0, 2.0, 3.0, 4.0]]
    with pytest.raises(SchemaError):
        formats.keypoints_from_doc(doc)
    doc = formats.keypoints_to_doc([(0, np.zeros((3, 2)), np.ones(2))])
    with pytest.raises(SchemaError):
        formats.keypoints_from_doc(doc)


def test_params_round_trip(rng):
    params = WholeBodyParams(rng.normal(size=3), rng.normal(size=(51, 3)),
                             ShapeParams(rng.normal(size=10)),
                             WeakPerspectiveCamera(5.0, np.array([0.5, -0.5])))
    extras = {"cost_trace": np.array([3.0, 2.0, 1.0]), "final_rms_px": 0.25}
    doc = formats.params_to_doc([(7, params, extras)])
    [(i, p2, e2)] = formats.params_from_doc(doc)
    assert i == 7
    np.testing.assert_array_equal(p2.theta_w, params.theta_w)
    np.testing.assert_array_equal(e2["cost_trace"], extras["cost_trace"])
    assert e2["final_rms_px"] == 0.25


def test_joints_round_trip(rng):
    joints = rng.normal(size=(52, 3))
    doc = formats.joints_to_doc([(0, joints)])
    [(i, j2)] = formats.joints_from_doc(doc)
    assert i == 0
    np.testing.assert_array_equal(j2, joints)


def test_asset_dir_resolution(toy, tmp_path, monkeypatch):
    formats.save_model(tmp_path / "toy.json", toy)
    monkeypatch.setenv(formats.ASSET_DIR_ENV, str(tmp_path))
    monkeypatch.chdir(tmp_path / "..")
    loaded = formats.load_model("toy.json")
    assert loaded.num_vertices == toy.num_vertices


def test_write_obj(tmp_path):
    path = tmp_path / "mesh.obj"
    formats.write_obj(path, np.array([[0.0, 0.5, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
                      np.array([[0, 1, 2]]))
    lines = path.read_text().splitlines()
    assert lines[0] == "v 0.0 0.5 1.0"
    assert lines[-1] == "f 1 2 3"


def test_canonical_dumps_sorted_keys():
    text = formats.canonical_dumps({"b": 1, "a": 2})
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")

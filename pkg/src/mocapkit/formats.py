"""JSON file formats: model assets, predictions, keypoints, parameters, joints.

All files are schema-versioned JSON with sorted keys, so write→read→write
round trips are byte-identical (Python's float repr is shortest-round-trip).
Sparse matrices are stored as (row, col, value) triplets.
"""

import json
import os

import numpy as np

from .camera import WeakPerspectiveCamera
from .errors import SchemaError
from .fitting import KeypointSet2D
from .integration import BodyPrediction, HandPrediction, WholeBodyParams
from .kinematics import SkeletonTree
from .model import ParametricModel, ShapeParams

SCHEMA_VERSION = 1
ASSET_DIR_ENV = "MOCAPKIT_ASSET_DIR"

MODEL_FORMAT = "mocapkit-model"
PREDICTIONS_FORMAT = "mocapkit-predictions"
KEYPOINTS_FORMAT = "mocapkit-keypoints"
PARAMS_FORMAT = "mocapkit-params"
JOINTS_FORMAT = "mocapkit-joints"


def canonical_dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def write_json(path, doc):
    with open(path, "w", encoding="utf-8") as f:
        f.write(canonical_dumps(doc))


def read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def resolve_asset_path(path):
    """Return `path`, or its location under $MOCAPKIT_ASSET_DIR if not found here."""
    if os.path.exists(path) or os.path.isabs(path):
        return path
    asset_dir = os.environ.get(ASSET_DIR_ENV)
    if asset_dir:
        candidate = os.path.join(asset_dir, path)
        if os.path.exists(candidate):
            return candidate
    return path


def _check_header(doc, expected_format, strict, known_keys):
    if not isinstance(doc, dict):
        raise SchemaError("document root must be an object")
    if doc.get("format") != expected_format:
        raise SchemaError(f"expected format {expected_format!r}, got {doc.get('format')!r}")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc.get('schema_version')!r}")
    if strict:
        unknown = set(doc) - set(known_keys) - {"format", "schema_version"}
        if unknown:
            raise SchemaError(f"unknown fields under strict mode: {sorted(unknown)}")


def _triplets(matrix):
    rows, cols = np.nonzero(matrix)
    return [[int(r), int(c), float(matrix[r, c])] for r, c in zip(rows, cols)]


def _from_triplets(triplets, shape):
    m = np.zeros(shape)
    for r, c, v in triplets:
        if not (0 <= r < shape[0] and 0 <= c < shape[1]):
            raise SchemaError(f"triplet index ({r}, {c}) out of range for {shape}")
        m[r, c] = v
    return m


def _floats(arr):
    return np.asarray(arr, dtype=np.float64).tolist()


# ---------------------------------------------------------------------------
# Model asset

_MODEL_KEYS = (
    "vertices", "faces", "shape_basis", "skin_weights", "joint_regressor",
    "parents", "joint_names", "fingertip_vertex_ids", "hand_joint_ids",
    "reference_knuckle_length", "pose_correctives",
)


def model_to_doc(model):
    n = model.num_vertices
    j = model.num_joints
    return {
        "format": MODEL_FORMAT,
        "schema_version": SCHEMA_VERSION,
        "vertices": _floats(model.template_vertices),
        "faces": model.faces.tolist(),
        "shape_basis": _floats(model.shape_basis),
        "skin_weights": {"shape": [n, j], "triplets": _triplets(model.skin_weights)},
        "joint_regressor": {
            "shape": [model.joint_regressor.shape[0], n],
            "triplets": _triplets(model.joint_regressor),
        },
        "parents": model.tree.parents.tolist(),
        "joint_names": list(model.tree.joint_names),
        "fingertip_vertex_ids": {s: list(map(int, v)) for s, v in model.fingertip_vertex_ids.items()},
        "hand_joint_ids": {s: list(map(int, v)) for s, v in model.hand_joint_ids.items()},
        "reference_knuckle_length": float(model.reference_knuckle_length),
        # Reserved for pose-corrective blendshapes; must stay null for now.
        "pose_correctives": None,
    }


def model_from_doc(doc, strict=True):
    _check_header(doc, MODEL_FORMAT, strict, _MODEL_KEYS)
    try:
        if doc.get("pose_correctives") is not None:
            raise SchemaError("pose_correctives are reserved and must be null")
        tree = SkeletonTree(np.asarray(doc["parents"]), tuple(doc["joint_names"]))
        vertices = np.asarray(doc["vertices"], dtype=np.float64)
        n = vertices.shape[0]
        sw = doc["skin_weights"]
        jr = doc["joint_regressor"]
        return ParametricModel(
            template_vertices=vertices,
            faces=np.asarray(doc["faces"], dtype=np.int64).reshape(-1, 3),
            shape_basis=np.asarray(doc["shape_basis"], dtype=np.float64),
            skin_weights=_from_triplets(sw["triplets"], tuple(sw["shape"])),
            joint_regressor=_from_triplets(jr["triplets"], tuple(jr["shape"])),
            tree=tree,
            fingertip_vertex_ids={s: list(v) for s, v in doc["fingertip_vertex_ids"].items()},
            hand_joint_ids={s: list(v) for s, v in doc["hand_joint_ids"].items()},
            reference_knuckle_length=float(doc["reference_knuckle_length"]),
        )
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid model asset: {e}") from e


def load_model(path, strict=True):
    return model_from_doc(read_json(resolve_asset_path(path)), strict=strict)


def save_model(path, model):
    write_json(path, model_to_doc(model))


# ---------------------------------------------------------------------------
# Cameras, shapes, frames

def _cam_to_doc(cam):
    return {"scale": float(cam.scale), "translation": _floats(cam.translation)}


def _cam_from_doc(doc):
    return WeakPerspectiveCamera(doc["scale"], np.asarray(doc["translation"], dtype=np.float64))


def _check_frames(doc):
    frames = doc.get("frames")
    if not isinstance(frames, list):
        raise SchemaError("'frames' must be a list")
    indices = [f.get("frame") for f in frames]
    if any(not isinstance(i, int) for i in indices):
        raise SchemaError("every frame record needs an integer 'frame' index")
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise SchemaError("frame indices must be strictly increasing")
    return frames


# ---------------------------------------------------------------------------
# Predictions

def _body_to_doc(body):
    return {
        "phi": _floats(body.phi_b),
        "theta": _floats(body.theta_b),
        "beta": _floats(body.beta_b.beta),
        "camera": _cam_to_doc(body.cam_b),
    }


def _body_from_doc(doc):
    return BodyPrediction(
        phi_b=np.asarray(doc["phi"], dtype=np.float64),
        theta_b=np.asarray(doc["theta"], dtype=np.float64),
        beta_b=ShapeParams(np.asarray(doc["beta"], dtype=np.float64)),
        cam_b=_cam_from_doc(doc["camera"]),
    )


def _hand_to_doc(hand):
    return {
        "side": hand.side,
        "phi": _floats(hand.phi_h),
        "theta": _floats(hand.theta_h),
        "beta": _floats(hand.beta_h.beta),
        "camera": _cam_to_doc(hand.cam_h),
    }


def _hand_from_doc(doc):
    return HandPrediction(
        side=doc["side"],
        phi_h=np.asarray(doc["phi"], dtype=np.float64),
        theta_h=np.asarray(doc["theta"], dtype=np.float64),
        beta_h=ShapeParams(np.asarray(doc["beta"], dtype=np.float64)),
        cam_h=_cam_from_doc(doc["camera"]),
    )


def predictions_to_doc(frames):
    """frames: list of (frame_index, BodyPrediction, left HandPrediction?, right?)."""
    return {
        "format": PREDICTIONS_FORMAT,
        "schema_version": SCHEMA_VERSION,
        "frames": [
            {
                "frame": int(i),
                "body": _body_to_doc(body),
                "left_hand": None if left is None else _hand_to_doc(left),
                "right_hand": None if right is None else _hand_to_doc(right),
            }
            for i, body, left, right in frames
        ],
    }


def predictions_from_doc(doc, strict=True):
    _check_header(doc, PREDICTIONS_FORMAT, strict, ("frames",))
    out = []
    try:
        for f in _check_frames(doc):
            if f.get("body") is None:
                raise SchemaError(f"frame {f['frame']}: body prediction is required")
            left = f.get("left_hand")
            right = f.get("right_hand")
            out.append((
                f["frame"],
                _body_from_doc(f["body"]),
                None if left is None else _hand_from_doc(left),
                None if right is None else _hand_from_doc(right),
            ))
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid predictions file: {e}") from e
    return out


# ---------------------------------------------------------------------------
# Keypoints (2D or 3D points per frame)

def keypoints_to_doc(frames):
    """frames: list of (frame_index, points (K,2|3), confidence (K,) or None)."""
    return {
        "format": KEYPOINTS_FORMAT,
        "schema_version": SCHEMA_VERSION,
        "frames": [
            {
                "frame": int(i),
                "points": _floats(points),
                "confidence": None if conf is None else _floats(conf),
            }
            for i, points, conf in frames
        ],
    }


def keypoints_from_doc(doc, strict=True):
    _check_header(doc, KEYPOINTS_FORMAT, strict, ("frames",))
    out = []
    try:
        for f in _check_frames(doc):
            points = np.asarray(f["points"], dtype=np.float64)
            if points.ndim != 2 or points.shape[1] not in (2, 3):
                raise SchemaError(f"frame {f['frame']}: points must be (K, 2) or (K, 3)")
            conf = f.get("confidence")
            conf = None if conf is None else np.asarray(conf, dtype=np.float64)
            if conf is not None and conf.shape != (points.shape[0],):
                raise SchemaError(f"frame {f['frame']}: confidence length mismatch")
            out.append((f["frame"], points, conf))
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid keypoints file: {e}") from e
    return out


def keypoint_set(points, conf):
    if conf is None:
        conf = np.ones(points.shape[0])
    return KeypointSet2D(points, conf)


# ---------------------------------------------------------------------------
# Whole-body parameters

def params_to_doc(frames):
    """frames: list of (frame_index, WholeBodyParams, extras dict or None).

    extras may carry 'cost_trace' and 'final_rms_px' from a fit.
    """
    out = []
    for item in frames:
        i, params, extras = item
        rec = {
            "frame": int(i),
            "phi": _floats(params.phi_w),
            "theta": _floats(params.theta_w),
            "beta": _floats(params.beta_w.beta),
            "camera": _cam_to_doc(params.cam_w),
            "cost_trace": None,
            "final_rms_px": None,
        }
        if extras:
            if "cost_trace" in extras:
                rec["cost_trace"] = _floats(extras["cost_trace"])
            if "final_rms_px" in extras:
                rec["final_rms_px"] = float(extras["final_rms_px"])
        out.append(rec)
    return {"format": PARAMS_FORMAT, "schema_version": SCHEMA_VERSION, "frames": out}


def params_from_doc(doc, strict=True):
    _check_header(doc, PARAMS_FORMAT, strict, ("frames",))
    out = []
    try:
        for f in _check_frames(doc):
            params = WholeBodyParams(
                phi_w=np.asarray(f["phi"], dtype=np.float64),
                theta_w=np.asarray(f["theta"], dtype=np.float64),
                beta_w=ShapeParams(np.asarray(f["beta"], dtype=np.float64)),
                cam_w=_cam_from_doc(f["camera"]),
            )
            extras = {}
            if f.get("cost_trace") is not None:
                extras["cost_trace"] = np.asarray(f["cost_trace"], dtype=np.float64)
            if f.get("final_rms_px") is not None:
                extras["final_rms_px"] = float(f["final_rms_px"])
            out.append((f["frame"], params, extras))
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid params file: {e}") from e
    return out


# ---------------------------------------------------------------------------
# Joints (3D joint locations per frame, e.g. cmd_pose output / cmd_eval input)

def joints_to_doc(frames):
    return {
        "format": JOINTS_FORMAT,
        "schema_version": SCHEMA_VERSION,
        "frames": [{"frame": int(i), "joints": _floats(j)} for i, j in frames],
    }


def joints_from_doc(doc, strict=True):
    _check_header(doc, JOINTS_FORMAT, strict, ("frames",))
    out = []
    try:
        for f in _check_frames(doc):
            joints = np.asarray(f["joints"], dtype=np.float64)
            if joints.ndim != 2 or joints.shape[1] not in (2, 3):
                raise SchemaError(f"frame {f['frame']}: joints must be (K, 2) or (K, 3)")
            out.append((f["frame"], joints))
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"invalid joints file: {e}") from e
    return out


# ---------------------------------------------------------------------------
# OBJ export

def write_obj(path, vertices, faces):
    with open(path, "w", encoding="utf-8") as f:
        for v in np.asarray(vertices, dtype=np.float64):
            f.write(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        for face in np.asarray(faces, dtype=np.int64):
            f.write(f"f {face[0] + 1} {face[1] + 1} {face[2] + 1}\n")

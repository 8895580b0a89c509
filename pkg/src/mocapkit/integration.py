"""Copy-and-paste fusion of body and hand predictions, and body-driven hand boxes."""

import logging
from dataclasses import dataclass, replace

import numpy as np

from .camera import WeakPerspectiveCamera, project
from .errors import DimensionError, MocapkitError
from .kinematics import forward_kinematics, gamma_global_to_local
from .model import PoseParams, ShapeParams, pose_mesh
from .rotations import rodrigues

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PoseLayout:
    """Row bookkeeping for the (J-1, 3) whole-body pose block.

    Row i drives skeleton joint i + 1.  Body rows include the two wrists;
    finger rows are ordered as in the asset's hand_joint_ids.
    """

    body_rows: np.ndarray            # 21 rows, ascending, wrists included
    left_wrist_row: int
    right_wrist_row: int
    left_finger_rows: np.ndarray     # 15 rows
    right_finger_rows: np.ndarray    # 15 rows

    @staticmethod
    def from_model(model):
        num_posed = model.num_joints - 1
        left = model.hand_joint_ids.get("left")
        right = model.hand_joint_ids.get("right")
        if left is None or right is None:
            raise DimensionError("model must declare hand_joint_ids for both sides")
        lf = np.asarray(left[1:], dtype=np.int64) - 1
        rf = np.asarray(right[1:], dtype=np.int64) - 1
        finger = set(lf.tolist()) | set(rf.tolist())
        body = np.asarray([r for r in range(num_posed) if r not in finger], dtype=np.int64)
        return PoseLayout(
            body_rows=body,
            left_wrist_row=int(left[0]) - 1,
            right_wrist_row=int(right[0]) - 1,
            left_finger_rows=lf,
            right_finger_rows=rf,
        )

    def wrist_row(self, side):
        return self.left_wrist_row if side == "left" else self.right_wrist_row

    def finger_rows(self, side):
        return self.left_finger_rows if side == "left" else self.right_finger_rows


@dataclass(frozen=True)
class BodyPrediction:
    phi_b: np.ndarray          # (3,)
    theta_b: np.ndarray        # (21, 3), wrists included, body-row order
    beta_b: ShapeParams
    cam_b: WeakPerspectiveCamera

    def __post_init__(self):
        object.__setattr__(self, "phi_b", np.asarray(self.phi_b, dtype=np.float64))
        object.__setattr__(self, "theta_b", np.asarray(self.theta_b, dtype=np.float64))
        if self.phi_b.shape != (3,) or self.theta_b.shape != (21, 3):
            raise DimensionError("body prediction must have phi (3,) and theta (21, 3)")


@dataclass(frozen=True)
class HandPrediction:
    side: str
    phi_h: np.ndarray          # (3,) global hand orientation
    theta_h: np.ndarray        # (15, 3) finger poses
    beta_h: ShapeParams
    cam_h: WeakPerspectiveCamera

    def __post_init__(self):
        object.__setattr__(self, "phi_h", np.asarray(self.phi_h, dtype=np.float64))
        object.__setattr__(self, "theta_h", np.asarray(self.theta_h, dtype=np.float64))
        if self.side not in ("left", "right"):
            raise DimensionError("side must be 'left' or 'right'")
        if self.phi_h.shape != (3,) or self.theta_h.shape != (15, 3):
            raise DimensionError("hand prediction must have phi (3,) and theta (15, 3)")


@dataclass(frozen=True)
class WholeBodyParams:
    phi_w: np.ndarray          # (3,)
    theta_w: np.ndarray        # (J-1, 3)
    beta_w: ShapeParams
    cam_w: WeakPerspectiveCamera

    def __post_init__(self):
        object.__setattr__(self, "phi_w", np.asarray(self.phi_w, dtype=np.float64))
        object.__setattr__(self, "theta_w", np.asarray(self.theta_w, dtype=np.float64))
        if self.phi_w.shape != (3,):
            raise DimensionError("phi_w must be a 3-vector")
        if self.theta_w.ndim != 2 or self.theta_w.shape[1] != 3:
            raise DimensionError("theta_w must be (J-1, 3)")

    def pose(self):
        return PoseParams(self.phi_w, self.theta_w)

    @staticmethod
    def identity(model):
        return WholeBodyParams(
            np.zeros(3),
            np.zeros((model.num_joints - 1, 3)),
            ShapeParams.zeros(model.num_betas),
            WeakPerspectiveCamera.identity(),
        )


def copy_paste(model, body, left=None, right=None):
    """Fuse body and hand predictions into whole-body parameters.

    Global orientation, shape, and camera come from the body.  Finger angles
    come from each present hand; each present hand's wrist angle is recovered
    so its FK world rotation matches the hand's global orientation.  For an
    absent hand, the body's wrist angle is kept and the fingers are zeroed.
    """
    layout = PoseLayout.from_model(model)
    for pred, side in ((left, "left"), (right, "right")):
        if pred is not None and pred.side != side:
            raise MocapkitError(f"prediction passed as {side} hand has side {pred.side!r}")

    theta = np.zeros((model.num_joints - 1, 3))
    theta[layout.body_rows] = body.theta_b
    rest = model.rest_joints(body.beta_b)
    body_local = np.vstack([np.zeros((1, 3)), theta])

    for pred in (left, right):
        if pred is None:
            continue
        side = pred.side
        theta[layout.finger_rows(side)] = pred.theta_h
        wrist_joint = int(layout.wrist_row(side)) + 1
        theta[layout.wrist_row(side)] = gamma_global_to_local(
            model.tree, rest, body.phi_b, body_local, wrist_joint, rodrigues(pred.phi_h)
        )
        if np.linalg.norm(pred.beta_h.beta) > 0:
            log.debug(
                "discarding %s-hand shape (|beta_h| = %.4g); whole-body shape is the body's",
                side, np.linalg.norm(pred.beta_h.beta),
            )
    return WholeBodyParams(body.phi_b.copy(), theta, body.beta_b, body.cam_b)


def hand_bbox_from_body(model, params, cam, side, margin_ratio=0.2):
    """Square 2D box around the projected hand joints of the posed body.

    Returns (center_x, center_y, side_px); degenerate projections yield a
    1-px minimum box.
    """
    if side not in model.hand_joint_ids:
        raise DimensionError(f"model has no hand_joint_ids for side {side!r}")
    verts = pose_mesh(model, params.pose(), params.beta_w)
    joints = model.joint_regressor[: model.num_joints] @ verts
    pts = project(cam, joints[np.asarray(model.hand_joint_ids[side], dtype=np.int64)])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    center = (lo + hi) / 2.0
    extent = float((hi - lo).max())
    side_px = max(extent * (1.0 + margin_ratio), 1.0)
    return float(center[0]), float(center[1]), side_px

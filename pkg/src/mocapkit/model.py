"""Parametric mesh model: shape blendshapes, joint regression, skinning, hand cropping."""

from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import DegenerateModelError, DimensionError
from .kinematics import SkeletonTree, forward_kinematics

SIDES = ("left", "right")


@dataclass(frozen=True)
class ParametricModel:
    """Template mesh + blendshapes + skinning weights + joint regressor + skeleton.

    skin_weights rows and joint_regressor rows are affine combinations (sum to 1).
    The first `num_joints` regressor rows correspond to the skeleton joints in
    order; any extra rows (e.g. fingertips on hand submodels) follow.
    """

    template_vertices: np.ndarray          # (N, 3)
    faces: np.ndarray                      # (F, 3) int
    shape_basis: np.ndarray                # (N, 3, B)
    skin_weights: np.ndarray               # (N, J)
    joint_regressor: np.ndarray            # (J_reg, N)
    tree: SkeletonTree
    fingertip_vertex_ids: dict = field(default_factory=dict)   # side -> 5 vertex ids
    hand_joint_ids: dict = field(default_factory=dict)         # side -> 16 joint ids (wrist first)
    reference_knuckle_length: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.template_vertices, dtype=np.float64)
        object.__setattr__(self, "template_vertices", v)
        object.__setattr__(self, "faces", np.asarray(self.faces, dtype=np.int64))
        object.__setattr__(self, "shape_basis", np.asarray(self.shape_basis, dtype=np.float64))
        w = np.ascontiguousarray(self.skin_weights, dtype=np.float64)
        object.__setattr__(self, "skin_weights", w)
        reg = np.asarray(self.joint_regressor, dtype=np.float64)
        object.__setattr__(self, "joint_regressor", reg)
        self.validate()

    def validate(self):
        n = self.template_vertices.shape[0]
        j = self.tree.num_joints
        if self.template_vertices.ndim != 2 or self.template_vertices.shape[1] != 3:
            raise DimensionError("template_vertices must be (N, 3)")
        if self.shape_basis.shape[:2] != (n, 3):
            raise DimensionError("shape_basis must be (N, 3, B)")
        if self.skin_weights.shape != (n, j):
            raise DimensionError("skin_weights must be (N, J)")
        if self.joint_regressor.shape[0] < j or self.joint_regressor.shape[1] != n:
            raise DimensionError("joint_regressor must be (J_reg >= J, N)")
        if np.any(self.skin_weights < -1e-12):
            raise DimensionError("skin_weights must be nonnegative")
        if np.abs(self.skin_weights.sum(axis=1) - 1.0).max() > 1e-6:
            raise DimensionError("skin_weights rows must sum to 1")
        if np.abs(self.joint_regressor.sum(axis=1) - 1.0).max() > 1e-6:
            raise DimensionError("joint_regressor rows must sum to 1")
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= n):
            raise DimensionError("face indices out of range")
        for side, ids in self.hand_joint_ids.items():
            if any(i < 0 or i >= j for i in ids):
                raise DimensionError(f"hand_joint_ids[{side}] out of range")
        for side, ids in self.fingertip_vertex_ids.items():
            if any(i < 0 or i >= n for i in ids):
                raise DimensionError(f"fingertip_vertex_ids[{side}] out of range")

    @property
    def num_vertices(self):
        return self.template_vertices.shape[0]

    @property
    def num_joints(self):
        return self.tree.num_joints

    @property
    def num_betas(self):
        return self.shape_basis.shape[2]

    def rest_joints(self, beta=None):
        """Skeleton joint rest positions regressed from the shaped template."""
        verts = shape_template(self, beta) if beta is not None else self.template_vertices
        return self.joint_regressor[: self.num_joints] @ verts


@dataclass(frozen=True)
class PoseParams:
    """Global orientation plus one axis-angle per posed (non-root) joint.

    joint_poses[i] belongs to skeleton joint i + 1; the root is driven by
    global_orient only.
    """

    global_orient: np.ndarray          # (3,)
    joint_poses: np.ndarray            # (J - 1, 3)

    def __post_init__(self):
        object.__setattr__(self, "global_orient", np.asarray(self.global_orient, dtype=np.float64))
        object.__setattr__(self, "joint_poses", np.asarray(self.joint_poses, dtype=np.float64))
        if self.global_orient.shape != (3,):
            raise DimensionError("global_orient must be a 3-vector")
        if self.joint_poses.ndim != 2 or self.joint_poses.shape[1] != 3:
            raise DimensionError("joint_poses must be (J-1, 3)")

    @staticmethod
    def zeros(num_joints):
        return PoseParams(np.zeros(3), np.zeros((num_joints - 1, 3)))

    def full_local_poses(self):
        """Per-joint local poses including the (zero) root slot, for FK."""
        return np.vstack([np.zeros((1, 3)), self.joint_poses])


@dataclass(frozen=True)
class ShapeParams:
    beta: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64)
        object.__setattr__(self, "beta", beta)
        if beta.ndim != 1 or not np.all(np.isfinite(beta)):
            raise DimensionError("beta must be a finite 1-D vector")

    @staticmethod
    def zeros(b=10):
        return ShapeParams(np.zeros(b))


@dataclass(frozen=True)
class HandSubmodel:
    """A ParametricModel restricted to one hand, re-rooted at the wrist."""

    model: ParametricModel
    side: str
    vertex_index_map: np.ndarray       # submodel vertex -> parent-model vertex
    joint_index_map: np.ndarray        # submodel joint -> parent-model joint


def shape_template(model, beta):
    """Template vertices displaced by the linear shape basis."""
    if beta is None:
        return model.template_vertices.copy()
    beta = beta.beta if isinstance(beta, ShapeParams) else np.asarray(beta, dtype=np.float64)
    if beta.shape != (model.num_betas,):
        raise DimensionError(f"beta must have length {model.num_betas}")
    return model.template_vertices + model.shape_basis @ beta


def regress_joints(regressor, vertices):
    regressor = np.asarray(regressor, dtype=np.float64)
    vertices = np.asarray(vertices, dtype=np.float64)
    if regressor.shape[1] != vertices.shape[0]:
        raise DimensionError("regressor columns must match vertex count")
    return regressor @ vertices


def pose_mesh(model, pose, beta=None, return_fk=False):
    """Pose the model: shape, regress rest joints, FK, linear blend skinning."""
    if pose.joint_poses.shape[0] != model.num_joints - 1:
        raise DimensionError("pose has wrong number of joints for this model")
    shaped = shape_template(model, beta)
    rest = model.joint_regressor[: model.num_joints] @ shaped
    fk = forward_kinematics(model.tree, rest, pose.global_orient, pose.full_local_poses())
    verts = _kernels.lbs(model.skin_weights, np.ascontiguousarray(shaped), fk.rotations, fk.translations)
    if return_fk:
        return verts, fk
    return verts


def pose_joints(model, pose, beta=None):
    """Posed joint locations from the full regressor (skeleton + extra rows)."""
    return model.joint_regressor @ pose_mesh(model, pose, beta)


def nearest_joint_assignment(vertices, joints):
    """Index of the closest joint per vertex; ties go to the lower joint index."""
    d2 = ((vertices[:, None, :] - joints[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def extract_hand_submodel(model, side):
    """Crop the hand: vertices whose nearest rest joint is the wrist or a finger joint.

    The submodel skeleton is re-rooted at the wrist; its global-orientation
    slot plays the role of the stand-alone hand orientation.  The 21-row hand
    regressor is the wrist + 15 finger rows restricted to the cropped
    vertices, plus 5 one-hot fingertip rows.
    """
    if side not in model.hand_joint_ids:
        raise DegenerateModelError(f"model has no hand_joint_ids for side {side!r}")
    hand_joints = list(model.hand_joint_ids[side])
    rest = model.rest_joints()
    assignment = nearest_joint_assignment(model.template_vertices, rest)
    selected = np.where(np.isin(assignment, hand_joints))[0]
    if selected.size == 0:
        raise DegenerateModelError(f"no vertices assigned to {side} hand joints")

    old_to_new_vertex = -np.ones(model.num_vertices, dtype=np.int64)
    old_to_new_vertex[selected] = np.arange(selected.size)

    # Faces entirely inside the crop, remapped.
    if model.faces.size:
        keep = np.all(np.isin(model.faces, selected), axis=1)
        faces = old_to_new_vertex[model.faces[keep]]
    else:
        faces = np.zeros((0, 3), dtype=np.int64)

    joint_map = np.asarray(hand_joints, dtype=np.int64)
    old_to_new_joint = {int(j): i for i, j in enumerate(joint_map)}
    parents = np.empty(len(hand_joints), dtype=np.int64)
    parents[0] = -1
    for i, j in enumerate(hand_joints[1:], start=1):
        p = int(model.tree.parents[j])
        parents[i] = old_to_new_joint.get(p, 0)
    names = tuple(model.tree.joint_names[j] for j in hand_joints)
    tree = SkeletonTree(parents, names)

    weights = model.skin_weights[np.ix_(selected, joint_map)]
    row_sums = weights.sum(axis=1)
    if np.any(row_sums <= 1e-12):
        raise DegenerateModelError("cropped vertex has no skinning weight on hand joints")
    weights = weights / row_sums[:, None]

    skel_rows = model.joint_regressor[joint_map][:, selected]
    skel_sums = skel_rows.sum(axis=1)
    if np.any(skel_sums <= 1e-12):
        raise DegenerateModelError("hand joint regressor row unsupported on cropped vertices")
    skel_rows = skel_rows / skel_sums[:, None]

    tips = model.fingertip_vertex_ids.get(side, [])
    tip_rows = np.zeros((len(tips), selected.size))
    tip_ids_new = []
    for r, vid in enumerate(tips):
        nv = old_to_new_vertex[vid]
        if nv < 0:
            raise DegenerateModelError(f"fingertip vertex {vid} not inside the {side} crop")
        tip_rows[r, nv] = 1.0
        tip_ids_new.append(int(nv))
    regressor = np.vstack([skel_rows, tip_rows])

    sub = ParametricModel(
        template_vertices=model.template_vertices[selected],
        faces=faces,
        shape_basis=model.shape_basis[selected],
        skin_weights=weights,
        joint_regressor=regressor,
        tree=tree,
        fingertip_vertex_ids={side: tip_ids_new},
        hand_joint_ids={side: list(range(len(hand_joints)))},
        reference_knuckle_length=model.reference_knuckle_length,
    )
    return HandSubmodel(sub, side, selected, joint_map)


def regress_hand_joints(hand, posed_vertices):
    """21 hand joints (wrist, 15 fingers, 5 tips) from posed submodel vertices."""
    return regress_joints(hand.model.joint_regressor, posed_vertices)

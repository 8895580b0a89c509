"""Skeleton trees, forward kinematics, and global-to-local rotation transfer."""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels, rotations
from .errors import DimensionError, InvalidJointError


@dataclass(frozen=True)
class SkeletonTree:
    """A rooted joint hierarchy in topological order (parents[j] < j, root at 0)."""

    parents: np.ndarray
    joint_names: tuple

    def __post_init__(self):
        parents = np.asarray(self.parents, dtype=np.int64)
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "joint_names", tuple(self.joint_names))
        n = parents.shape[0]
        if n == 0:
            raise DimensionError("skeleton must have at least one joint")
        if len(self.joint_names) != n:
            raise DimensionError("joint_names length must match parents length")
        if parents[0] != -1:
            raise InvalidJointError("joint 0 must be the root (parent -1)")
        for j in range(1, n):
            if not (0 <= parents[j] < j):
                raise InvalidJointError(
                    f"joint {j} has parent {parents[j]}; expected 0 <= parent < {j}"
                )

    @property
    def num_joints(self):
        return self.parents.shape[0]

    def index_of(self, name):
        return self.joint_names.index(name)


@dataclass(frozen=True)
class RigidTransform:
    """Affine map x -> rotation @ x + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def apply(self, points):
        points = np.asarray(points, dtype=np.float64)
        return points @ self.rotation.T + self.translation

    def compose(self, other):
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self):
        rt = self.rotation.T
        return RigidTransform(rt, -rt @ self.translation)

    @staticmethod
    def identity():
        return RigidTransform(np.eye(3), np.zeros(3))


@dataclass(frozen=True)
class FkResult:
    """World transforms per joint: G_j(x) = rotations[j] @ x + translations[j]."""

    rotations: np.ndarray
    translations: np.ndarray
    joint_positions: np.ndarray = field(default=None)

    def transform(self, j):
        return RigidTransform(self.rotations[j], self.translations[j])


def forward_kinematics(tree, rest_joints, global_orient, local_poses):
    """Compute world transforms for every joint.

    Each joint's local transform rotates by its axis-angle pose about the
    joint's rest position; the root is additionally rotated by
    `global_orient`.  With all rotations zero, joint positions equal
    `rest_joints`.
    """
    rest = np.ascontiguousarray(rest_joints, dtype=np.float64)
    poses = np.ascontiguousarray(local_poses, dtype=np.float64)
    J = tree.num_joints
    if rest.shape != (J, 3):
        raise DimensionError(f"rest_joints must be ({J}, 3), got {rest.shape}")
    if poses.shape != (J, 3):
        raise DimensionError(f"local_poses must be ({J}, 3), got {poses.shape}")
    local_rots = _kernels.rodrigues_batch(poses)
    root_rot = rotations.rodrigues(np.asarray(global_orient, dtype=np.float64))
    world_rots, world_trans = _kernels.fk_chain(tree.parents, rest, local_rots, root_rot)
    positions = np.einsum("jab,jb->ja", world_rots, rest) + world_trans
    return FkResult(world_rots, world_trans, positions)


def gamma_global_to_local(tree, rest_joints, global_orient, local_poses, target_joint, target_global):
    """Local pose at `target_joint` whose FK world rotation equals `target_global`.

    Computed as (parent world rotation)^T @ target_global; only the target's
    ancestors influence the result, so the target's own stale pose is ignored.
    """
    if target_joint <= 0 or target_joint >= tree.num_joints:
        raise InvalidJointError("target_joint must be a non-root joint index")
    target_global = np.asarray(target_global, dtype=np.float64)
    fk = forward_kinematics(tree, rest_joints, global_orient, local_poses)
    parent = tree.parents[target_joint]
    local = fk.rotations[parent].T @ target_global
    return rotations.canonicalize(rotations.rotation_to_axis_angle(local))

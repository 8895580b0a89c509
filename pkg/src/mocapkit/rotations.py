"""Axis-angle and rotation-matrix utilities.

Axis-angle vectors encode a rotation as ``axis * angle`` (angle in radians).
The canonical form has angle in [0, pi]; at exactly pi, where the axis sign is
ambiguous, the axis whose first nonzero component is positive is chosen.
"""

import numpy as np

from . import _kernels
from .errors import InvalidRotationError

ROTATION_INPUT_TOL = 1e-6


def canonicalize(aa):
    """Return the canonical axis-angle equivalent to `aa` (angle in [0, pi])."""
    aa = np.asarray(aa, dtype=np.float64)
    angle = np.linalg.norm(aa)
    if angle < 1e-12:
        return np.zeros(3)
    axis = aa / angle
    angle = np.fmod(angle, 2.0 * np.pi)
    if angle > np.pi:
        angle = 2.0 * np.pi - angle
        axis = -axis
    if abs(angle - np.pi) < 1e-12:
        axis = _positive_leading(axis)
    return axis * angle


def _positive_leading(axis):
    for c in axis:
        if c > 1e-12:
            return axis
        if c < -1e-12:
            return -axis
    return axis


def rodrigues(aa):
    """Rotation matrix for an axis-angle vector; identity for the zero vector."""
    aa = np.asarray(aa, dtype=np.float64)
    return _kernels.rodrigues_batch(aa.reshape(1, 3))[0]


def rodrigues_batch(aa):
    """Rotation matrices (J, 3, 3) for a batch of axis-angle vectors (J, 3)."""
    aa = np.ascontiguousarray(aa, dtype=np.float64)
    return _kernels.rodrigues_batch(aa)


def is_rotation(m, tol=ROTATION_INPUT_TOL):
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3):
        return False
    if not np.all(np.isfinite(m)):
        return False
    if np.abs(m.T @ m - np.eye(3)).max() > tol:
        return False
    return abs(np.linalg.det(m) - 1.0) <= tol


def rotation_to_axis_angle(r):
    """Canonical axis-angle vector of a rotation matrix.

    Raises InvalidRotationError if `r` fails orthonormality by more than 1e-6.
    """
    r = np.asarray(r, dtype=np.float64)
    if not is_rotation(r):
        raise InvalidRotationError("matrix is not a rotation within tolerance")
    tr = np.trace(r)
    angle = np.arccos(np.clip((tr - 1.0) / 2.0, -1.0, 1.0))
    if angle < 1e-12:
        return np.zeros(3)
    skew = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    # The threshold sits above the ~sqrt(eps) resolution of arccos near -1
    # (the skew part is meaningless below it) and below where the symmetric
    # part of R picks up O(pi - angle) contamination from the skew term.
    if np.pi - angle > 1e-7:
        axis = skew / (2.0 * np.sin(angle))
        axis /= np.linalg.norm(axis)
        return axis * angle
    # Near pi the skew part vanishes; recover the axis from the symmetric part.
    B = (r + np.eye(3)) / 2.0
    k = int(np.argmax(np.diag(B)))
    axis = B[:, k] / np.sqrt(max(B[k, k], 1e-300))
    axis /= np.linalg.norm(axis)
    if np.linalg.norm(skew) > 1e-9:
        if np.dot(skew, axis) < 0.0:
            axis = -axis
    else:
        axis = _positive_leading(axis)
    return axis * angle

"""Dataset-harmonization math: rescaling, joint reordering, flipping, motion blur."""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DegenerateKeypointsError, DimensionError

# Middle-finger knuckle pair in the 21-joint hand layout
# (wrist, index1-3, middle1-3, pinky1-3, ring1-3, thumb1-3, 5 tips).
KNUCKLE_JOINTS = (4, 5)


@dataclass(frozen=True)
class JointMap:
    """Target index per source joint; -1 drops a source joint."""

    permutation: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.permutation, dtype=np.int64)
        object.__setattr__(self, "permutation", p)
        kept = p[p >= 0]
        if kept.size != np.unique(kept).size:
            raise DimensionError("joint map must be injective on kept joints")

    @property
    def num_targets(self):
        kept = self.permutation[self.permutation >= 0]
        return 0 if kept.size == 0 else int(kept.max()) + 1

    def inverse(self):
        inv = -np.ones(len(self.permutation), dtype=np.int64)
        for src, dst in enumerate(self.permutation):
            if dst >= 0:
                inv[dst] = src
        if np.any(inv < 0):
            raise DimensionError("joint map with dropped joints has no inverse")
        return JointMap(inv)


@dataclass(frozen=True)
class BlurKernel:
    """Odd-sized square kernel of nonnegative weights summing to 1."""

    k: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=np.float64)
        object.__setattr__(self, "k", k)
        if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] % 2 == 0:
            raise DimensionError("kernel must be square with odd size")
        if np.any(k < 0) or abs(k.sum() - 1.0) > 1e-9:
            raise DimensionError("kernel weights must be nonnegative and sum to 1")


def rescale_keypoints(joints3d, reference_knuckle_length, knuckle=KNUCKLE_JOINTS):
    """Uniformly scale hand joints about the wrist so the middle-finger knuckle
    bone matches the reference length."""
    joints3d = np.asarray(joints3d, dtype=np.float64)
    if joints3d.ndim != 2 or joints3d.shape[1] != 3:
        raise DimensionError("joints3d must be (K, 3)")
    a, b = knuckle
    length = np.linalg.norm(joints3d[a] - joints3d[b])
    if length < 1e-9:
        raise DegenerateKeypointsError("knuckle joints are coincident")
    scale = reference_knuckle_length / length
    wrist = joints3d[0]
    return wrist + scale * (joints3d - wrist)


def reorder_joints(joints, joint_map):
    """Place input[src] at output[joint_map.permutation[src]]."""
    joints = np.asarray(joints)
    perm = joint_map.permutation
    if joints.shape[0] != perm.shape[0]:
        raise DimensionError("joint map does not cover the input joints")
    n_out = joint_map.num_targets
    out = np.empty((n_out,) + joints.shape[1:], dtype=joints.dtype)
    filled = np.zeros(n_out, dtype=bool)
    for src, dst in enumerate(perm):
        if dst >= 0:
            out[dst] = joints[src]
            filled[dst] = True
    if not filled.all():
        raise DimensionError("joint map leaves target joints unassigned")
    return out


def flip_keypoints_2d(points, confidence, image_width):
    """Mirror 2D keypoints across the vertical image axis; confidences untouched."""
    if image_width <= 0:
        raise DimensionError("image width must be positive")
    points = np.asarray(points, dtype=np.float64)
    flipped = points.copy()
    flipped[:, 0] = image_width - flipped[:, 0]
    return flipped, np.asarray(confidence, dtype=np.float64).copy()


def flip_axis_angle(aa):
    """Mirror a rotation across the plane normal to image-x: (x, y, z) -> (x, -y, -z)."""
    aa = np.asarray(aa, dtype=np.float64)
    return aa * np.array([1.0, -1.0, -1.0])


def flip_hand_params(phi_h, theta_h):
    """Mirror a hand's global orientation and finger poses to the other side."""
    theta_h = np.asarray(theta_h, dtype=np.float64)
    return flip_axis_angle(phi_h), theta_h * np.array([1.0, -1.0, -1.0])


def motion_blur_kernel(length, angle):
    """Straight-line blur kernel: a rasterized centered segment of the given
    pixel length and orientation, normalized to unit mass."""
    if not (np.isfinite(length) and np.isfinite(angle)) or length < 1:
        raise DimensionError("length must be finite and >= 1")
    if length == 1:
        return BlurKernel(np.ones((1, 1)))
    n = 1000 * int(np.ceil(length))
    # Midpoint samples along the segment keep endpoints off cell boundaries.
    t = (np.arange(n) + 0.5) / n - 0.5
    xs = t * length * np.cos(angle)
    ys = t * length * np.sin(angle)
    ix = np.rint(xs).astype(np.int64)
    iy = np.rint(ys).astype(np.int64)
    half = int(max(np.abs(ix).max(), np.abs(iy).max()))
    size = 2 * half + 1
    k = np.zeros((size, size))
    np.add.at(k, (iy + half, ix + half), 1.0)
    return BlurKernel(k / n)


def convolve2d(image, kernel):
    """Filter an H×W or H×W×C image with reflect padding; output size unchanged."""
    image = np.asarray(image, dtype=np.float64)
    if not np.all(np.isfinite(image)):
        raise DimensionError("image must be finite")
    k = kernel.k if isinstance(kernel, BlurKernel) else np.asarray(kernel, dtype=np.float64)
    if image.ndim == 2:
        return ndimage.convolve(image, k, mode="reflect")
    if image.ndim == 3:
        return np.stack(
            [ndimage.convolve(image[:, :, c], k, mode="reflect") for c in range(image.shape[2])],
            axis=2,
        )
    raise DimensionError("image must be H×W or H×W×C")

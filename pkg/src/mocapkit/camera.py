"""Weak-perspective camera: orthographic drop of z, uniform scale, 2D shift.

Image convention: x right, y down, origin at the top-left of the crop.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True)
class WeakPerspectiveCamera:
    scale: float            # px per model unit, > 0
    translation: np.ndarray  # (2,) px

    def __post_init__(self):
        t = np.asarray(self.translation, dtype=np.float64)
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "scale", float(self.scale))
        if t.shape != (2,):
            raise DimensionError("translation must be a 2-vector")
        if not (np.isfinite(self.scale) and self.scale > 0 and np.all(np.isfinite(t))):
            raise DimensionError("camera parameters must be finite with scale > 0")

    @staticmethod
    def identity():
        return WeakPerspectiveCamera(1.0, np.zeros(2))


def project(cam, points):
    """Project (M, 3) points to (M, 2) pixels: s * (x, y) + t."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 3:
        raise DimensionError("points must be (M, 3)")
    return cam.scale * points[:, :2] + cam.translation

"""Training-loss formulas and PCK/AUC evaluation metrics."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

# 3D thresholds in mm and 2D thresholds in px used for benchmark-style AUC.
RANGE_3D_MM = (20.0, 50.0)
RANGE_2D_PX = (0.0, 30.0)
DEFAULT_NUM_THRESHOLDS = 100


@dataclass(frozen=True)
class LossWeights:
    lambda_theta: float = 10.0
    lambda_3d: float = 100.0
    lambda_2d: float = 10.0
    lambda_reg: float = 0.1

    def __post_init__(self):
        for w in (self.lambda_theta, self.lambda_3d, self.lambda_2d, self.lambda_reg):
            if not np.isfinite(w) or w < 0:
                raise DimensionError("loss weights must be finite and nonnegative")


@dataclass(frozen=True)
class PckCurve:
    thresholds: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.thresholds, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or t.shape != v.shape or t.shape[0] < 2:
            raise DimensionError("curve needs >= 2 matching thresholds and values")
        if np.any(np.diff(t) <= 0):
            raise DimensionError("thresholds must be strictly ascending")
        if np.any(v < 0) or np.any(v > 1):
            raise DimensionError("PCK values must lie in [0, 1]")


def _sq_diff(pred, gt):
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise DimensionError(f"shape mismatch: {pred.shape} vs {gt.shape}")
    d = pred - gt
    return float((d * d).sum())


def loss_theta(pred, gt):
    """Sum of squared axis-angle differences."""
    return _sq_diff(pred, gt)


def loss_3d(pred, gt):
    """Sum of squared 3D joint differences."""
    return _sq_diff(pred, gt)


def loss_2d(pred, gt, squared=True):
    """2D keypoint loss; squared by default, plain norm with squared=False."""
    if squared:
        return _sq_diff(pred, gt)
    return float(np.sqrt(_sq_diff(pred, gt)))


def loss_reg(beta):
    beta = np.asarray(beta, dtype=np.float64)
    return float((beta * beta).sum())


def overall_loss(l_theta, l_3d, l_2d, l_reg, weights=None):
    w = weights or LossWeights()
    return (w.lambda_theta * l_theta + w.lambda_3d * l_3d
            + w.lambda_2d * l_2d + w.lambda_reg * l_reg)


def _joint_errors(pred, gt, alignment):
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise DimensionError(f"shape mismatch: {pred.shape} vs {gt.shape}")
    if alignment == "root-relative":
        pred = pred - pred[0]
        gt = gt - gt[0]
    elif alignment != "none":
        raise DimensionError(f"unknown alignment mode {alignment!r}")
    return np.linalg.norm(pred - gt, axis=-1).ravel()


def pck(pred, gt, threshold, alignment="none"):
    """Fraction of joints with Euclidean error strictly below the threshold."""
    if threshold <= 0:
        raise DimensionError("threshold must be positive")
    err = _joint_errors(pred, gt, alignment)
    return float((err < threshold).mean())


def pck_curve(pred, gt, lo, hi, num=DEFAULT_NUM_THRESHOLDS, alignment="none"):
    """PCK sampled at `num` evenly spaced thresholds over [lo, hi] inclusive.

    A zero lower bound is nudged to a tiny positive value so every threshold
    stays valid.
    """
    thresholds = np.linspace(lo, hi, num)
    if thresholds[0] <= 0:
        thresholds[0] = min(1e-12, hi / 1e6)
    err = _joint_errors(pred, gt, alignment)
    values = np.array([(err < t).mean() for t in thresholds])
    return PckCurve(thresholds, values)


def auc(curve):
    """Trapezoidal integral of PCK over threshold, normalized by the range."""
    span = curve.thresholds[-1] - curve.thresholds[0]
    return float(np.trapezoid(curve.values, curve.thresholds) / span)

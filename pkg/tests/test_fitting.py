import numpy as np
import pytest

from mocapkit.camera import WeakPerspectiveCamera, project
from mocapkit.errors import DimensionError, FitError
from mocapkit.fitting import (SMOOTH_KERNEL, FitConfig, KeypointSet2D, fit,
                              fit_jacobian, prior_cost, reprojection_cost,
                              temporal_smooth)
from mocapkit.integration import PoseLayout, WholeBodyParams
from mocapkit.model import ShapeParams, pose_joints


def render_keypoints(model, params, cam, conf=None):
    joints = pose_joints(model, params.pose(), params.beta_w)[: model.num_joints]
    pts = project(cam, joints)
    if conf is None:
        conf = np.ones(pts.shape[0])
    return KeypointSet2D(pts, conf)


def test_keypoint_set_validation():
    with pytest.raises(DimensionError):
        KeypointSet2D(np.zeros((4, 3)), np.ones(4))
    with pytest.raises(DimensionError):
        KeypointSet2D(np.zeros((4, 2)), np.ones(3))
    with pytest.raises(DimensionError):
        KeypointSet2D(np.zeros((4, 2)), np.full(4, 1.5))


def test_fit_config_validation():
    with pytest.raises(DimensionError):
        FitConfig(iterations=0)
    with pytest.raises(DimensionError):
        FitConfig(weight_2d=-1.0)


def test_reprojection_cost_zero_at_ground_truth(toy):
    params = WholeBodyParams.identity(toy)
    cam = WeakPerspectiveCamera(100.0, np.zeros(2))
    kp = render_keypoints(toy, params, cam)
    assert reprojection_cost(toy, params, cam, kp) == 0.0


def test_reprojection_cost_confidence_weighting(toy, rng):
    params = WholeBodyParams.identity(toy)
    cam = WeakPerspectiveCamera(100.0, np.zeros(2))
    kp = render_keypoints(toy, params, cam)
    shifted = KeypointSet2D(kp.points + rng.normal(size=kp.points.shape), kp.confidence)
    half = KeypointSet2D(shifted.points, 0.5 * shifted.confidence)
    c_full = reprojection_cost(toy, params, cam, shifted)
    c_half = reprojection_cost(toy, params, cam, half)
    assert c_half == pytest.approx(0.5 * c_full, rel=1e-12)


def test_zero_confidence_points_ignored(toy):
    params = WholeBodyParams.identity(toy)
    cam = WeakPerspectiveCamera(100.0, np.zeros(2))
    kp = render_keypoints(toy, params, cam)
    conf = kp.confidence.copy()
    conf[7] = 0.0
    corrupted = kp.points.copy()
    corrupted[7] += 1e6
    assert reprojection_cost(toy, params, cam, KeypointSet2D(corrupted, conf)) == 0.0


def test_prior_cost_formula(toy, rng):
    config = FitConfig()
    anchor = WholeBodyParams.identity(toy)
    theta = rng.normal(size=anchor.theta_w.shape)
    beta = rng.normal(size=10)
    params = WholeBodyParams(np.zeros(3), theta, ShapeParams(beta), anchor.cam_w)
    expected = config.weight_prior_pose * (theta ** 2).sum() + config.weight_prior_shape * (beta ** 2).sum()
    assert prior_cost(params, anchor, config) == pytest.approx(expected, rel=1e-12)


def test_fit_jacobian_exact_on_quadratics():
    def residuals(x):
        return np.array([x[0] ** 2, x[0] * x[1], 3.0 * x[1]])

    x = np.array([1.3, -0.7])
    J = fit_jacobian(residuals, x, 1e-6)
    expected = np.array([[2 * x[0], 0.0], [x[1], x[0]], [0.0, 3.0]])
    # central differences are exact on quadratics up to rounding
    np.testing.assert_allclose(J, expected, atol=1e-8)


def test_fit_recovers_perturbed_pose(toy, rng):
    layout = PoseLayout.from_model(toy)
    gt_theta = np.zeros((toy.num_joints - 1, 3))
    gt_theta[layout.body_rows[:8]] = rng.normal(scale=0.2, size=(8, 3))
    cam = WeakPerspectiveCamera(300.0, np.array([128.0, 128.0]))
    gt = WholeBodyParams(rng.normal(scale=0.1, size=3), gt_theta, ShapeParams.zeros(10), cam)
    kp = render_keypoints(toy, gt, cam)

    init_theta = gt_theta.copy()
    init_theta[layout.body_rows[:8]] += rng.normal(scale=0.1, size=(8, 3))
    init = WholeBodyParams(gt.phi_w + rng.normal(scale=0.05, size=3), init_theta,
                           ShapeParams.zeros(10), cam)
    result = fit(toy, init, cam, kp, FitConfig(iterations=10))
    assert result.cost_trace.shape == (10,)
    assert np.all(np.diff(result.cost_trace) <= 1e-12)
    assert result.final_rms_px < 0.5


def test_fit_rejects_all_zero_confidence(toy):
    params = WholeBodyParams.identity(toy)
    cam = WeakPerspectiveCamera(100.0, np.zeros(2))
    kp = render_keypoints(toy, params, cam, conf=np.zeros(toy.num_joints))
    with pytest.raises(FitError):
        fit(toy, params, cam, kp)


def test_smooth_kernel_shape():
    np.testing.assert_array_equal(SMOOTH_KERNEL, [0.1, 0.2, 0.5, 0.2, 0.1])


def test_smooth_constant_sequence_exact_fixed_point():
    seq = np.full((9, 4), 2.7182818)
    np.testing.assert_array_equal(temporal_smooth(seq), seq)


def test_smooth_constant_1d_and_boundaries():
    seq = np.full(3, -13.25)
    np.testing.assert_array_equal(temporal_smooth(seq), seq)


def test_smooth_is_linear(rng):
    a = rng.normal(size=(12, 3))
    b = rng.normal(size=(12, 3))
    np.testing.assert_allclose(
        temporal_smooth(a + 2.0 * b),
        temporal_smooth(a) + 2.0 * temporal_smooth(b), atol=1e-12)


def test_smooth_time_reversal_equivariant(rng):
    seq = rng.normal(size=(15, 2))
    np.testing.assert_allclose(
        temporal_smooth(seq[::-1])[::-1], temporal_smooth(seq), atol=1e-12)


def test_smooth_interior_window_renormalized():
    # an interior impulse spreads to weights / 1.1 because windows are
    # renormalized to unit mass
    seq = np.zeros(9)
    seq[4] = 1.0
    out = temporal_smooth(seq)
    np.testing.assert_allclose(out[2:7], SMOOTH_KERNEL[::-1] / SMOOTH_KERNEL.sum(), atol=1e-15)


def test_smooth_empty_rejected():
    with pytest.raises(DimensionError):
        temporal_smooth(np.zeros((0, 3)))

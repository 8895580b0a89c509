import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from mocapkit.errors import InvalidRotationError
from mocapkit.rotations import (canonicalize, is_rotation, rodrigues,
                                rodrigues_batch, rotation_to_axis_angle)


def test_zero_vector_gives_identity():
    assert np.array_equal(rodrigues(np.zeros(3)), np.eye(3))


def test_quarter_turn_about_x():
    # closed-form: rotating (0,1,0) by pi/2 about x lands on (0,0,1)
    R = rodrigues(np.array([np.pi / 2, 0, 0]))
    np.testing.assert_allclose(R @ np.array([0, 1, 0]), [0, 0, 1], atol=1e-15)


def test_half_turn_about_z():
    # quaternion oracle via scipy
    aa = np.array([0, 0, np.pi])
    R = rodrigues(aa)
    np.testing.assert_allclose(R @ np.array([1, 0, 0]), [-1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(R, Rotation.from_rotvec(aa).as_matrix(), atol=1e-15)


def test_matches_scipy_on_random_vectors(rng):
    aa = rng.normal(scale=2.0, size=(200, 3))
    ours = rodrigues_batch(aa)
    ref = Rotation.from_rotvec(aa).as_matrix()
    np.testing.assert_allclose(ours, ref, atol=1e-13)


def test_outputs_are_orthonormal(rng):
    for R in rodrigues_batch(rng.normal(scale=3.0, size=(100, 3))):
        assert np.abs(R.T @ R - np.eye(3)).max() < 1e-9
        assert abs(np.linalg.det(R) - 1.0) < 1e-9


def test_identity_to_axis_angle():
    assert np.array_equal(rotation_to_axis_angle(np.eye(3)), np.zeros(3))


def test_round_trip_through_matrix():
    aa = np.array([0.3, -0.1, 0.2])
    np.testing.assert_allclose(rotation_to_axis_angle(rodrigues(aa)), aa, atol=1e-6)


def test_pi_about_z_sign_convention():
    # conjugation oracle: R = Q Rz(pi) Q^T for Q = identity is just Rz(pi)
    aa = rotation_to_axis_angle(rodrigues(np.array([0, 0, np.pi])))
    np.testing.assert_allclose(aa, [0, 0, np.pi], atol=1e-7)
    # axis with negative leading component canonicalizes to its positive mirror
    aa = rotation_to_axis_angle(rodrigues(np.array([0, 0, -np.pi])))
    np.testing.assert_allclose(aa, [0, 0, np.pi], atol=1e-7)


def test_rejects_non_rotation():
    with pytest.raises(InvalidRotationError):
        rotation_to_axis_angle(np.eye(3) * 1.01)


def test_round_trip_random(rng):
    for _ in range(500):
        R = Rotation.random(random_state=np.random.RandomState(int(rng.integers(1 << 31)))).as_matrix()
        aa = rotation_to_axis_angle(R)
        assert np.abs(rodrigues(aa) - R).max() < 1e-6


def test_round_trip_near_pi(rng):
    for _ in range(200):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = np.pi - 10.0 ** rng.uniform(-12, -4)
        R = rodrigues(axis * angle)
        assert np.abs(rodrigues(rotation_to_axis_angle(R)) - R).max() < 1e-6


def test_canonicalize_idempotent(rng):
    for _ in range(100):
        aa = rng.normal(scale=4.0, size=3)
        c = canonicalize(aa)
        assert np.linalg.norm(c) <= np.pi + 1e-12
        np.testing.assert_allclose(canonicalize(c), c, atol=1e-12)
        np.testing.assert_allclose(rodrigues(c), rodrigues(aa), atol=1e-12)


def test_is_rotation_tolerance():
    assert is_rotation(np.eye(3))
    assert not is_rotation(np.eye(3) + 1e-5)
    assert not is_rotation(np.diag([1.0, 1.0, -1.0]))  # det -1

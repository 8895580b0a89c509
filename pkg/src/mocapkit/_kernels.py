"""Hot numeric kernels: batched Rodrigues, forward kinematics, linear blend skinning.

Two interchangeable implementations are provided:

* a pure-numpy path (``*_numpy``), always available,
* a numba ``@njit`` path (``*_numba``), compiled lazily with on-disk caching.

The exported names ``rodrigues_batch``, ``fk_chain`` and ``lbs`` point at the
numba path unless numba is unavailable or ``MOCAPKIT_DISABLE_NUMBA`` is set to
a truthy value, in which case the numpy path is used.  Both paths compute
bit-compatible results up to floating-point reassociation (tested to 1e-12).

Conventions
-----------
Every joint's local transform rotates about the joint's rest position, so a
world transform is stored as an affine pair ``(R, t)`` with
``G(x) = R @ x + t``.  With all rotations at identity, every ``G`` is the
identity and joint world positions equal rest positions.
"""

import os

import numpy as np


def rodrigues_batch_numpy(aa):
    """Convert a batch of axis-angle vectors (J, 3) to rotation matrices (J, 3, 3)."""
    aa = np.asarray(aa, dtype=np.float64)
    n = aa.shape[0]
    out = np.empty((n, 3, 3))
    angle = np.linalg.norm(aa, axis=1)
    small = angle < 1e-12
    safe = np.where(small, 1.0, angle)
    axis = aa / safe[:, None]
    c = np.cos(angle)
    s = np.sin(angle)
    x, y, z = axis[:, 0], axis[:, 1], axis[:, 2]
    K = np.zeros((n, 3, 3))
    K[:, 0, 1] = -z
    K[:, 0, 2] = y
    K[:, 1, 0] = z
    K[:, 1, 2] = -x
    K[:, 2, 0] = -y
    K[:, 2, 1] = x
    eye = np.eye(3)
    out[:] = eye + s[:, None, None] * K + (1.0 - c)[:, None, None] * (K @ K)
    out[small] = eye
    return out


def _rodrigues_batch_loops(aa):
    n = aa.shape[0]
    out = np.empty((n, 3, 3))
    for i in range(n):
        x = aa[i, 0]
        y = aa[i, 1]
        z = aa[i, 2]
        angle = np.sqrt(x * x + y * y + z * z)
        if angle < 1e-12:
            for r in range(3):
                for c in range(3):
                    out[i, r, c] = 1.0 if r == c else 0.0
            continue
        x /= angle
        y /= angle
        z /= angle
        ca = np.cos(angle)
        sa = np.sin(angle)
        ic = 1.0 - ca
        out[i, 0, 0] = ca + x * x * ic
        out[i, 0, 1] = x * y * ic - z * sa
        out[i, 0, 2] = x * z * ic + y * sa
        out[i, 1, 0] = y * x * ic + z * sa
        out[i, 1, 1] = ca + y * y * ic
        out[i, 1, 2] = y * z * ic - x * sa
        out[i, 2, 0] = z * x * ic - y * sa
        out[i, 2, 1] = z * y * ic + x * sa
        out[i, 2, 2] = ca + z * z * ic
    return out


def fk_chain_numpy(parents, rest, local_rots, root_rot):
    """Forward kinematics over a topologically ordered tree.

    Parameters
    ----------
    parents : (J,) int array, parents[0] == -1, parents[j] < j
    rest : (J, 3) rest-pose joint positions
    local_rots : (J, 3, 3) per-joint local rotation matrices
    root_rot : (3, 3) extra global rotation applied at the root

    Returns
    -------
    world_rots : (J, 3, 3), world_trans : (J, 3) with G_j(x) = R_j x + t_j
    """
    J = parents.shape[0]
    world_rots = np.empty((J, 3, 3))
    world_trans = np.empty((J, 3))
    R0 = root_rot @ local_rots[0]
    world_rots[0] = R0
    world_trans[0] = rest[0] - R0 @ rest[0]
    for j in range(1, J):
        p = parents[j]
        Rp = world_rots[p]
        Rj = Rp @ local_rots[j]
        world_rots[j] = Rj
        world_trans[j] = world_trans[p] + Rp @ rest[j] - Rj @ rest[j]
    return world_rots, world_trans


def _fk_chain_loops(parents, rest, local_rots, root_rot):
    J = parents.shape[0]
    world_rots = np.empty((J, 3, 3))
    world_trans = np.empty((J, 3))
    world_rots[0] = root_rot @ local_rots[0]
    world_trans[0] = rest[0] - world_rots[0] @ rest[0]
    for j in range(1, J):
        p = parents[j]
        Rj = world_rots[p] @ local_rots[j]
        world_rots[j] = Rj
        world_trans[j] = world_trans[p] + world_rots[p] @ rest[j] - Rj @ rest[j]
    return world_rots, world_trans


def lbs_numpy(weights, vertices, world_rots, world_trans):
    """Linear blend skinning: (N, J) weights blend per-joint affine transforms."""
    blended = np.einsum("nj,jab,nb->na", weights, world_rots, vertices)
    blended += weights @ world_trans
    return blended


def _lbs_loops(weights, vertices, world_rots, world_trans):
    N = vertices.shape[0]
    J = weights.shape[1]
    out = np.zeros((N, 3))
    for n in range(N):
        vx = vertices[n, 0]
        vy = vertices[n, 1]
        vz = vertices[n, 2]
        for j in range(J):
            w = weights[n, j]
            if w == 0.0:
                continue
            R = world_rots[j]
            t = world_trans[j]
            out[n, 0] += w * (R[0, 0] * vx + R[0, 1] * vy + R[0, 2] * vz + t[0])
            out[n, 1] += w * (R[1, 0] * vx + R[1, 1] * vy + R[1, 2] * vz + t[1])
            out[n, 2] += w * (R[2, 0] * vx + R[2, 1] * vy + R[2, 2] * vz + t[2])
    return out


def _env_disables_numba():
    return os.environ.get("MOCAPKIT_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")


NUMBA_ENABLED = False
rodrigues_batch_numba = None
fk_chain_numba = None
lbs_numba = None

if not _env_disables_numba():
    try:
        from numba import njit

        rodrigues_batch_numba = njit(cache=True)(_rodrigues_batch_loops)
        fk_chain_numba = njit(cache=True)(_fk_chain_loops)
        lbs_numba = njit(cache=True)(_lbs_loops)
        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    rodrigues_batch = rodrigues_batch_numba
    fk_chain = fk_chain_numba
    lbs = lbs_numba
else:
    rodrigues_batch = rodrigues_batch_numpy
    fk_chain = fk_chain_numpy
    lbs = lbs_numpy

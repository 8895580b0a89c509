"""Benchmark the jitted hot kernels against their pure-numpy fallbacks.

Run with:  python3 benchmarks/bench_kernels.py
The MOCAPKIT_DISABLE_NUMBA=1 environment flag is orthogonal: this script
imports both implementations directly, so it reports both paths regardless.
"""

import argparse
import time

import numpy as np

from mocapkit import _kernels
from mocapkit.fitting import FitConfig, KeypointSet2D, fit
from mocapkit.camera import WeakPerspectiveCamera, project
from mocapkit.integration import WholeBodyParams
from mocapkit.model import ShapeParams, pose_joints
from mocapkit.toymodel import gen_toy_model


def timeit(fn, repeats):
    fn()  # warm-up (includes JIT compilation for the numba path)
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def bench_kernels(repeats):
    rng = np.random.default_rng(0)
    aa = np.ascontiguousarray(rng.normal(size=(52, 3)))

    n = 52
    parents = np.array([-1] + [int(rng.integers(0, j)) for j in range(1, n)])
    rest = rng.normal(size=(n, 3))
    local_rots = _kernels.rodrigues_batch_numpy(rng.normal(scale=0.5, size=(n, 3)))
    root_rot = np.eye(3)

    n_verts = 322
    w = rng.uniform(size=(n_verts, n))
    w /= w.sum(axis=1, keepdims=True)
    verts = rng.normal(size=(n_verts, 3))
    trans = rng.normal(size=(n, 3))

    if not _kernels.NUMBA_ENABLED:
        raise SystemExit("numba unavailable; nothing to compare against the numpy path")
    cases = [
        ("rodrigues_batch (52 rotations)",
         lambda: _kernels.rodrigues_batch_numba(aa),
         lambda: _kernels.rodrigues_batch_numpy(aa)),
        ("fk_chain (52-joint tree)",
         lambda: _kernels.fk_chain_numba(parents, rest, local_rots, root_rot),
         lambda: _kernels.fk_chain_numpy(parents, rest, local_rots, root_rot)),
        ("lbs (322 vertices x 52 joints)",
         lambda: _kernels.lbs_numba(w, verts, local_rots, trans),
         lambda: _kernels.lbs_numpy(w, verts, local_rots, trans)),
    ]
    print(f"{'kernel':<34} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name, jitted, plain in cases:
        t_jit = timeit(jitted, repeats)
        t_np = timeit(plain, repeats)
        print(f"{name:<34} {t_jit * 1e6:>10.1f}us {t_np * 1e6:>10.1f}us {t_np / t_jit:>8.1f}x")


def bench_fit(repeats):
    """End-to-end fit benchmark using whichever path the env flag selected."""
    toy = gen_toy_model(seed=0)
    rng = np.random.default_rng(1)
    cam = WeakPerspectiveCamera(300.0, np.array([128.0, 128.0]))
    theta = np.zeros((51, 3))
    theta[:21] = rng.normal(scale=0.1, size=(21, 3))
    gt = WholeBodyParams(np.zeros(3), theta, ShapeParams.zeros(10), cam)
    joints = pose_joints(toy, gt.pose(), gt.beta_w)[:52]
    kp = KeypointSet2D(project(cam, joints), np.ones(52))
    init = WholeBodyParams(np.zeros(3), theta + rng.normal(scale=0.05, size=theta.shape),
                           ShapeParams.zeros(10), cam)
    t = timeit(lambda: fit(toy, init, cam, kp, FitConfig(iterations=5)), repeats)
    path = "numba" if _kernels.NUMBA_ENABLED else "numpy"
    print(f"\nfit (5 iterations, {path} path selected): {t * 1e3:.1f} ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--fit-repeats", type=int, default=5)
    args = parser.parse_args()
    bench_kernels(args.repeats)
    bench_fit(args.fit_repeats)


if __name__ == "__main__":
    main()

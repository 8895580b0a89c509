"""Command-line entry points tying the pipeline together.

Subcommands: gen-toy, pose, integrate, fit, eval, prep.  Errors exit nonzero
with a machine-readable JSON object on stderr.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import dataprep, formats, metrics
from .errors import MocapkitError, SchemaError
from .fitting import FitConfig, fit, temporal_smooth
from .integration import copy_paste
from .model import PoseParams, pose_mesh
from .toymodel import gen_toy_model


def _parallel_map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def cmd_gen_toy(args):
    model = gen_toy_model(seed=args.seed, size_class=args.size_class)
    formats.save_model(args.output, model)
    print(f"wrote {args.output}: {model.num_vertices} vertices, {model.num_joints} joints")
    return 0


def cmd_pose(args):
    model = formats.load_model(args.asset)
    frames = formats.params_from_doc(formats.read_json(args.params))
    joints_out = []
    for idx, (i, params, _extras) in enumerate(frames):
        verts = pose_mesh(model, params.pose(), params.beta_w)
        joints_out.append((i, model.joint_regressor[: model.num_joints] @ verts))
        if args.obj:
            path = args.obj if len(frames) == 1 else args.obj.replace(".obj", f"_{i:06d}.obj")
            formats.write_obj(path, verts, model.faces)
    formats.write_json(args.joints_out, formats.joints_to_doc(joints_out))
    print(f"posed {len(frames)} frame(s) -> {args.joints_out}")
    return 0


def cmd_integrate(args):
    model = formats.load_model(args.asset)
    preds = formats.predictions_from_doc(formats.read_json(args.predictions))

    def fuse(rec):
        i, body, left, right = rec
        return i, copy_paste(model, body, left, right), None

    out = _parallel_map(fuse, preds, args.jobs)
    formats.write_json(args.output, formats.params_to_doc(out))
    print(f"integrated {len(out)} frame(s) -> {args.output}")
    return 0


def cmd_fit(args):
    model = formats.load_model(args.asset)
    init_frames = formats.params_from_doc(formats.read_json(args.init))
    kp_frames = formats.keypoints_from_doc(formats.read_json(args.keypoints))
    kp_by_frame = {i: (pts, conf) for i, pts, conf in kp_frames}
    config = FitConfig(iterations=args.iters)

    def fit_frame(rec):
        i, params, _extras = rec
        if i not in kp_by_frame:
            raise SchemaError(f"no keypoints for frame {i}")
        pts, conf = kp_by_frame[i]
        if pts.shape[1] != 2:
            raise SchemaError("fit requires 2D keypoints")
        kp = formats.keypoint_set(pts, conf)
        result = fit(model, params, params.cam_w, kp, config)
        return i, result.params, {
            "cost_trace": result.cost_trace,
            "final_rms_px": result.final_rms_px,
        }

    out = _parallel_map(fit_frame, init_frames, args.jobs)

    if args.smooth and len(out) > 1:
        flat = np.array([
            np.concatenate([p.phi_w, p.theta_w.ravel(), p.beta_w.beta,
                            [p.cam_w.scale], p.cam_w.translation])
            for _, p, _ in out
        ])
        smoothed = temporal_smooth(flat)
        rebuilt = []
        for (i, p, extras), row in zip(out, smoothed):
            nt = p.theta_w.size
            nb = p.beta_w.beta.size
            from .camera import WeakPerspectiveCamera
            from .integration import WholeBodyParams
            from .model import ShapeParams
            rebuilt.append((i, WholeBodyParams(
                row[0:3], row[3:3 + nt].reshape(-1, 3),
                ShapeParams(row[3 + nt:3 + nt + nb]),
                WeakPerspectiveCamera(row[3 + nt + nb], row[3 + nt + nb + 1:]),
            ), extras))
        out = rebuilt

    formats.write_json(args.output, formats.params_to_doc(out))
    print(f"fitted {len(out)} frame(s) -> {args.output}")
    return 0


def cmd_eval(args):
    pred = formats.joints_from_doc(formats.read_json(args.pred))
    gt = formats.joints_from_doc(formats.read_json(args.gt))
    if [i for i, _ in pred] != [i for i, _ in gt]:
        raise SchemaError("pred and gt frame indices differ")
    lo, hi = ((metrics.RANGE_3D_MM if args.metric == "3d" else metrics.RANGE_2D_PX)
              if args.range is None else tuple(args.range))
    pred_j = np.concatenate([j[None] for _, j in pred])
    gt_j = np.concatenate([j[None] for _, j in gt])
    if pred_j.shape != gt_j.shape:
        raise SchemaError("pred and gt joint shapes differ")
    curve = metrics.pck_curve(pred_j, gt_j, lo, hi, alignment=args.alignment)
    report = {
        "metric": args.metric,
        "alignment": args.alignment,
        "range": [lo, hi],
        "thresholds": curve.thresholds.tolist(),
        "pck": curve.values.tolist(),
        "auc": metrics.auc(curve),
    }
    formats.write_json(args.output, report)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as f:
            f.write("threshold,pck\n")
            for t, v in zip(curve.thresholds, curve.values):
                f.write(f"{float(t)!r},{float(v)!r}\n")
    print(f"AUC = {report['auc']:.6f} over [{lo}, {hi}] -> {args.output}")
    return 0


def cmd_prep(args):
    config = formats.read_json(args.config)
    unknown = set(config) - {"reorder", "rescale_reference", "flip_width"}
    if unknown:
        raise SchemaError(f"unknown prep config fields: {sorted(unknown)}")
    frames = formats.keypoints_from_doc(formats.read_json(args.keypoints))
    joint_map = None
    if config.get("reorder") is not None:
        joint_map = dataprep.JointMap(np.asarray(config["reorder"], dtype=np.int64))

    out = []
    for i, pts, conf in frames:
        if joint_map is not None:
            pts = dataprep.reorder_joints(pts, joint_map)
            if conf is not None:
                conf = dataprep.reorder_joints(conf, joint_map)
        if config.get("rescale_reference") is not None:
            if pts.shape[1] != 3:
                raise SchemaError("rescaling requires 3D keypoints")
            pts = dataprep.rescale_keypoints(pts, float(config["rescale_reference"]))
        if config.get("flip_width") is not None:
            if pts.shape[1] != 2:
                raise SchemaError("flipping requires 2D keypoints")
            pts, conf = dataprep.flip_keypoints_2d(
                pts, conf if conf is not None else np.ones(pts.shape[0]),
                float(config["flip_width"]))
        out.append((i, pts, conf))
    formats.write_json(args.output, formats.keypoints_to_doc(out))
    print(f"prepped {len(out)} frame(s) -> {args.output}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="mocapkit")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-toy", help="generate the procedural toy model asset")
    g.add_argument("output")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--size-class", choices=("small", "large"), default="small")
    g.set_defaults(func=cmd_gen_toy)

    g = sub.add_parser("pose", help="pose an asset from a params file")
    g.add_argument("asset")
    g.add_argument("params")
    g.add_argument("joints_out")
    g.add_argument("--obj", help="also export the posed mesh as OBJ")
    g.set_defaults(func=cmd_pose)

    g = sub.add_parser("integrate", help="copy-and-paste fuse predictions into params")
    g.add_argument("asset")
    g.add_argument("predictions")
    g.add_argument("output")
    g.add_argument("--jobs", type=int, default=1)
    g.set_defaults(func=cmd_integrate)

    g = sub.add_parser("fit", help="fit params to 2D keypoints")
    g.add_argument("asset")
    g.add_argument("init")
    g.add_argument("keypoints")
    g.add_argument("output")
    g.add_argument("--iters", type=int, default=20)
    g.add_argument("--smooth", action="store_true")
    g.add_argument("--jobs", type=int, default=1)
    g.set_defaults(func=cmd_fit)

    g = sub.add_parser("eval", help="PCK/AUC report for predicted vs ground-truth joints")
    g.add_argument("pred")
    g.add_argument("gt")
    g.add_argument("output")
    g.add_argument("--metric", choices=("3d", "2d"), default="3d")
    g.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    g.add_argument("--alignment", choices=("none", "root-relative"), default="none")
    g.add_argument("--csv", help="also write the PCK curve as CSV")
    g.set_defaults(func=cmd_eval)

    g = sub.add_parser("prep", help="harmonize keypoints (reorder/rescale/flip)")
    g.add_argument("keypoints")
    g.add_argument("config")
    g.add_argument("output")
    g.set_defaults(func=cmd_prep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MocapkitError as e:
        json.dump({"error": {"type": type(e).__name__, "message": str(e)}}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except OSError as e:
        json.dump({"error": {"type": "OSError", "message": str(e)}}, sys.stderr)
        sys.stderr.write("\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())

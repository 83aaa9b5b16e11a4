"""``vpgeo`` command line.

Exit codes: 0 success, 1 invalid input or usage, 2 I/O failure,
3 numeric or degenerate geometry.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import formats
from .cuboid import Box2D, Cuboid2D, Face, Frame, face_quad, from_roi_relative, to_roi_relative
from .errors import GeometryError
from .fusion import DEFAULT_DIM, SketchPlan, mcb_pool
from .metrics import PckConfig, cosine_similarity, cuboid_quality, pck, pr_curve
from .refine import RefineConfig, study_scenes, synth_scenes
from .vploss import loss_3dbranch, smooth_l1, vp_loss, vp_loss_direction
from .warp import DEFAULT_FACE_SIZE, perspective_roi, roi_align

log = logging.getLogger("vpgeo")


class CommandOutcome(NamedTuple):
    exit_code: int
    message: str = ""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage().strip()}\n{self.prog}: error: {message}")


def _emit(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _floats(s: str, n: int, what: str) -> list[float]:
    try:
        vals = [float(t) for t in s.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"{what} must be {n} comma-separated numbers") from None
    if len(vals) != n:
        raise ValueError(f"{what} needs {n} numbers, got {len(vals)}")
    return vals


def _size(s: str) -> tuple[int, int]:
    try:
        h, w = (int(t) for t in s.lower().split("x"))
    except ValueError:
        raise ValueError(f"size must look like HxW, got {s!r}") from None
    if h < 1 or w < 1:
        raise ValueError("size must be at least 1x1")
    return h, w


def _roi_cuboid(path) -> tuple[Cuboid2D, Box2D | None]:
    """Load a cuboid and bring it into the RoI-relative frame."""
    cub, bbox = formats.cuboid_from_dict(formats.read_json(path))
    if cub.frame is Frame.IMAGE:
        if bbox is None:
            raise ValueError(f"{path}: image-frame cuboid needs bbox2d")
        cub = to_roi_relative(cub, bbox)
    return cub, bbox


def _image_cuboid(cub: Cuboid2D, bbox: Box2D | None, path) -> Cuboid2D:
    if cub.frame is Frame.IMAGE:
        return cub
    if bbox is None:
        raise ValueError(f"{path}: RoI-relative cuboid needs bbox2d")
    return from_roi_relative(cub, bbox)


def cmd_synth(args) -> None:
    if args.count < 1:
        raise ValueError("--count must be >= 1")
    scenes = synth_scenes(args.count, args.seed)
    doc = {
        "count": args.count,
        "seed": args.seed,
        "scenes": [formats.scene_to_dict(s, k) for k, s in enumerate(scenes)],
    }
    _emit(formats.dumps(doc), args.out)


def _loss_report(cub: Cuboid2D, with_grad: bool) -> dict:
    total = vp_loss(cub)
    out = {
        "vp_loss": total.value,
        "directions": {d: vp_loss_direction(cub, d).value for d in "FRS"},
        "cq": cuboid_quality(cub),
    }
    if with_grad:
        out["vp_grad"] = total.grad
    return out


def cmd_loss(args) -> None:
    if args.scenes:
        rows = []
        for k, scene in enumerate(formats.read_scenes(args.scenes)):
            cub = to_roi_relative(scene.cuboid, scene.bbox)
            rows.append({"index": k, **_loss_report(cub, args.grad)})
        doc = {"scenes": rows, "max_vp_loss": max(r["vp_loss"] for r in rows)}
    elif args.cuboid:
        cub, _ = _roi_cuboid(args.cuboid)
        doc = _loss_report(cub, args.grad)
        if args.target:
            tgt, _ = _roi_cuboid(args.target)
            doc["smooth_l1"] = smooth_l1(cub, tgt).value
            doc["loss_3dbranch"] = loss_3dbranch(cub, tgt).value
    else:
        raise UsageError("loss: give --cuboid or --scenes")
    _emit(formats.dumps(doc), args.output)


def cmd_fit(args) -> None:
    cfg = RefineConfig(args.steps, args.lr, args.lambda_vp, args.sigma)
    if args.input:
        scenes = formats.read_scenes(args.input)
        if not scenes:
            raise ValueError(f"{args.input} holds no scenes")
    else:
        if args.count is None:
            raise UsageError("fit: give --in or --count")
        scenes = synth_scenes(args.count, args.seed)
    report = study_scenes(scenes, cfg, args.seed).to_dict()
    _emit(formats.dumps(report), args.report)
    if args.csv:
        formats.write_rows_csv(args.csv, report["rows"])
    if args.figures:
        from .plotting import study_figures

        for p in study_figures(report, args.figures, args.figure_format):
            log.info("wrote %s", p)
    vp, no = report["arms"]["vp"], report["arms"]["no_vp"]
    log.info("mean CQ %.4f (vp) vs %.4f (no vp); mean PCK %.2f vs %.2f", vp["mean_cq"], no["mean_cq"], vp["mean_pck"], no["mean_pck"])


def cmd_warp(args) -> None:
    f = formats.read_fmap(args.fmap)
    h, w = _size(args.out) if args.out else DEFAULT_FACE_SIZE
    picked = sum(x is not None for x in (args.quad, args.box, args.cuboid))
    if picked != 1:
        raise UsageError("warp: give exactly one of --quad, --box, --cuboid")
    if args.box:
        out = roi_align(f, Box2D(*_floats(args.box, 4, "--box")), h, w)
    else:
        if args.quad:
            quad = np.array(_floats(args.quad, 8, "--quad")).reshape(4, 2)
        else:
            cub, bbox = formats.cuboid_from_dict(formats.read_json(args.cuboid))
            quad = face_quad(_image_cuboid(cub, bbox, args.cuboid), Face(args.face))
        out = perspective_roi(f, quad, h, w)
    formats.write_fmap(args.output, out)


def _vector(path) -> np.ndarray:
    v = np.asarray(formats.read_json(path), dtype=float)
    if v.ndim != 1 or not np.all(np.isfinite(v)):
        raise ValueError(f"{path}: expected a flat JSON array of finite numbers")
    return v


def cmd_sketch(args) -> None:
    x = _vector(args.x)
    y = _vector(args.y)
    # the second plan takes the next seed so the two hash families differ
    px = SketchPlan.from_seed(x.size, args.dim, args.seed)
    py = SketchPlan.from_seed(y.size, args.dim, (args.seed + 1) % 2**64)
    _emit(formats.dumps(mcb_pool(x, y, px, py)), args.output)


def cmd_metrics(args) -> None:
    gt, gt_box = formats.cuboid_from_dict(formats.read_json(args.gt))
    pred, pred_box = formats.cuboid_from_dict(formats.read_json(args.pred))
    box = gt_box or pred_box
    if box is None:
        raise ValueError("metrics: ground truth needs bbox2d")
    gt_img = _image_cuboid(gt, box, args.gt)
    pred_img = _image_cuboid(pred, pred_box or box, args.pred)
    doc = {
        "pck": pck(pred_img, gt_img, box, PckConfig(args.alpha)),
        "cq_pred": cuboid_quality(to_roi_relative(pred_img, box)),
        "cq_gt": cuboid_quality(to_roi_relative(gt_img, box)),
    }
    _emit(formats.dumps(doc), args.output)


def cmd_verify(args) -> None:
    pairs = formats.read_json(args.pairs)
    if isinstance(pairs, dict):
        pairs = pairs["pairs"]
    scores = []
    for k, p in enumerate(pairs):
        if "same" not in p:
            raise ValueError(f"pair {k} lacks 'same'")
        s = p["score"] if "score" in p else cosine_similarity(p["a"], p["b"])
        scores.append((float(s), bool(p["same"])))
    points, ap = pr_curve(scores)
    doc = {"n_pairs": len(scores), "ap": ap, "points": [p._asdict() for p in points]}
    _emit(formats.dumps(doc), args.output)


def cmd_render(args) -> None:
    from .plotting import render_overlay

    cub, bbox = formats.cuboid_from_dict(formats.read_json(args.cuboid))
    img = _image_cuboid(cub, bbox, args.cuboid)
    bg = formats.read_ppm(args.background) if args.background else None
    render_overlay(img, args.out, bg, title=args.title)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vpgeo", description="Vanishing-point cuboid geometry toolkit")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    # SUPPRESS so a subcommand does not reset a -v given before it
    common = _Parser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", parents=[common], help="generate synthetic pinhole scenes")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", help="output JSON (default stdout)")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("loss", parents=[common], help="vanishing-point and 3D-branch losses")
    s.add_argument("--cuboid")
    s.add_argument("--target", help="ground-truth cuboid for smooth-L1 and the combined loss")
    s.add_argument("--scenes", help="scenes JSON from synth")
    s.add_argument("--grad", action="store_true", help="include the 16-element VP gradient")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_loss)

    s = sub.add_parser("fit", parents=[common], help="refinement study with and without the VP term")
    s.add_argument("--in", dest="input", help="scenes JSON from synth")
    s.add_argument("--count", type=int, help="synthesize this many scenes instead of --in")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--sigma", type=float, default=0.02)
    s.add_argument("--lambda-vp", type=float, default=0.1)
    s.add_argument("--steps", type=int, default=200)
    s.add_argument("--lr", type=float, default=0.05)
    s.add_argument("--report", help="report JSON (default stdout)")
    s.add_argument("--csv", help="per-scene rows as CSV")
    s.add_argument("--figures", help="directory for study figures")
    s.add_argument("--figure-format", default="png", choices=("png", "svg", "pdf"))
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("warp", parents=[common], help="extract a fixed-size feature grid from a region")
    s.add_argument("--fmap", required=True)
    s.add_argument("--quad", help="x0,y0,x1,y1,x2,y2,x3,y3")
    s.add_argument("--box", help="x,y,w,h (axis-aligned RoIAlign)")
    s.add_argument("--cuboid", help="cuboid JSON; use with --face")
    s.add_argument("--face", default="side", choices=[f.value for f in Face])
    s.add_argument("--out", help="output size HxW (default 7x7)")
    s.add_argument("-o", "--output", required=True, help="output FMAP file")
    s.set_defaults(func=cmd_warp)

    s = sub.add_parser("sketch", parents=[common], help="compact bilinear pooling of two vectors")
    s.add_argument("x", help="JSON array")
    s.add_argument("y", help="JSON array")
    s.add_argument("--dim", type=int, default=DEFAULT_DIM)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sketch)

    s = sub.add_parser("metrics", parents=[common], help="PCK and cuboid quality")
    s.add_argument("--pred", required=True)
    s.add_argument("--gt", required=True)
    s.add_argument("--alpha", type=float, default=0.1)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("verify", parents=[common], help="precision/recall and AP over scored pairs")
    s.add_argument("--pairs", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("render", parents=[common], help="SVG overlay of a cuboid and its vanishing points")
    s.add_argument("--cuboid", required=True)
    s.add_argument("--background", help="PPM raster")
    s.add_argument("--title")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_render)
    return p


def run(argv: list[str] | None = None) -> CommandOutcome:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        args.func(args)
    except UsageError as exc:
        return _fail(1, str(exc))
    except GeometryError as exc:
        return _fail(3, f"degenerate geometry: {exc}")
    except (ValueError, KeyError, TypeError) as exc:
        return _fail(1, f"invalid input: {exc}")
    except OSError as exc:
        return _fail(2, f"I/O error: {exc}")
    except SystemExit as exc:  # --help
        return CommandOutcome(int(exc.code or 0))
    return CommandOutcome(0)


def _fail(code: int, message: str) -> CommandOutcome:
    print(f"vpgeo: {message}", file=sys.stderr)
    return CommandOutcome(code, message)


def main() -> None:
    sys.exit(run().exit_code)


if __name__ == "__main__":
    main()

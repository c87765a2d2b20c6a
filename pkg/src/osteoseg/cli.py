"""Batch command-line interface.

Exit codes: 0 success, 1 domain error, 2 usage error. Diagnostics go to
stderr; machine-readable output (JSON/CSV) goes to stdout or the
requested files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import dataset
from .calibration import FemurReferenceTable, ReferenceLine, set_scale
from .errors import OsteosegError
from .image import read_gray_png, read_mask_png, write_gray_png, write_labels_png, write_mask_png
from .margin import EnnekingStage, default_model
from .metrics import evaluate_batch
from .mri import MriConfig, quality_filter, segment_mri
from .xray import XrayConfig, segment_xray


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _point(text):
    try:
        x, y = text.split(",")
        return (float(x), float(y))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(prog="osteoseg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment-xray", help="segment a lesion in an X-ray PNG")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-mask", required=True)
    p.add_argument("--dump-intermediates", metavar="DIR")
    p.add_argument("--config", metavar="JSON")

    p = sub.add_parser("segment-mri", help="three-way MRI tissue labeling")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-labels", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--config", metavar="JSON")

    p = sub.add_parser("filter", help="accept/reject images by saturation and contrast")
    p.add_argument("--in", dest="input", required=True, metavar="DIR")
    p.add_argument("--report", required=True, metavar="JSON")

    p = sub.add_parser("evaluate", help="per-pixel metrics for mask pairs")
    p.add_argument("--pred-dir", required=True)
    p.add_argument("--gt-dir", required=True)
    p.add_argument("--out", required=True, metavar="REPORT")

    p = sub.add_parser("calibrate", help="pixel-to-cm scale from a reference line")
    p.add_argument("--p0", type=_point, required=True, metavar="X,Y")
    p.add_argument("--p1", type=_point, required=True, metavar="X,Y")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--known-cm", type=float)
    group.add_argument("--sex")
    p.add_argument("--age", type=float)
    p.add_argument("--table", metavar="CSV", help="femur reference table override")
    p.add_argument("--out", metavar="JSON")

    p = sub.add_parser("margin", help="predict a surgical safety margin")
    p.add_argument("--stage", required=True)
    p.add_argument("--radius", type=float, required=True, metavar="CM")

    p = sub.add_parser("margin-table", help="margin predictions on the reference grid")
    p.add_argument("--stage", required=True)
    p.add_argument("--r-min", type=float, default=0.50)
    p.add_argument("--r-max", type=float, default=4.75)
    p.add_argument("--step", type=float, default=0.25)

    p = sub.add_parser("explore", help="dataset statistics from a case root")
    p.add_argument("--root", required=True)
    p.add_argument("--metadata", metavar="CSV")
    p.add_argument("--out", metavar="STEM", help="write STEM.json and STEM.csv")

    p = sub.add_parser("serve", help="run the local workbench service")
    p.add_argument("--port", type=int, default=8077)
    p.add_argument("--case-root", required=True)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _cmd_segment_xray(args):
    path = Path(args.input)
    if not path.is_file():
        raise OsteosegError(f"input image not found: {path}")
    cfg = XrayConfig.from_dict(_load_json(args.config)) if args.config else XrayConfig()
    img = read_gray_png(path)
    seg = segment_xray(img, cfg, record_intermediates=bool(args.dump_intermediates))
    write_mask_png(seg.lesion_mask, args.out_mask)
    if args.dump_intermediates:
        out = Path(args.dump_intermediates)
        out.mkdir(parents=True, exist_ok=True)
        for i, (name, value) in enumerate(seg.intermediates):
            target = out / f"{i:02d}_{name}.png"
            if hasattr(value, "bits"):
                write_mask_png(value, target)
            else:
                write_gray_png(value, target)
    print(json.dumps({
        "mask": args.out_mask,
        "converged": seg.converged,
        "otsu_threshold": seg.otsu_threshold,
        "foreground_pixels": seg.lesion_mask.foreground_count,
    }))
    return 0


def _cmd_segment_mri(args):
    path = Path(args.input)
    if not path.is_file():
        raise OsteosegError(f"input image not found: {path}")
    cfg = MriConfig.from_dict(_load_json(args.config)) if args.config else MriConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    img = read_gray_png(path)
    seg = segment_mri(img, cfg)
    write_labels_png(seg.labels, args.out_labels)
    print(json.dumps({
        "labels": args.out_labels,
        "centroids": [float(c) for c in seg.centroids],
        "tumor_pixels": seg.tumor_mask.foreground_count,
        "neighbor_pixels": seg.neighbor_mask.foreground_count,
        "flags": seg.flags,
    }))
    return 0


def _cmd_filter(args):
    root = Path(args.input)
    if not root.is_dir():
        raise OsteosegError(f"input directory not found: {root}")
    accepted, rejected = [], []
    for path in sorted(root.glob("*.png")):
        result = quality_filter(read_gray_png(path))
        if result.accepted:
            accepted.append(path.name)
        else:
            rejected.append({"file": path.name, "reasons": result.reasons})
    report = {"accepted": accepted, "rejected": rejected}
    with open(args.report, "w") as fh:
        json.dump(report, fh, indent=2)
    print(json.dumps({"accepted": len(accepted), "rejected": len(rejected)}))
    return 0


def _cmd_evaluate(args):
    pred_dir = Path(args.pred_dir)
    gt_dir = Path(args.gt_dir)
    for d in (pred_dir, gt_dir):
        if not d.is_dir():
            raise OsteosegError(f"directory not found: {d}")
    names = sorted(p.name for p in pred_dir.glob("*.png") if (gt_dir / p.name).is_file())
    if not names:
        raise OsteosegError("no matching prediction/ground-truth filename pairs")
    pairs = [
        (name, read_mask_png(pred_dir / name), read_mask_png(gt_dir / name))
        for name in names
    ]
    report = evaluate_batch(pairs)
    out = Path(args.out)
    if out.suffix == ".csv":
        report.write_csv(out)
    elif out.suffix == ".json":
        out.write_text(report.to_json())
    else:
        report.write_csv(out.with_suffix(".csv"))
        out.with_suffix(".json").write_text(report.to_json())
    print(json.dumps({"pairs": len(names), "means": report.means}))
    return 0


def _cmd_calibrate(args):
    line = ReferenceLine(args.p0, args.p1)
    if args.known_cm is not None:
        record = set_scale(line, args.known_cm, source="user_supplied")
    else:
        if args.age is None:
            raise OsteosegError("--sex requires --age")
        table = (
            FemurReferenceTable.from_csv(args.table)
            if args.table
            else FemurReferenceTable.bundled_placeholder()
        )
        record = set_scale(line, table.estimate(args.sex, args.age), source="reference_table")
    if args.out:
        record.save(args.out)
    print(json.dumps(record.to_dict()))
    return 0


def _cmd_margin(args):
    prediction = default_model().predict(EnnekingStage.parse(args.stage), args.radius)
    print(json.dumps(prediction.to_dict()))
    return 0


def _cmd_margin_table(args):
    rows = default_model().table(
        EnnekingStage.parse(args.stage), args.r_min, args.r_max, args.step
    )
    print("injury_radius_cm,margin_radius_cm,extrapolated")
    for r in rows:
        print(f"{r.lesion_radius_cm:.2f},{r.margin_radius_cm:.5f},{str(r.extrapolated).lower()}")
    return 0


def _cmd_explore(args):
    result = dataset.ingest(args.root, args.metadata)
    for line in result.diagnostics:
        print(line, file=sys.stderr)
    stats = dataset.explore(result.cases)
    text = json.dumps(stats, indent=2)
    if args.out:
        Path(args.out + ".json").write_text(text)
        with open(args.out + ".csv", "w") as fh:
            fh.write("statistic,key,value\n")
            for section in ("age_histogram", "sex_counts", "bone_counts", "modality_counts", "mri_plane_counts"):
                for key, value in stats[section].items():
                    fh.write(f"{section},{key},{value}\n")
    print(text)
    return 0


def _cmd_serve(args):
    from .service import serve

    serve(port=args.port, case_root=args.case_root, host=args.host)
    return 0


_COMMANDS = {
    "segment-xray": _cmd_segment_xray,
    "segment-mri": _cmd_segment_mri,
    "filter": _cmd_filter,
    "evaluate": _cmd_evaluate,
    "calibrate": _cmd_calibrate,
    "margin": _cmd_margin,
    "margin-table": _cmd_margin_table,
    "explore": _cmd_explore,
    "serve": _cmd_serve,
}


def cli_dispatch(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return _COMMANDS[args.command](args)
    except OsteosegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

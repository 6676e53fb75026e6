"""Command-line interface.

Exit codes partition outcomes: 0 the evaluation found nothing unsafe,
1 at least one unsafe verdict, 2 usage or input error. Nothing else.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any

from .config import load_config_document, parse_fraction
from .density import calibrate_k_safe, pixel_extent
from .errors import SegsafeError
from .masks import PaletteMapping, load_label_map
from .overlays import emit_overlays, render_profile_plot, render_summary_figure
from .pipeline import PipelineArtifacts, evaluate
from .report import emit_report, report_to_dict, write_batch_csv, write_profile_csv
from .types import CameraGeometry, SafetyConfig

__all__ = ["build_parser", "main", "run"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segsafe",
        description="Safety-aware evaluation of semantic-segmentation predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one prediction against its ground truth")
    p_eval.add_argument("pred", help="prediction mask raster")
    p_eval.add_argument("gt", help="ground-truth mask raster")
    _add_shared_options(p_eval)
    p_eval.add_argument("--out", help="write the JSON report here instead of stdout")
    p_eval.add_argument("--viz-dir", help="emit overlay panels and figures into this directory")
    p_eval.add_argument("--image", help="camera image to pass through as overlay panel 1")
    p_eval.set_defaults(func=cmd_eval)

    p_batch = sub.add_parser("batch", help="evaluate every pair listed in a manifest")
    p_batch.add_argument("manifest", help="one whitespace-separated 'pred gt' pair per line")
    _add_shared_options(p_batch)
    p_batch.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
    p_batch.add_argument("--out-dir", help="write per-image reports, aggregate and CSV here")
    p_batch.add_argument(
        "--strict", action="store_true", help="abort on the first per-image failure"
    )
    p_batch.set_defaults(func=cmd_batch)

    p_cal = sub.add_parser("calibrate", help="suggest k_safe from camera geometry")
    p_cal.add_argument("--sensor-pixels", type=int, required=True, help="sensor height in pixels")
    p_cal.add_argument(
        "--object-height", type=float, required=True,
        help="height in meters of an object that fills the sensor at the reference distance",
    )
    p_cal.add_argument(
        "--reference-distance", type=float, required=True,
        help="distance in meters at which that object fills the sensor",
    )
    p_cal.add_argument("--distance", type=float, required=True, help="safety distance in meters")
    p_cal.add_argument(
        "--hazard-size", type=float, default=None,
        help="smallest hazard extent in meters; enables the k_safe suggestion",
    )
    p_cal.add_argument("--focal-length", type=float, default=28.0, help="informational, mm")
    p_cal.set_defaults(func=cmd_calibrate)

    return parser


def _add_shared_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; absent keys take defaults")
    parser.add_argument("--alpha", help="override the density threshold (decimal string)")
    parser.add_argument("--k-safe", type=int, dest="k_safe", help="override the smallest filter side")
    parser.add_argument(
        "--no-region-filter", action="store_true", help="disable critical-region suppression"
    )
    parser.add_argument(
        "--no-edge-filter", action="store_true", help="disable edge-error suppression"
    )
    parser.add_argument(
        "--profile", action="store_true",
        help="bookkeep the full density profile and quantitative metrics",
    )


def _resolve_config(args: argparse.Namespace) -> tuple[SafetyConfig, PaletteMapping | None]:
    if args.config:
        cfg, palette = load_config_document(args.config)
    else:
        cfg, palette = SafetyConfig(), None
    if args.alpha is not None:
        cfg = replace(cfg, alpha=parse_fraction(args.alpha, "--alpha"))
    if args.k_safe is not None:
        cfg = replace(cfg, k_safe=args.k_safe)
    return cfg, palette


def _load_pair(pred_path: str, gt_path: str, palette: PaletteMapping | None):
    pred = load_label_map(pred_path, palette)
    gt = load_label_map(gt_path, palette)
    universe = max(pred.num_classes, gt.num_classes)
    return pred.widen(universe), gt.widen(universe)


def _evaluate_pair(
    pred_path: str, gt_path: str, cfg: SafetyConfig,
    palette: PaletteMapping | None, args: argparse.Namespace,
) -> PipelineArtifacts:
    pred, gt = _load_pair(pred_path, gt_path, palette)
    inputs = {"pred": pred_path, "gt": gt_path}
    if args.config:
        inputs["config"] = args.config
    return evaluate(
        pred,
        gt,
        cfg,
        region_filter=not args.no_region_filter,
        edge_filter=not args.no_edge_filter,
        profile=args.profile,
        inputs=inputs,
    )


def cmd_eval(args: argparse.Namespace) -> int:
    cfg, palette = _resolve_config(args)
    artifacts = _evaluate_pair(args.pred, args.gt, cfg, palette, args)
    report = artifacts.report

    if args.out:
        emit_report(report, args.out)
        print(f"{report.scan.verdict} pcm={report.pcm:.6f} report={args.out}")
    else:
        print(json.dumps(report_to_dict(report), indent=2))

    if args.viz_dir:
        viz_dir = Path(args.viz_dir)
        panels = emit_overlays(
            artifacts.pred,
            artifacts.gt,
            artifacts.errors_original,
            artifacts.errors_after_region,
            artifacts.errors_edge_filtered,
            artifacts.errors_filtered,
            report.scan,
            out_dir=viz_dir,
            input_image=args.image,
        )
        render_summary_figure(panels, viz_dir / "summary.png", report.scan.verdict, report.pcm)
        if report.scan.density_profile is not None:
            render_profile_plot(report.scan.density_profile, cfg.alpha, viz_dir / "density_profile.png")
            write_profile_csv(report.scan.density_profile, viz_dir / "density_profile.csv")

    return 1 if report.scan.unsafe else 0


def _parse_manifest(path: str) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SegsafeError(f"{path}:{lineno}: expected 'pred gt', got {raw!r}")
        pairs.append((parts[0], parts[1]))
    if not pairs:
        raise SegsafeError(f"{path}: manifest lists no prediction/ground-truth pairs")
    return pairs


def cmd_batch(args: argparse.Namespace) -> int:
    if args.jobs < 1:
        raise SegsafeError(f"--jobs must be >= 1, got {args.jobs}")
    cfg, palette = _resolve_config(args)
    pairs = _parse_manifest(args.manifest)
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    def run_one(job: tuple[int, tuple[str, str]]) -> dict[str, Any]:
        index, (pred_path, gt_path) = job
        row: dict[str, Any] = {"index": index, "pred": pred_path, "gt": gt_path}
        try:
            artifacts = _evaluate_pair(pred_path, gt_path, cfg, palette, args)
        except (SegsafeError, OSError) as exc:
            if args.strict:
                raise
            row.update(status="failed", error=str(exc))
            return row
        report = artifacts.report
        row.update(status="ok", verdict=report.scan.verdict, pcm=report.pcm)
        if out_dir:
            report_path = out_dir / f"{index:04d}_{Path(pred_path).stem}.json"
            emit_report(report, report_path)
            row["report"] = report_path.name
        return row

    if args.jobs == 1:
        rows = [run_one(job) for job in enumerate(pairs)]
    else:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(run_one, enumerate(pairs)))  # order preserved

    ok_rows = [row for row in rows if row["status"] == "ok"]
    n_unsafe = sum(1 for row in ok_rows if row["verdict"] == "unsafe")
    n_failed = len(rows) - len(ok_rows)
    aggregate = {
        "n_images": len(rows),
        "n_unsafe": n_unsafe,
        "n_failed": n_failed,
        "mean_pcm": (sum(row["pcm"] for row in ok_rows) / len(ok_rows)) if ok_rows else None,
        "images": rows,
    }
    text = json.dumps(aggregate, indent=2)
    if out_dir:
        (out_dir / "aggregate.json").write_text(text + "\n", encoding="utf-8")
        write_batch_csv(rows, out_dir / "summary.csv")
        print(
            f"{len(rows)} images, {n_unsafe} unsafe, {n_failed} failed; "
            f"results in {out_dir}"
        )
    else:
        print(text)
    if n_unsafe:
        return 1
    if n_failed:
        return 2
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    geom = CameraGeometry(
        focal_length=args.focal_length,
        sensor_pixels_height=args.sensor_pixels,
        reference_object_height=args.object_height,
        reference_distance=args.reference_distance,
    )
    extent = pixel_extent(geom, args.distance)
    print(f"distance_m={args.distance}")
    print(f"pixel_extent_m={extent:.12g}")
    if args.hazard_size is not None:
        print(f"k_safe={calibrate_k_safe(geom, args.distance, args.hazard_size)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SegsafeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    raise SystemExit(main())

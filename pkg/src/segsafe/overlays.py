"""Overlay rasters and summary figures.

The seven numbered panels mirror the stages of an evaluation: labels,
raw disagreement, what each suppression step leaves behind, and the
offending window when the verdict is unsafe. Panels are exact-pixel
lossless PNGs (one image pixel per map cell) so tests and downstream
tools can read results back; the matplotlib summary montage and the
density-profile plot are presentation extras rendered next to them.
"""

from __future__ import annotations

import colorsys
import shutil
from fractions import Fraction
from pathlib import Path
from typing import Mapping

import numpy as np
from matplotlib.figure import Figure
from PIL import Image

from .errors import DimensionMismatchError
from .types import ErrorMap, LabelMap, ScanOutcome

__all__ = [
    "BACKGROUND_RGB",
    "ERROR_RGB",
    "MARKER_RGB",
    "class_palette",
    "label_to_rgb",
    "errors_to_rgb",
    "marker_panel",
    "emit_overlays",
    "render_summary_figure",
    "render_profile_plot",
]

BACKGROUND_RGB = (0, 0, 0)
ERROR_RGB = (255, 0, 0)
MARKER_RGB = (255, 255, 0)

_GOLDEN_RATIO_CONJUGATE = 0.6180339887498949


def class_palette(num_classes: int) -> np.ndarray:
    """Deterministic class-id -> RGB table (index 0 unused; ids are 1-based)."""
    table = np.zeros((num_classes + 1, 3), dtype=np.uint8)
    for class_id in range(1, num_classes + 1):
        hue = ((class_id - 1) * _GOLDEN_RATIO_CONJUGATE) % 1.0
        r, g, b = colorsys.hsv_to_rgb(hue, 0.65, 0.95)
        table[class_id] = (int(r * 255), int(g * 255), int(b * 255))
    return table


def label_to_rgb(labels: LabelMap) -> np.ndarray:
    return class_palette(labels.num_classes)[labels.data]


def errors_to_rgb(errors: ErrorMap) -> np.ndarray:
    rgb = np.empty((errors.height, errors.width, 3), dtype=np.uint8)
    rgb[:] = BACKGROUND_RGB
    rgb[errors.data] = ERROR_RGB
    return rgb


def marker_panel(filtered: ErrorMap, scan: ScanOutcome) -> np.ndarray:
    """Filtered errors with the offending window outlined when unsafe."""
    rgb = errors_to_rgb(filtered)
    window = scan.offending_window
    if window is not None:
        top, left = window.row, window.col
        bottom, right = top + window.size - 1, left + window.size - 1
        rgb[top, left : right + 1] = MARKER_RGB
        rgb[bottom, left : right + 1] = MARKER_RGB
        rgb[top : bottom + 1, left] = MARKER_RGB
        rgb[top : bottom + 1, right] = MARKER_RGB
    return rgb


def _save(rgb: np.ndarray, path: Path) -> Path:
    Image.fromarray(rgb, mode="RGB").save(path, format="PNG")
    return path


def emit_overlays(
    pred: LabelMap,
    gt: LabelMap,
    errors_original: ErrorMap,
    errors_after_region: ErrorMap,
    errors_edge_filtered: ErrorMap,
    errors_filtered: ErrorMap,
    scan: ScanOutcome,
    out_dir: str | Path,
    input_image: str | Path | None = None,
) -> list[Path]:
    """Write the panel rasters into out_dir; returns paths in panel order.

    Panel 1 (the camera image) is a passthrough copy emitted only when the
    caller supplies one; the metrics never need it.
    """
    shapes = {
        pred.data.shape,
        gt.data.shape,
        errors_original.data.shape,
        errors_after_region.data.shape,
        errors_edge_filtered.data.shape,
        errors_filtered.data.shape,
    }
    if len(shapes) != 1:
        raise DimensionMismatchError(f"overlay inputs disagree on shape: {sorted(shapes)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    if input_image is not None:
        target = out_dir / ("1_input" + Path(input_image).suffix.lower())
        shutil.copyfile(input_image, target)
        paths.append(target)
    paths.append(_save(label_to_rgb(gt), out_dir / "2_ground_truth.png"))
    paths.append(_save(label_to_rgb(pred), out_dir / "3_prediction.png"))
    paths.append(_save(errors_to_rgb(errors_original), out_dir / "4_errors_original.png"))
    paths.append(_save(errors_to_rgb(errors_after_region), out_dir / "5_errors_critical_region.png"))
    paths.append(_save(errors_to_rgb(errors_edge_filtered), out_dir / "6_errors_edge_filtered.png"))
    paths.append(_save(errors_to_rgb(errors_filtered), out_dir / "7_errors_filtered.png"))
    paths.append(_save(marker_panel(errors_filtered, scan), out_dir / "8_unsafe_marker.png"))
    return paths


_PANEL_TITLES = [
    "ground truth",
    "prediction",
    "original errors",
    "critical-region errors",
    "edge-filtered errors",
    "filtered errors",
    "unsafe marker",
]


def render_summary_figure(
    panel_paths: list[Path],
    out_path: str | Path,
    verdict: str,
    pcm_value: float,
) -> Path:
    """Montage of the emitted panels with the verdict in the title."""
    numbered = sorted(p for p in panel_paths if p.stem[0].isdigit() and p.stem[0] != "1")
    fig = Figure(figsize=(16, 8))
    fig.suptitle(f"verdict: {verdict}   pcm: {pcm_value:.4f}", fontsize=14)
    for idx, path in enumerate(numbered):
        ax = fig.add_subplot(2, 4, idx + 1)
        ax.imshow(np.asarray(Image.open(path)), interpolation="nearest")
        title = _PANEL_TITLES[idx] if idx < len(_PANEL_TITLES) else path.stem
        ax.set_title(title, fontsize=10)
        ax.set_axis_off()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=110, bbox_inches="tight")
    return out_path


def render_profile_plot(
    profile: Mapping[int, Fraction],
    alpha: Fraction,
    out_path: str | Path,
) -> Path:
    """Max window error density against filter size, with the threshold line."""
    sizes = sorted(profile)
    densities = [float(profile[k]) for k in sizes]
    fig = Figure(figsize=(8, 5))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(sizes, densities, lw=1.5, color="#1f6fb4", label="max window density")
    ax.axhline(float(alpha), color="#c03030", ls="--", lw=1.2, label=f"alpha = {alpha}")
    ax.set_xlabel("filter size k")
    ax.set_ylabel("max error density")
    ax.set_ylim(0, 1.02)
    ax.legend(loc="upper right")
    ax.grid(alpha=0.3)
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=110, bbox_inches="tight")
    return out_path

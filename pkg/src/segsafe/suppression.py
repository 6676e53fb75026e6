"""Error suppression ahead of the density scan.

Step 1 drops errors outside the critical region; step 2 drops errors that
are tolerable as edge imprecision. Both steps only ever clear errors and
decide each cell from (position, pred, gt) alone, so they are idempotent
and their sequential composition equals their intersection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import ConfigError, DimensionMismatchError
from .types import ErrorMap, FractionalRegion, LabelMap, Rect, SafetyConfig

__all__ = [
    "SuppressionStats",
    "resolve_critical_region",
    "suppress_outside_region",
    "edge_correct_labels",
    "suppress_edge_errors",
]

_NEIGHBOR_OFFSETS = [(di, dj) for di, dj in product((-1, 0, 1), repeat=2) if (di, dj) != (0, 0)]


@dataclass(frozen=True)
class SuppressionStats:
    step1_suppressed: int
    step2_suppressed: int


def _round_half_up(value: Fraction) -> int:
    # Exact; Fraction arithmetic avoids float edge cases at .5 boundaries.
    return int(value + Fraction(1, 2))


def resolve_critical_region(cfg: SafetyConfig, width: int, height: int) -> Rect:
    """Bind the configured critical region to a concrete pixel rectangle.

    Fractional regions are anchored at the bottom edge and centered
    horizontally; extents round half-up. Explicit rectangles pass through
    after a bounds check.
    """
    region = cfg.critical_region
    if isinstance(region, Rect):
        if region.top < 0 or region.left < 0 or region.bottom >= height or region.right >= width:
            raise ConfigError(
                f"critical region {region} exceeds image bounds {height}x{width}"
            )
        return region
    assert isinstance(region, FractionalRegion)
    region_height = _round_half_up(region.vertical * height)
    region_width = _round_half_up(region.horizontal * width)
    if region_height < 1 or region_width < 1:
        raise ConfigError(
            f"critical region fractions {region.vertical}x{region.horizontal} "
            f"resolve to zero area on a {height}x{width} image"
        )
    top = height - region_height
    left = (width - region_width) // 2
    return Rect(top=top, left=left, bottom=height - 1, right=left + region_width - 1)


def suppress_outside_region(errors: ErrorMap, region: Rect) -> ErrorMap:
    """Clear every error that falls outside the critical region."""
    if region.top < 0 or region.left < 0 or region.bottom >= errors.height or region.right >= errors.width:
        raise ConfigError(
            f"region {region} exceeds error map bounds {errors.height}x{errors.width}"
        )
    kept = np.zeros_like(errors.data)
    kept[region.top : region.bottom + 1, region.left : region.right + 1] = True
    return ErrorMap(errors.data & kept)


def edge_correct_labels(gt: LabelMap, i: int, j: int) -> frozenset[int]:
    """Distinct ground-truth classes in the 3x3 patch centered at (i, j).

    The patch is truncated at image borders; no padding classes are ever
    invented.
    """
    if not (0 <= i < gt.height and 0 <= j < gt.width):
        raise IndexError(f"pixel ({i}, {j}) outside {gt.height}x{gt.width} map")
    patch = gt.data[max(0, i - 1) : i + 2, max(0, j - 1) : j + 2]
    return frozenset(int(c) for c in np.unique(patch))


def _neighbor_slices(shape: tuple[int, int], di: int, dj: int):
    h, w = shape
    center = (slice(max(0, -di), h - max(0, di)), slice(max(0, -dj), w - max(0, dj)))
    neighbor = (slice(max(0, di), h - max(0, -di)), slice(max(0, dj), w - max(0, -dj)))
    return center, neighbor


def suppress_edge_errors(errors: ErrorMap, pred: LabelMap, gt: LabelMap) -> ErrorMap:
    """Clear errors tolerable as edge imprecision.

    An error at (i, j) is cleared iff the ground truth puts (i, j) on a
    class boundary (some 8-neighbor differs) and the predicted class
    occurs somewhere in the ground-truth 3x3 patch around (i, j). Edges
    are read from the ground truth only, never from the prediction.
    """
    if not (errors.data.shape == pred.data.shape == gt.data.shape):
        raise DimensionMismatchError(
            f"shapes differ: errors {errors.data.shape}, pred {pred.data.shape}, "
            f"gt {gt.data.shape}"
        )
    on_edge = np.zeros(gt.data.shape, dtype=bool)
    pred_in_patch = pred.data == gt.data  # center of the patch counts
    for di, dj in _NEIGHBOR_OFFSETS:
        center, neighbor = _neighbor_slices(gt.data.shape, di, dj)
        on_edge[center] |= gt.data[neighbor] != gt.data[center]
        pred_in_patch[center] |= gt.data[neighbor] == pred.data[center]
    tolerated = errors.data & on_edge & pred_in_patch
    return ErrorMap(errors.data & ~tolerated)

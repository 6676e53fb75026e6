"""Core domain types and the two primitive grid operations.

Grids are stored as read-only numpy arrays indexed ``[row, col]``; class
identifiers are 1-based. All types are immutable after construction and
safe to share across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import ConfigError, DimensionMismatchError, SegsafeError

__all__ = [
    "LabelMap",
    "ScoreVolume",
    "ErrorMap",
    "Rect",
    "FractionalRegion",
    "SafetyConfig",
    "Window",
    "ScanOutcome",
    "QuantitativeMetrics",
    "CameraGeometry",
    "EvaluationReport",
    "argmax_prediction",
    "error_map",
]


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class LabelMap:
    """Per-pixel class assignment: integers in [1, num_classes], row-major."""

    data: np.ndarray
    num_classes: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.ndim != 2 or arr.size == 0:
            raise SegsafeError(f"label map must be a non-empty 2D grid, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise SegsafeError(f"label map values must be integers, got dtype {arr.dtype}")
        if self.num_classes < 1:
            raise SegsafeError(f"num_classes must be >= 1, got {self.num_classes}")
        lo, hi = int(arr.min()), int(arr.max())
        if lo < 1 or hi > self.num_classes:
            raise SegsafeError(
                f"class ids must lie in [1, {self.num_classes}], found range [{lo}, {hi}]"
            )
        object.__setattr__(self, "data", _freeze(arr.astype(np.int32, copy=True)))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def widen(self, num_classes: int) -> "LabelMap":
        """Same pixels under a larger class universe."""
        if num_classes < self.num_classes:
            raise SegsafeError(
                f"cannot shrink num_classes from {self.num_classes} to {num_classes}"
            )
        return LabelMap(self.data, num_classes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelMap):
            return NotImplemented
        return self.num_classes == other.num_classes and np.array_equal(self.data, other.data)


@dataclass(frozen=True)
class ScoreVolume:
    """Per-pixel activation vector, one real value per class."""

    scores: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.scores, dtype=np.float64)
        if arr.ndim != 3 or arr.size == 0:
            raise SegsafeError(
                f"score volume must have shape (height, width, num_classes), got {arr.shape}"
            )
        if not np.isfinite(arr).all():
            raise SegsafeError("score volume contains non-finite values")
        object.__setattr__(self, "scores", _freeze(arr))

    @property
    def height(self) -> int:
        return self.scores.shape[0]

    @property
    def width(self) -> int:
        return self.scores.shape[1]

    @property
    def num_classes(self) -> int:
        return self.scores.shape[2]


@dataclass(frozen=True)
class ErrorMap:
    """Boolean grid; True marks a pixel that counts as an error."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.ndim != 2 or arr.size == 0:
            raise SegsafeError(f"error map must be a non-empty 2D grid, got shape {arr.shape}")
        object.__setattr__(self, "data", _freeze(arr.astype(bool, copy=True)))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def count(self) -> int:
        return int(self.data.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ErrorMap):
            return NotImplemented
        return np.array_equal(self.data, other.data)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned pixel rectangle with inclusive bounds."""

    top: int
    left: int
    bottom: int
    right: int

    def __post_init__(self) -> None:
        if self.top > self.bottom or self.left > self.right:
            raise ConfigError(f"degenerate rectangle {self}")

    @property
    def height(self) -> int:
        return self.bottom - self.top + 1

    @property
    def width(self) -> int:
        return self.right - self.left + 1


@dataclass(frozen=True)
class FractionalRegion:
    """Bottom-center anchored region given as fractions of the image extent."""

    vertical: Fraction
    horizontal: Fraction

    def __post_init__(self) -> None:
        for name, value in (("vertical", self.vertical), ("horizontal", self.horizontal)):
            if not isinstance(value, Fraction):
                object.__setattr__(self, name, Fraction(str(value)))
        for name in ("vertical", "horizontal"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ConfigError(f"{name} region fraction must be in (0, 1], got {value}")


DEFAULT_REGION = FractionalRegion(Fraction(7, 10), Fraction(3, 5))


@dataclass(frozen=True)
class SafetyConfig:
    """Parameters of the safety analysis.

    alpha is held as an exact rational so density comparisons at the
    threshold never suffer float rounding; k_safe is the smallest filter
    side considered hazard-sized. The critical region is either fractional
    (anchored bottom-center) or an explicit pixel rectangle.
    """

    alpha: Fraction = Fraction(1, 2)
    k_safe: int = 20
    critical_region: FractionalRegion | Rect = DEFAULT_REGION
    ignore_labels: frozenset[int] = frozenset()
    outside_region_policy: str = "suppress"

    def __post_init__(self) -> None:
        if not isinstance(self.alpha, Fraction):
            object.__setattr__(self, "alpha", Fraction(str(self.alpha)))
        if not 0 < self.alpha <= 1:
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.k_safe < 1:
            raise ConfigError(f"k_safe must be >= 1, got {self.k_safe}")
        if self.outside_region_policy not in ("suppress", "keep"):
            raise ConfigError(
                f"outside_region_policy must be 'suppress' or 'keep', "
                f"got {self.outside_region_policy!r}"
            )
        object.__setattr__(self, "ignore_labels", frozenset(self.ignore_labels))


@dataclass(frozen=True)
class Window:
    """A concrete k-by-k window and the error count observed in it."""

    row: int
    col: int
    size: int
    count: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.count, self.size * self.size)


@dataclass(frozen=True)
class ScanOutcome:
    """Result of the dense-cluster scan.

    trace lists every (filter size, max window error count) pair visited,
    in visit order; the sizes decrease strictly. offending_window is set
    exactly when the verdict is unsafe.
    """

    verdict: str
    offending_window: Window | None
    trace: tuple[tuple[int, int], ...]
    density_profile: Mapping[int, Fraction] | None = None

    def __post_init__(self) -> None:
        if self.verdict not in ("safe", "unsafe"):
            raise SegsafeError(f"verdict must be 'safe' or 'unsafe', got {self.verdict!r}")
        if (self.verdict == "unsafe") != (self.offending_window is not None):
            raise SegsafeError("offending_window must be present iff verdict is unsafe")
        object.__setattr__(self, "trace", tuple((int(k), int(c)) for k, c in self.trace))

    @property
    def unsafe(self) -> bool:
        return self.verdict == "unsafe"


@dataclass(frozen=True)
class QuantitativeMetrics:
    """Severity extensions: largest violating filter side and peak density."""

    max_unsafe_k: int | None
    max_density: Fraction


@dataclass(frozen=True)
class CameraGeometry:
    """Pinhole-camera quantities used to back-project pixels to meters."""

    focal_length: float
    sensor_pixels_height: int
    reference_object_height: float
    reference_distance: float

    def __post_init__(self) -> None:
        for name in (
            "focal_length",
            "sensor_pixels_height",
            "reference_object_height",
            "reference_distance",
        ):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class EvaluationReport:
    """Everything one evaluation produces, ready for serialization."""

    pcm: float
    suppressed_step1: int
    suppressed_step2: int
    residual_errors: int
    scan: ScanOutcome
    quantitative: QuantitativeMetrics | None = None
    inputs: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", dict(self.inputs))

    @property
    def original_errors(self) -> int:
        return self.suppressed_step1 + self.suppressed_step2 + self.residual_errors


def argmax_prediction(scores: ScoreVolume) -> LabelMap:
    """Collapse a score volume to the 1-based class of each pixel's maximum.

    Ties resolve to the smallest class index, so the result is fully
    deterministic.
    """
    labels = np.argmax(scores.scores, axis=2).astype(np.int32) + 1
    return LabelMap(labels, scores.num_classes)


def error_map(
    pred: LabelMap, gt: LabelMap, ignore_labels: frozenset[int] | set[int] = frozenset()
) -> ErrorMap:
    """Mark pixels where the prediction disagrees with the ground truth.

    Pixels whose ground-truth class is in ignore_labels never count as
    errors, whatever the prediction says.
    """
    if pred.data.shape != gt.data.shape:
        raise DimensionMismatchError(
            f"prediction is {pred.data.shape}, ground truth is {gt.data.shape}"
        )
    if pred.num_classes != gt.num_classes:
        raise DimensionMismatchError(
            f"prediction has {pred.num_classes} classes, ground truth has {gt.num_classes}"
        )
    errors = pred.data != gt.data
    if ignore_labels:
        errors &= ~np.isin(gt.data, list(ignore_labels))
    return ErrorMap(errors)

"""Safety-aware evaluation of semantic-segmentation predictions.

Beyond plain pixel accuracy, the verdict depends on where errors fall and
how densely they cluster: errors outside the critical region and tolerable
edge imprecision are suppressed, then square windows of every relevant
size are scanned for error densities at or above a threshold.
"""

from .density import (
    WindowStatistics,
    calibrate_k_safe,
    density_profile,
    max_window_errors,
    min_filter_bound,
    oracle_scan,
    pixel_extent,
    qualitative_scan,
    quantitative_metrics,
    summed_area_table,
)
from .errors import (
    ConfigError,
    DimensionMismatchError,
    MaskFormatError,
    SegsafeError,
    UndefinedMetricError,
)
from .masks import PaletteMapping, load_label_map, save_label_map
from .metrics import pcm, prm
from .overlays import emit_overlays, render_profile_plot, render_summary_figure
from .pipeline import PipelineArtifacts, evaluate
from .report import emit_report, load_report, report_from_dict, report_to_dict
from .suppression import (
    SuppressionStats,
    edge_correct_labels,
    resolve_critical_region,
    suppress_edge_errors,
    suppress_outside_region,
)
from .types import (
    CameraGeometry,
    ErrorMap,
    EvaluationReport,
    FractionalRegion,
    LabelMap,
    QuantitativeMetrics,
    Rect,
    SafetyConfig,
    ScanOutcome,
    ScoreVolume,
    Window,
    argmax_prediction,
    error_map,
)
from .config import load_config, load_config_document

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # types
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
    "WindowStatistics",
    "SuppressionStats",
    "PaletteMapping",
    "PipelineArtifacts",
    # errors
    "SegsafeError",
    "DimensionMismatchError",
    "UndefinedMetricError",
    "ConfigError",
    "MaskFormatError",
    # operations
    "argmax_prediction",
    "error_map",
    "pcm",
    "prm",
    "resolve_critical_region",
    "suppress_outside_region",
    "edge_correct_labels",
    "suppress_edge_errors",
    "summed_area_table",
    "max_window_errors",
    "min_filter_bound",
    "qualitative_scan",
    "density_profile",
    "quantitative_metrics",
    "oracle_scan",
    "pixel_extent",
    "calibrate_k_safe",
    "evaluate",
    # io
    "load_label_map",
    "save_label_map",
    "load_config",
    "load_config_document",
    "emit_report",
    "load_report",
    "report_to_dict",
    "report_from_dict",
    "emit_overlays",
    "render_summary_figure",
    "render_profile_plot",
]

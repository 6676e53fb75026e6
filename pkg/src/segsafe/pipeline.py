"""End-to-end evaluation of one prediction/ground-truth pair.

Order is fixed: disagreement map, critical-region suppression, edge
suppression, density scan. Both suppression steps decide each cell
independently of the others, so the per-step views kept for the overlay
panels compose exactly into the filtered map the scan sees.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from .density import density_profile, qualitative_scan
from .metrics import pcm
from .suppression import (
    SuppressionStats,
    resolve_critical_region,
    suppress_edge_errors,
    suppress_outside_region,
)
from .types import (
    ErrorMap,
    EvaluationReport,
    LabelMap,
    QuantitativeMetrics,
    Rect,
    SafetyConfig,
    error_map,
)

__all__ = ["PipelineArtifacts", "evaluate"]


@dataclass(frozen=True)
class PipelineArtifacts:
    """Report plus the inputs and intermediate maps the overlay panels need."""

    report: EvaluationReport
    pred: LabelMap
    gt: LabelMap
    region: Rect
    errors_original: ErrorMap
    errors_after_region: ErrorMap
    errors_edge_filtered: ErrorMap
    errors_filtered: ErrorMap


def evaluate(
    pred: LabelMap,
    gt: LabelMap,
    cfg: SafetyConfig,
    *,
    region_filter: bool = True,
    edge_filter: bool = True,
    profile: bool = False,
    inputs: Mapping[str, str] | None = None,
) -> PipelineArtifacts:
    """Run the full evaluation; set profile=True for the quantitative extras.

    region_filter/edge_filter disable suppression steps 1/2 entirely;
    step 1 is also skipped when the config's outside_region_policy is
    "keep".
    """
    original = error_map(pred, gt, cfg.ignore_labels)
    region = resolve_critical_region(cfg, gt.width, gt.height)

    step1_active = region_filter and cfg.outside_region_policy == "suppress"
    after_region = suppress_outside_region(original, region) if step1_active else original
    if edge_filter:
        edge_only = suppress_edge_errors(original, pred, gt)
        filtered = suppress_edge_errors(after_region, pred, gt) if step1_active else edge_only
    else:
        edge_only = original
        filtered = after_region

    scan = qualitative_scan(filtered, cfg)
    quantitative: QuantitativeMetrics | None = None
    if profile:
        densities = density_profile(filtered, cfg)
        scan = replace(scan, density_profile=densities)
        unsafe_sizes = [k for k, d in densities.items() if d >= cfg.alpha]
        quantitative = QuantitativeMetrics(
            max_unsafe_k=max(unsafe_sizes) if unsafe_sizes else None,
            max_density=max(densities.values()),
        )

    stats = SuppressionStats(
        step1_suppressed=original.count - after_region.count,
        step2_suppressed=after_region.count - filtered.count,
    )
    report = EvaluationReport(
        pcm=pcm(pred, gt),
        suppressed_step1=stats.step1_suppressed,
        suppressed_step2=stats.step2_suppressed,
        residual_errors=filtered.count,
        scan=scan,
        quantitative=quantitative,
        inputs=dict(inputs or {}),
    )
    return PipelineArtifacts(
        report=report,
        pred=pred,
        gt=gt,
        region=region,
        errors_original=original,
        errors_after_region=after_region,
        errors_edge_filtered=edge_only,
        errors_filtered=filtered,
    )

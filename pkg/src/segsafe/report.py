"""Report serialization.

Reports are JSON; every density is written both as an exact fraction
string ("8/25") and as a decimal convenience value. The fraction is the
authoritative field: it keeps the alpha-boundary auditable after the
fact. Parsing a report back yields a structurally equal EvaluationReport.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .errors import SegsafeError
from .types import EvaluationReport, QuantitativeMetrics, ScanOutcome, Window

__all__ = [
    "report_to_dict",
    "report_from_dict",
    "emit_report",
    "load_report",
    "write_profile_csv",
    "write_batch_csv",
]


def _frac(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _parse_frac(text: str, name: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SegsafeError(f"report field {name}: bad fraction {text!r}") from exc


def _window_to_dict(window: Window) -> dict[str, Any]:
    return {
        "row": window.row,
        "col": window.col,
        "k": window.size,
        "count": window.count,
        "density_frac": _frac(window.density),
        "density": float(window.density),
    }


def _window_from_dict(doc: Mapping[str, Any]) -> Window:
    window = Window(
        row=int(doc["row"]), col=int(doc["col"]), size=int(doc["k"]), count=int(doc["count"])
    )
    stated = _parse_frac(doc["density_frac"], "offending_window.density_frac")
    if stated != window.density:
        raise SegsafeError(
            f"offending window density {stated} inconsistent with count/k ({window.density})"
        )
    return window


def report_to_dict(report: EvaluationReport) -> dict[str, Any]:
    scan = report.scan
    doc: dict[str, Any] = {
        "inputs": dict(report.inputs),
        "pcm": report.pcm,
        "suppression": {
            "step1": report.suppressed_step1,
            "step2": report.suppressed_step2,
            "residual": report.residual_errors,
        },
        "scan": {
            "verdict": scan.verdict,
            "offending_window": (
                _window_to_dict(scan.offending_window) if scan.offending_window else None
            ),
            "trace": [{"k": k, "max_count": c} for k, c in scan.trace],
        },
    }
    if report.quantitative is not None:
        quant = report.quantitative
        doc["quantitative"] = {
            "max_unsafe_k": quant.max_unsafe_k,
            "max_density_frac": _frac(quant.max_density),
            "max_density": float(quant.max_density),
        }
    if scan.density_profile is not None:
        doc["profile"] = {
            str(k): {"density_frac": _frac(d), "density": float(d)}
            for k, d in scan.density_profile.items()
        }
    return doc


def report_from_dict(doc: Mapping[str, Any]) -> EvaluationReport:
    try:
        scan_doc = doc["scan"]
        window_doc = scan_doc.get("offending_window")
        profile = None
        if "profile" in doc:
            profile = {
                int(k): _parse_frac(entry["density_frac"], f"profile[{k}]")
                for k, entry in doc["profile"].items()
            }
        scan = ScanOutcome(
            verdict=scan_doc["verdict"],
            offending_window=_window_from_dict(window_doc) if window_doc else None,
            trace=tuple((int(t["k"]), int(t["max_count"])) for t in scan_doc["trace"]),
            density_profile=profile,
        )
        quantitative = None
        if "quantitative" in doc:
            quant_doc = doc["quantitative"]
            max_k = quant_doc["max_unsafe_k"]
            quantitative = QuantitativeMetrics(
                max_unsafe_k=int(max_k) if max_k is not None else None,
                max_density=_parse_frac(quant_doc["max_density_frac"], "max_density_frac"),
            )
        suppression = doc["suppression"]
        return EvaluationReport(
            pcm=float(doc["pcm"]),
            suppressed_step1=int(suppression["step1"]),
            suppressed_step2=int(suppression["step2"]),
            residual_errors=int(suppression["residual"]),
            scan=scan,
            quantitative=quantitative,
            inputs=dict(doc.get("inputs", {})),
        )
    except (KeyError, TypeError) as exc:
        raise SegsafeError(f"malformed report document: {exc}") from exc


def emit_report(report: EvaluationReport, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8")
    return path


def load_report(path: str | Path) -> EvaluationReport:
    return report_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_profile_csv(profile: Mapping[int, Fraction], path: str | Path) -> Path:
    """Density profile as delimited rows: one filter size per line."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["k", "max_density", "max_density_frac"])
        for k in sorted(profile):
            writer.writerow([k, float(profile[k]), _frac(profile[k])])
    return path


def write_batch_csv(rows: list[dict[str, Any]], path: str | Path) -> Path:
    """Per-image batch summary as delimited rows, in manifest order."""
    path = Path(path)
    fields = ["index", "pred", "gt", "status", "verdict", "pcm", "error"]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({field: row.get(field, "") for field in fields})
    return path

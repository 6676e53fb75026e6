"""Configuration documents.

A config is a JSON key-value document; every key is optional and absent
keys take the defaults of SafetyConfig (alpha 1/2, k_safe 20, bottom-center
region of 0.7 x 0.6, suppress outside the region, no ignored labels). An
empty file is a valid all-defaults config. Unknown keys are rejected: a
typo must not silently change a safety verdict.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .masks import PaletteMapping
from .types import FractionalRegion, Rect, SafetyConfig

__all__ = ["load_config", "load_config_document", "parse_config"]

_KNOWN_KEYS = {
    "alpha",
    "k_safe",
    "critical_region",
    "outside_region_policy",
    "ignore_labels",
    "palette",
}


def parse_fraction(value: Any, name: str) -> Fraction:
    """Parse a decimal string (preferred), integer, or float into an exact rational."""
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be a number or decimal string, got {value!r}")
    try:
        if isinstance(value, str):
            return Fraction(value)
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{name}: cannot parse {value!r} as a rational ({exc})") from exc
    raise ConfigError(f"{name} must be a number or decimal string, got {type(value).__name__}")


def _parse_int(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return value


def _parse_region(doc: Any) -> FractionalRegion | Rect:
    if not isinstance(doc, dict):
        raise ConfigError(f"critical_region must be an object, got {type(doc).__name__}")
    mode = doc.get("mode", "fractions")
    if mode == "fractions":
        extra = set(doc) - {"mode", "vfrac", "hfrac"}
        if extra:
            raise ConfigError(f"unknown critical_region keys: {sorted(extra)}")
        return FractionalRegion(
            vertical=parse_fraction(doc.get("vfrac", "0.7"), "critical_region.vfrac"),
            horizontal=parse_fraction(doc.get("hfrac", "0.6"), "critical_region.hfrac"),
        )
    if mode == "rect":
        extra = set(doc) - {"mode", "top", "left", "bottom", "right"}
        if extra:
            raise ConfigError(f"unknown critical_region keys: {sorted(extra)}")
        try:
            return Rect(
                top=_parse_int(doc["top"], "critical_region.top"),
                left=_parse_int(doc["left"], "critical_region.left"),
                bottom=_parse_int(doc["bottom"], "critical_region.bottom"),
                right=_parse_int(doc["right"], "critical_region.right"),
            )
        except KeyError as exc:
            raise ConfigError(f"critical_region rect is missing key {exc}") from exc
    raise ConfigError(f"critical_region.mode must be 'fractions' or 'rect', got {mode!r}")


def _parse_palette(doc: Any) -> PaletteMapping:
    if not isinstance(doc, list):
        raise ConfigError(f"palette must be a list of mappings, got {type(doc).__name__}")
    entries: list[tuple[Any, int]] = []
    default = None
    for item in doc:
        if not isinstance(item, dict):
            raise ConfigError(f"palette entry must be an object, got {item!r}")
        if "default" in item:
            if set(item) != {"default"}:
                raise ConfigError(f"default palette entry takes no other keys: {item!r}")
            default = _parse_int(item["default"], "palette default")
            continue
        if "class" not in item:
            raise ConfigError(f"palette entry needs a 'class': {item!r}")
        class_id = _parse_int(item["class"], "palette class")
        if "value" in item:
            entries.append((_parse_int(item["value"], "palette value"), class_id))
        elif "rgb" in item:
            rgb = item["rgb"]
            if not (isinstance(rgb, list) and len(rgb) == 3):
                raise ConfigError(f"palette rgb must be a 3-element list: {item!r}")
            entries.append((tuple(int(c) for c in rgb), class_id))
        else:
            raise ConfigError(f"palette entry needs 'value' or 'rgb': {item!r}")
    return PaletteMapping(entries=tuple(entries), default=default)


def parse_config(doc: dict[str, Any]) -> tuple[SafetyConfig, PaletteMapping | None]:
    """Validate a parsed JSON document into a SafetyConfig and optional palette."""
    if not isinstance(doc, dict):
        raise ConfigError(f"config root must be an object, got {type(doc).__name__}")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    kwargs: dict[str, Any] = {}
    if "alpha" in doc:
        kwargs["alpha"] = parse_fraction(doc["alpha"], "alpha")
    if "k_safe" in doc:
        kwargs["k_safe"] = _parse_int(doc["k_safe"], "k_safe")
    if "critical_region" in doc:
        kwargs["critical_region"] = _parse_region(doc["critical_region"])
    if "outside_region_policy" in doc:
        kwargs["outside_region_policy"] = doc["outside_region_policy"]
    if "ignore_labels" in doc:
        labels = doc["ignore_labels"]
        if not isinstance(labels, list):
            raise ConfigError("ignore_labels must be a list of integers")
        kwargs["ignore_labels"] = frozenset(
            _parse_int(v, "ignore_labels entry") for v in labels
        )
    palette = _parse_palette(doc["palette"]) if "palette" in doc else None
    return SafetyConfig(**kwargs), palette


def load_config_document(path: str | Path) -> tuple[SafetyConfig, PaletteMapping | None]:
    """Read a config file; empty or whitespace-only files mean all defaults."""
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        return SafetyConfig(), None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed config document ({exc})") from exc
    return parse_config(doc)


def load_config(path: str | Path) -> SafetyConfig:
    return load_config_document(path)[0]

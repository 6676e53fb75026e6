"""Label raster ingestion and emission.

Masks are lossless rasters: single-channel images carrying class ids
directly, or RGB images decoded through a palette mapping. A single
flipped pixel changes the metrics, so lossy codecs are never used.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import MaskFormatError
from .types import LabelMap

__all__ = ["PaletteMapping", "load_label_map", "save_label_map"]

RGBTriple = tuple[int, int, int]


@dataclass(frozen=True)
class PaletteMapping:
    """Maps raw raster values (integers or RGB triples) to 1-based class ids."""

    entries: tuple[tuple[int | RGBTriple, int], ...]
    default: int | None = None

    def __post_init__(self) -> None:
        normalized = []
        for key, class_id in self.entries:
            if isinstance(key, (list, tuple)):
                if len(key) != 3:
                    raise MaskFormatError(f"color key must have 3 channels, got {key}")
                key = (int(key[0]), int(key[1]), int(key[2]))
            else:
                key = int(key)
            if int(class_id) < 1:
                raise MaskFormatError(f"class id must be >= 1, got {class_id} for key {key}")
            normalized.append((key, int(class_id)))
        object.__setattr__(self, "entries", tuple(normalized))
        if self.default is not None and int(self.default) < 1:
            raise MaskFormatError(f"default class id must be >= 1, got {self.default}")

    @property
    def max_class(self) -> int:
        ids = [class_id for _, class_id in self.entries]
        if self.default is not None:
            ids.append(self.default)
        return max(ids, default=0)

    def value_table(self) -> dict[int, int]:
        return {key: cid for key, cid in self.entries if isinstance(key, int)}

    def color_table(self) -> dict[RGBTriple, int]:
        return {key: cid for key, cid in self.entries if isinstance(key, tuple)}


def _apply_table(raw: np.ndarray, table: dict, default: int | None, what: str) -> np.ndarray:
    uniques, inverse = np.unique(raw, return_inverse=True)
    lut = np.empty(len(uniques), dtype=np.int32)
    for idx, value in enumerate(uniques):
        mapped = table.get(int(value), default)
        if mapped is None:
            raise MaskFormatError(f"unmapped {what} {value} and no default class configured")
        lut[idx] = mapped
    return lut[inverse].reshape(raw.shape)


def _encode_rgb(rgb: np.ndarray) -> np.ndarray:
    packed = rgb.astype(np.int64)
    return (packed[..., 0] << 16) | (packed[..., 1] << 8) | packed[..., 2]


def load_label_map(
    path: str | Path,
    mapping: PaletteMapping | None = None,
    num_classes: int | None = None,
) -> LabelMap:
    """Read a mask file into a LabelMap.

    Single-channel rasters carry class ids as pixel values (optionally
    remapped through the palette); RGB rasters require a palette with
    color keys. Values outside the palette raise unless a default class
    is configured. num_classes defaults to the largest id seen (or the
    largest id the palette can produce, if one is given).
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            if mode in ("RGB", "RGBA"):
                raw = np.asarray(img.convert("RGB"))
            elif mode in ("L", "I", "I;16", "P", "1"):
                raw = np.asarray(img.convert("I") if mode == "I;16" else img)
            else:
                raise MaskFormatError(f"{path}: unsupported image mode {mode!r}")
    except (UnidentifiedImageError, OSError) as exc:
        raise MaskFormatError(f"{path}: cannot read mask ({exc})") from exc
    if raw.size == 0:
        raise MaskFormatError(f"{path}: zero-sized image")

    if raw.ndim == 3:
        if mapping is None or not mapping.color_table():
            raise MaskFormatError(f"{path}: RGB mask requires a palette with color entries")
        encoded = _encode_rgb(raw)
        table = {(r << 16) | (g << 8) | b: cid for (r, g, b), cid in mapping.color_table().items()}
        ids = _apply_table(encoded, table, mapping.default, "color")
    else:
        raw = raw.astype(np.int64)
        if mapping is not None and (mapping.value_table() or mapping.default is not None):
            ids = _apply_table(raw, mapping.value_table(), mapping.default, "pixel value")
        else:
            if raw.min() < 1:
                raise MaskFormatError(
                    f"{path}: pixel value {raw.min()} is not a valid 1-based class id; "
                    f"supply a palette mapping (or default) to translate it"
                )
            ids = raw.astype(np.int32)

    inferred = int(ids.max())
    if mapping is not None:
        inferred = max(inferred, mapping.max_class)
    if num_classes is None:
        num_classes = inferred
    elif num_classes < inferred:
        raise MaskFormatError(
            f"{path}: found class id up to {inferred}, exceeds declared num_classes={num_classes}"
        )
    return LabelMap(ids, num_classes)


def save_label_map(labels: LabelMap, path: str | Path) -> Path:
    """Write class ids as a lossless single-channel PNG (8- or 16-bit)."""
    path = Path(path)
    if labels.num_classes <= 255:
        img = Image.fromarray(labels.data.astype(np.uint8), mode="L")
    elif labels.num_classes <= 65535:
        img = Image.fromarray(labels.data.astype(np.uint16))
    else:
        raise MaskFormatError(f"cannot store {labels.num_classes} classes in a 16-bit raster")
    img.save(path, format="PNG")
    return path

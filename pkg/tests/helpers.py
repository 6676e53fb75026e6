"""Shared fixtures builders and naive reference implementations.

The naive functions are deliberately written as plain double loops so
they share no code with the production paths they check.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from segsafe import ErrorMap, LabelMap, SafetyConfig


def labels(rows, num_classes: int | None = None) -> LabelMap:
    arr = np.asarray(rows, dtype=np.int32)
    return LabelMap(arr, num_classes if num_classes is not None else int(arr.max()))


def errors(rows) -> ErrorMap:
    return ErrorMap(np.asarray(rows, dtype=bool))


def empty_errors(height: int, width: int) -> ErrorMap:
    return ErrorMap(np.zeros((height, width), dtype=bool))


def cfg(alpha: str = "0.5", k_safe: int = 2, **kwargs) -> SafetyConfig:
    return SafetyConfig(alpha=Fraction(alpha), k_safe=k_safe, **kwargs)


def random_errors(rng: np.random.Generator, height: int, width: int, density: float) -> ErrorMap:
    return ErrorMap(rng.random((height, width)) < density)


def naive_max_window(data: np.ndarray, k: int) -> tuple[int, tuple[int, int]]:
    """Brute force: sum every k-by-k window with explicit loops."""
    h, w = data.shape
    best, best_pos = -1, (0, 0)
    for i in range(h - k + 1):
        for j in range(w - k + 1):
            count = 0
            for di in range(k):
                for dj in range(k):
                    if data[i + di, j + dj]:
                        count += 1
            if count > best:
                best, best_pos = count, (i, j)
    return best, best_pos


def naive_rect_sum(data: np.ndarray, top: int, left: int, bottom: int, right: int) -> int:
    total = 0
    for i in range(top, bottom + 1):
        for j in range(left, right + 1):
            if data[i, j]:
                total += 1
    return total


def naive_profile(data: np.ndarray, k_safe: int) -> dict[int, Fraction]:
    limit = min(data.shape)
    return {
        k: Fraction(naive_max_window(data, k)[0], k * k) for k in range(k_safe, limit + 1)
    }


def naive_verdict(data: np.ndarray, alpha: Fraction, k_safe: int) -> str:
    for k in range(k_safe, min(data.shape) + 1):
        count, _ = naive_max_window(data, k)
        if Fraction(count, k * k) >= alpha:
            return "unsafe"
    return "safe"

"""Pixel-level correctness and robustness ratios."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import DimensionMismatchError, UndefinedMetricError
from .types import LabelMap

__all__ = ["pcm", "prm"]


def _check_shapes(pred: LabelMap, gt: LabelMap) -> None:
    if pred.data.shape != gt.data.shape:
        raise DimensionMismatchError(
            f"prediction is {pred.data.shape}, ground truth is {gt.data.shape}"
        )


def pcm(pred: LabelMap, gt: LabelMap) -> float:
    """Fraction of pixels predicted correctly, in [0, 1]."""
    _check_shapes(pred, gt)
    return float(np.count_nonzero(pred.data == gt.data)) / pred.data.size


def prm(pred: LabelMap, gt: LabelMap, perturbed_preds: Sequence[LabelMap]) -> float:
    """Worst-case fraction of correct pixels flipped to incorrect.

    Each entry of perturbed_preds is the network's prediction under one
    bounded input perturbation; producing those maps (the search over
    admissible perturbations) is the caller's job. Only correct-to-incorrect
    flips count: pixels that were already wrong cannot raise the ratio.
    """
    _check_shapes(pred, gt)
    if not perturbed_preds:
        raise UndefinedMetricError("prm needs at least one perturbed prediction map")
    correct = pred.data == gt.data
    n_correct = int(np.count_nonzero(correct))
    if n_correct == 0:
        raise UndefinedMetricError(
            "prm is undefined when the unperturbed prediction has no correct pixels"
        )
    worst = 0
    for perturbed in perturbed_preds:
        _check_shapes(perturbed, gt)
        flipped = int(np.count_nonzero(correct & (perturbed.data != gt.data)))
        worst = max(worst, flipped)
    return worst / n_correct

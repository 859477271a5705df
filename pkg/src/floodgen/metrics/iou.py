"""Intersection-over-union of binary masks (the physical-consistency submetric)."""

from __future__ import annotations

import numpy as np

from floodgen.types import BinaryMask, ValidationError


def iou(a: BinaryMask, b: BinaryMask) -> float:
    """|a AND b| / |a OR b|. Two empty masks agree perfectly -> 1.0."""
    if a.values.shape != b.values.shape:
        raise ValidationError(
            f"mask dims differ: {a.values.shape} vs {b.values.shape}")
    av = a.values.astype(bool)
    bv = b.values.astype(bool)
    union = int(np.count_nonzero(av | bv))
    if union == 0:
        return 1.0
    inter = int(np.count_nonzero(av & bv))
    return inter / union

"""Flood Visualization Plausibility Score.

Harmonic mean of the physical-consistency score (IoU) and the
photorealism score (1 - perceptual distance), both [0,1]-bounded, with
a small epsilon guarding the division. The score is ~0 whenever either
submetric is 0 and 1 only when both are perfect.
"""

from __future__ import annotations

from floodgen.types import ValidationError

DEFAULT_FVPS_EPS = 1e-6


def fvps(iou_val: float, lpips_val: float, eps: float = DEFAULT_FVPS_EPS) -> float:
    if not 0.0 <= iou_val <= 1.0:
        raise ValidationError(f"iou_val must be in [0,1], got {iou_val}")
    if not 0.0 <= lpips_val <= 1.0:
        raise ValidationError(f"lpips_val must be in [0,1], got {lpips_val}")
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    raw = 2.0 / (1.0 / (iou_val + eps) + 1.0 / (1.0 - lpips_val + eps))
    # the eps guard can push a perfect score marginally past 1
    return min(max(raw, 0.0), 1.0)

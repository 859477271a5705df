"""Deterministic reference generators.

The handcrafted compositor paints mask pixels a fixed flood brown on top
of the pre-event image; the reforestation variants paint one of two
greens. Replacement (not blending) keeps the output bit-exactly
checkable and lets exact color matching recover the mask.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from floodgen.data.masks import upsample_mask
from floodgen.types import BinaryMask, ImageTile, ValidationError


@dataclass(frozen=True)
class OverlayColor:
    r: int
    g: int
    b: int

    def __post_init__(self) -> None:
        for v in (self.r, self.g, self.b):
            if not 0 <= v <= 255:
                raise ValidationError(f"channel value {v} outside [0,255]")

    def as_float(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=np.float64) / 255.0

    @classmethod
    def from_hex(cls, text: str) -> "OverlayColor":
        from floodgen.io_utils import parse_hex_color
        return cls(*parse_hex_color(text))


FLOOD_BROWN = OverlayColor(0x99, 0x8D, 0x6F)  # #998d6f
GREEN_DARK = OverlayColor(33, 64, 61)
GREEN_LIGHT = OverlayColor(78, 116, 85)

GREEN_VARIANTS = {"dark": GREEN_DARK, "light": GREEN_LIGHT}


def handcrafted_composite(pre: ImageTile, mask: BinaryMask,
                          color: OverlayColor = FLOOD_BROWN) -> ImageTile:
    """Replace pre pixels with the overlay color wherever mask==1.

    Coarse masks are nearest-neighbor upsampled to the image grid first,
    which reproduces the characteristic pixelated look of low-resolution
    hazard-model extents.
    """
    target = (pre.height, pre.width)
    if mask.values.shape != target:
        if mask.values.shape[0] > target[0] or mask.values.shape[1] > target[1]:
            raise ValidationError(
                f"mask {mask.values.shape} larger than image {target}")
        mask = upsample_mask(mask, target)
    out = pre.pixels.copy()
    out[mask.values == 1] = color.as_float()
    return ImageTile(pixels=out, gsd_m_per_px=pre.gsd_m_per_px,
                     tile_id=pre.tile_id, event=pre.event,
                     acquisition=pre.acquisition)


def green_mask_composite(pre: ImageTile, mask: BinaryMask,
                         variant: str = "dark") -> ImageTile:
    if variant not in GREEN_VARIANTS:
        raise ValidationError(f"unknown green variant {variant!r}; "
                              f"choose from {sorted(GREEN_VARIANTS)}")
    return handcrafted_composite(pre, mask, GREEN_VARIANTS[variant])


def unconditioned_input(pre: ImageTile) -> np.ndarray:
    """Pass-through 3-channel model input for the no-physics configuration."""
    return pre.pixels.copy()


def color_match_mask(image: ImageTile, color: OverlayColor,
                     tolerance: float = 0.0) -> BinaryMask:
    """Segment an image by proximity to the overlay color.

    tolerance 0 means exact match (the synthetic-data oracle on
    compositor output); a positive tolerance accepts pixels within that
    Euclidean RGB distance, which is what evaluation of learned
    generators needs.
    """
    diff = np.linalg.norm(image.pixels - color.as_float(), axis=2)
    values = (diff <= tolerance).astype(np.uint8)
    return BinaryMask(values=values, gsd_m_per_px=image.gsd_m_per_px,
                      semantics="flood")

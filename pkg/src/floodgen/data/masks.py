"""Binary mask construction and resolution changes.

Masks move between the imagery grid (~0.5 m/px) and the hazard-model
grid (~30 m/px): coarse-graining uses per-block majority pooling,
upsampling is nearest-neighbor replication, and the two are mutually
inverse when the dimensions divide exactly.
"""

from __future__ import annotations

import numpy as np

from floodgen.types import BinaryMask, ImageTile, ValidationError


def binarize_mask(raster: np.ndarray, threshold: float = 0.5, *,
                  gsd_m_per_px: float = 0.5, semantics: str = "flood") -> BinaryMask:
    """Threshold a real-valued [0,1] raster: 1 where value >= threshold."""
    raster = np.asarray(raster, dtype=np.float64)
    if raster.ndim != 2:
        raise ValidationError(f"raster must be 2-D, got shape {raster.shape}")
    if np.isnan(raster).any():
        raise ValidationError("raster contains NaN pixels")
    if not 0.0 < threshold < 1.0:
        raise ValidationError(f"threshold must be in (0,1), got {threshold}")
    return BinaryMask(values=(raster >= threshold).astype(np.uint8),
                      gsd_m_per_px=gsd_m_per_px, semantics=semantics)


def coarse_grain_mask(mask: BinaryMask, target_gsd: float) -> BinaryMask:
    """Majority-pool a mask down to a coarser GSD.

    Block size = round(target_gsd / mask.gsd); each block becomes 1 iff
    the fraction of ones inside it is >= 0.5. Trailing partial blocks
    are pooled over their actual pixels, never dropped.
    """
    if target_gsd <= mask.gsd_m_per_px:
        raise ValidationError("target_gsd must exceed the mask's current GSD")
    block = int(round(target_gsd / mask.gsd_m_per_px))
    if block < 2:
        raise ValidationError("coarse-graining requires a block factor of at least 2")

    h, w = mask.values.shape
    out_h = (h + block - 1) // block
    out_w = (w + block - 1) // block

    # Integral image gives each block's popcount in O(1); partial blocks
    # normalize by their true pixel count.
    integral = np.zeros((h + 1, w + 1), dtype=np.int64)
    integral[1:, 1:] = mask.values.cumsum(0).cumsum(1)
    y0 = np.arange(out_h) * block
    y1 = np.minimum(y0 + block, h)
    x0 = np.arange(out_w) * block
    x1 = np.minimum(x0 + block, w)
    sums = (integral[np.ix_(y1, x1)] - integral[np.ix_(y0, x1)]
            - integral[np.ix_(y1, x0)] + integral[np.ix_(y0, x0)])
    counts = np.outer(y1 - y0, x1 - x0)
    out = (sums * 2 >= counts).astype(np.uint8)
    return BinaryMask(values=out, gsd_m_per_px=mask.gsd_m_per_px * block,
                      semantics=mask.semantics)


def upsample_mask(mask: BinaryMask, target_dims: tuple[int, int]) -> BinaryMask:
    """Nearest-neighbor replication up to target (h, w)."""
    th, tw = target_dims
    h, w = mask.values.shape
    if th < h or tw < w:
        raise ValidationError("target dims must be >= mask dims")
    rows = (np.arange(th) * h) // th
    cols = (np.arange(tw) * w) // tw
    out = mask.values[np.ix_(rows, cols)]
    scale = h / th  # assume isotropic; gsd tracks the vertical factor
    return BinaryMask(values=out, gsd_m_per_px=mask.gsd_m_per_px * scale,
                      semantics=mask.semantics)


def threshold_ice_mask(image: ImageTile) -> BinaryMask:
    """Ice/water mask from a grayscale threshold: only full-intensity
    white (all channels at 1.0) counts as ice."""
    gray = image.pixels.mean(axis=2)
    return BinaryMask(values=(gray >= 1.0).astype(np.uint8),
                      gsd_m_per_px=image.gsd_m_per_px, semantics="ice")


def reject_trivial_pair(mask: BinaryMask) -> bool:
    """True when the mask carries no information (all-zero or all-one)."""
    s = int(mask.values.sum())
    return s == 0 or s == mask.values.size

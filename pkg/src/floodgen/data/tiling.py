"""Cut large scenes into fixed-size training tiles."""

from __future__ import annotations

import numpy as np

from floodgen.types import ImageTile, ValidationError


def tile_scene(scene: np.ndarray, tile_px: int, overlap_px: int = 0, *,
               gsd_m_per_px: float = 0.5, scene_id: str = "scene",
               event: str = "synthetic") -> list[ImageTile]:
    """Slice a large HxWx3 raster into square tiles, row-major.

    Tiles step by ``tile_px - overlap_px``; trailing partial tiles are
    dropped so every output has identical shape. Tile ids encode the
    grid position as ``{scene_id}_r{row}_c{col}``.
    """
    scene = np.asarray(scene, dtype=np.float64)
    if scene.ndim != 3 or scene.shape[2] != 3:
        raise ValidationError(f"scene must be HxWx3, got {scene.shape}")
    h, w = scene.shape[:2]
    if tile_px <= 0:
        raise ValidationError("tile_px must be positive")
    if not 0 <= overlap_px < tile_px:
        raise ValidationError("overlap_px must satisfy 0 <= overlap_px < tile_px")
    if tile_px > h or tile_px > w:
        raise ValidationError(
            f"scene of {h}x{w} px is smaller than the requested {tile_px} px tile")

    stride = tile_px - overlap_px
    n_rows = (h - tile_px) // stride + 1
    n_cols = (w - tile_px) // stride + 1

    tiles = []
    for r in range(n_rows):
        for c in range(n_cols):
            y, x = r * stride, c * stride
            tiles.append(ImageTile(
                pixels=scene[y:y + tile_px, x:x + tile_px].copy(),
                gsd_m_per_px=gsd_m_per_px,
                tile_id=f"{scene_id}_r{r:03d}_c{c:03d}",
                event=event,
            ))
    return tiles

"""Montage rendering for qualitative inspection."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from floodgen.io_utils import to_uint8
from floodgen.types import ImageTile, ValidationError


def render_grid(images: list[ImageTile], path: str | Path, cols: int = 8,
                *, sample: int | None = None, seed: int = 0) -> Path:
    """Row-major montage; optionally sample `sample` tiles first
    (deterministic for a given seed)."""
    from PIL import Image

    if not images:
        raise ValidationError("render_grid needs at least one image")
    if sample is not None and sample < len(images):
        rng = np.random.default_rng(seed)
        idx = sorted(rng.choice(len(images), size=sample, replace=False))
        images = [images[i] for i in idx]

    cols = min(cols, len(images))
    rows = (len(images) + cols - 1) // cols
    h, w = images[0].height, images[0].width
    canvas = np.zeros((rows * h, cols * w, 3), dtype=np.uint8)
    for i, tile in enumerate(images):
        if (tile.height, tile.width) != (h, w):
            raise ValidationError("all grid tiles must share dimensions")
        r, c = divmod(i, cols)
        canvas[r * h:(r + 1) * h, c * w:(c + 1) * w] = to_uint8(tile.pixels)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(canvas, mode="RGB").save(path, format="PNG")
    return path


def grid_shape(n: int, cols: int = 8) -> tuple[int, int]:
    cols = min(cols, n)
    return ((n + cols - 1) // cols, cols)

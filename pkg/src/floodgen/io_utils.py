"""Lossless raster interchange: 8-bit PNG images, 1-bit PNG masks.

Internal representation is float [0,1]; 8-bit quantization round-trips
bit-exactly through save/load (value = byte/255).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from floodgen.types import BinaryMask, ImageTile


def to_uint8(pixels: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.asarray(pixels) * 255.0), 0, 255).astype(np.uint8)


def from_uint8(raw: np.ndarray) -> np.ndarray:
    return raw.astype(np.float64) / 255.0


def save_image(tile: ImageTile, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(to_uint8(tile.pixels), mode="RGB").save(path, format="PNG")


def load_image(path: str | Path, gsd_m_per_px: float = 0.5,
               tile_id: str | None = None, event: str = "synthetic") -> ImageTile:
    path = Path(path)
    img = Image.open(path).convert("RGB")
    return ImageTile(
        pixels=from_uint8(np.asarray(img)),
        gsd_m_per_px=gsd_m_per_px,
        tile_id=tile_id or path.stem,
        event=event,
    )


def save_mask(mask: BinaryMask, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(mask.values * 255, mode="L").convert("1").save(path, format="PNG")


def load_mask(path: str | Path, gsd_m_per_px: float = 0.5,
              semantics: str = "flood") -> BinaryMask:
    img = Image.open(path).convert("L")
    arr = (np.asarray(img) >= 128).astype(np.uint8)
    return BinaryMask(values=arr, gsd_m_per_px=gsd_m_per_px, semantics=semantics)


def parse_hex_color(text: str) -> tuple[int, int, int]:
    """Parse '#RRGGBB' into an (r, g, b) byte triple."""
    t = text.strip().lstrip("#")
    if len(t) != 6:
        raise ValueError(f"expected #RRGGBB hex color, got {text!r}")
    return tuple(int(t[i:i + 2], 16) for i in (0, 2, 4))  # type: ignore[return-value]

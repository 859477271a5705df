"""Procedural desk-scale stand-in for the proprietary flood triplets.

Pre-images are textured noise plus painted shapes drawn from a palette
kept well away from the flood-brown overlay color; masks are random
blobs; post-images come from the handcrafted compositor. Ground truth
is therefore recoverable by exact color match, which yields an oracle
segmenter for end-to-end tests.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from floodgen.baselines import FLOOD_BROWN, color_match_mask, handcrafted_composite
from floodgen.data.manifest import split_dataset
from floodgen.data.masks import reject_trivial_pair
from floodgen.io_utils import from_uint8, save_image, save_mask, to_uint8
from floodgen.types import BinaryMask, ImageTile, Manifest, TripletRecord, ValidationError

# minimum RGB distance every pre pixel keeps from the overlay color
SAFE_COLOR_MARGIN = 0.25
# tolerance used when segmenting learned generator output by color proximity
ORACLE_EVAL_TOLERANCE = 0.15


def _textured_field(rng: np.random.Generator, size: int) -> np.ndarray:
    field = np.zeros((size, size))
    for scale in (size / 4, size / 16):
        field += gaussian_filter(rng.standard_normal((size, size)), scale)
    field -= field.min()
    return field / max(field.max(), 1e-9)


def _random_pre(rng: np.random.Generator, size: int) -> np.ndarray:
    base = _textured_field(rng, size)
    # greenish/dark palette, red channel kept low
    r = 0.05 + 0.30 * base
    g = 0.25 + 0.55 * _textured_field(rng, size)
    b = 0.10 + 0.45 * _textured_field(rng, size)
    img = np.stack([r, g, b], axis=-1)

    for _ in range(rng.integers(2, 6)):
        cy, cx = rng.integers(0, size, 2)
        ry, rx = rng.integers(size // 16, size // 4, 2)
        yy, xx = np.ogrid[:size, :size]
        blob = ((yy - cy) / max(ry, 1)) ** 2 + ((xx - cx) / max(rx, 1)) ** 2 <= 1
        color = np.array([rng.uniform(0.0, 0.3), rng.uniform(0.3, 0.9),
                          rng.uniform(0.1, 0.6)])
        img[blob] = color

    img = np.clip(img, 0.0, 1.0)
    # push any pixel that strays near the overlay color back toward green
    brown = FLOOD_BROWN.as_float()
    near = np.linalg.norm(img - brown, axis=2) < SAFE_COLOR_MARGIN
    if near.any():
        img[near, 0] *= 0.4
        img[near, 1] = np.clip(img[near, 1] + 0.3, 0, 1)
    # quantize so the saved PNG round-trips to these exact values
    return from_uint8(to_uint8(img))


def _random_mask(rng: np.random.Generator, size: int) -> np.ndarray:
    for _ in range(16):
        field = gaussian_filter(rng.standard_normal((size, size)), size / 8)
        cut = np.quantile(field, rng.uniform(0.55, 0.8))
        vals = (field >= cut).astype(np.uint8)
        if 0.03 <= vals.mean() <= 0.9:
            return vals
    raise ValidationError("could not draw a non-trivial mask in 16 attempts")


def make_synthetic_dataset(n: int, size: int, seed: int,
                           out_dir: str | Path, *, test_frac: float = 0.25,
                           gsd_m_per_px: float = 0.5) -> Manifest:
    """Write n complete (pre, mask, post) triplets plus a manifest.

    Byte-identical output for identical arguments; every mask is
    non-trivial by construction.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    out_dir = Path(out_dir)
    records = []
    for i in range(n):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        tile_id = f"synthetic_{i:04d}"
        pre = ImageTile(pixels=_random_pre(rng, size), gsd_m_per_px=gsd_m_per_px,
                        tile_id=tile_id, event="synthetic")
        mask = BinaryMask(values=_random_mask(rng, size),
                          gsd_m_per_px=gsd_m_per_px, semantics="flood")
        assert not reject_trivial_pair(mask)
        post = handcrafted_composite(pre, mask, FLOOD_BROWN)

        pre_path = out_dir / "pre" / f"{tile_id}.png"
        mask_path = out_dir / "mask" / f"{tile_id}.png"
        post_path = out_dir / "post" / f"{tile_id}.png"
        save_image(pre, pre_path)
        save_mask(mask, mask_path)
        save_image(post, post_path)
        records.append(TripletRecord(
            tile_id=tile_id, pre_path=str(pre_path), mask_path=str(mask_path),
            post_path=str(post_path), event="synthetic",
            gsd_m_per_px=gsd_m_per_px))

    manifest = Manifest(records=records, dataset_name="synthetic")
    manifest = split_dataset(manifest, "random", seed=seed, test_frac=test_frac)
    manifest.save(out_dir / "manifest.jsonl")
    return manifest


def oracle_segmenter(tolerance: float = ORACLE_EVAL_TOLERANCE):
    """Color-proximity segmenter for synthetic data.

    tolerance=0 recovers ground truth exactly on compositor output;
    the default tolerance scores learned generators, whose flood pixels
    only approximate the overlay color. The pre-image palette keeps a
    SAFE_COLOR_MARGIN distance from the color, so any tolerance below
    that margin cannot false-positive on unflooded terrain.
    """
    def seg(image: ImageTile) -> BinaryMask:
        return color_match_mask(image, FLOOD_BROWN, tolerance)
    return seg

"""Joint augmentation of (pre, mask, post) triplets.

Geometric transforms (rotation, crop, flips, elastic warp, downscale)
are applied with identical parameters to all three rasters; every
geometric op resamples with nearest-neighbor so image/mask alignment is
exact and the mask stays binary. Photometric transforms (hue, contrast,
colorjitter) touch the two images only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter, map_coordinates

from floodgen.types import BinaryMask, ImageTile, ValidationError


@dataclass
class AugmentConfig:
    rotate_p: float = 0.0
    rotate_angles: tuple[float, ...] = (0.0, 90.0, 180.0, 270.0)
    crop_p: float = 0.0
    crop_px: int = 0
    hflip_p: float = 0.0
    vflip_p: float = 0.0
    elastic_p: float = 0.0
    elastic_grid: int = 4
    elastic_alpha: float = 34.0
    elastic_sigma: float = 4.0
    downscale_p: float = 0.0
    downscale_scale: float = 0.8
    hue_p: float = 0.0
    hue_max_deg: float = 30.0
    contrast_p: float = 0.0
    contrast_range: tuple[float, float] = (0.8, 1.2)
    colorjitter_p: float = 0.0
    brightness_range: tuple[float, float] = (0.9, 1.1)
    saturation_range: tuple[float, float] = (0.8, 1.2)

    @classmethod
    def flood_default(cls) -> "AugmentConfig":
        return cls(rotate_p=0.5, crop_p=0.5, crop_px=0, hue_p=0.3,
                   contrast_p=0.3, elastic_p=0.2)

    @classmethod
    def reforestation(cls) -> "AugmentConfig":
        # downscale to 0.8, h/v flips and colorjitter, each at p=0.67
        return cls(downscale_p=0.67, downscale_scale=0.8,
                   hflip_p=0.67, vflip_p=0.67, colorjitter_p=0.67)


# ---------------------------------------------------------------------------
# geometric primitives (shared coordinate maps, nearest resampling)

def rotate(arr: np.ndarray, angle_deg: float) -> np.ndarray:
    """Rotate about the center; right angles are exact grid permutations."""
    k = angle_deg / 90.0
    if abs(k - round(k)) < 1e-12:
        out = arr
        for axis_pair in range(int(round(k)) % 4):
            out = np.rot90(out, 1, axes=(0, 1))
        return out.copy()
    h, w = arr.shape[:2]
    theta = np.deg2rad(angle_deg)
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    # inverse map: rotate output coords by -theta
    ys = cy + (yy - cy) * np.cos(theta) - (xx - cx) * np.sin(theta)
    xs = cx + (yy - cy) * np.sin(theta) + (xx - cx) * np.cos(theta)
    return _sample_nearest(arr, ys, xs)


def _sample_nearest(arr: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    coords = np.stack([ys, xs])
    if arr.ndim == 2:
        return map_coordinates(arr, coords, order=0, mode="reflect")
    chans = [map_coordinates(arr[..., c], coords, order=0, mode="reflect")
             for c in range(arr.shape[2])]
    return np.stack(chans, axis=-1)


def crop(arr: np.ndarray, y0: int, x0: int, size: int) -> np.ndarray:
    return arr[y0:y0 + size, x0:x0 + size].copy()


def flip(arr: np.ndarray, horizontal: bool) -> np.ndarray:
    return np.flip(arr, axis=1 if horizontal else 0).copy()


def elastic_displacement(shape: tuple[int, int], grid: int, alpha: float,
                         sigma: float, rng: np.random.Generator
                         ) -> tuple[np.ndarray, np.ndarray]:
    h, w = shape
    coarse = rng.uniform(-1, 1, size=(2, grid, grid))
    rows = (np.arange(h) * grid) // h
    cols = (np.arange(w) * grid) // w
    dy = gaussian_filter(coarse[0][np.ix_(rows, cols)], sigma) * alpha
    dx = gaussian_filter(coarse[1][np.ix_(rows, cols)], sigma) * alpha
    return dy, dx


def elastic(arr: np.ndarray, dy: np.ndarray, dx: np.ndarray) -> np.ndarray:
    h, w = arr.shape[:2]
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    return _sample_nearest(arr, yy + dy, xx + dx)


def downscale(arr: np.ndarray, scale: float) -> np.ndarray:
    h, w = arr.shape[:2]
    nh, nw = max(1, int(round(h * scale))), max(1, int(round(w * scale)))
    ys = np.minimum(((np.arange(nh) + 0.5) / scale - 0.5).round().astype(int), h - 1)
    xs = np.minimum(((np.arange(nw) + 0.5) / scale - 0.5).round().astype(int), w - 1)
    ys, xs = np.maximum(ys, 0), np.maximum(xs, 0)
    return arr[np.ix_(ys, xs)].copy() if arr.ndim == 2 else arr[np.ix_(ys, xs)].copy()


# ---------------------------------------------------------------------------
# photometric primitives (images only)

_YIQ = np.array([[0.299, 0.587, 0.114],
                 [0.596, -0.274, -0.322],
                 [0.211, -0.523, 0.312]])
_YIQ_INV = np.linalg.inv(_YIQ)


def hue_shift(img: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate chroma in YIQ space; luminance is preserved."""
    theta = np.deg2rad(degrees)
    rot = np.array([[1, 0, 0],
                    [0, np.cos(theta), -np.sin(theta)],
                    [0, np.sin(theta), np.cos(theta)]])
    m = _YIQ_INV @ rot @ _YIQ
    return np.clip(img @ m.T, 0.0, 1.0)


def adjust_contrast(img: np.ndarray, factor: float) -> np.ndarray:
    return np.clip((img - 0.5) * factor + 0.5, 0.0, 1.0)


def adjust_brightness(img: np.ndarray, factor: float) -> np.ndarray:
    return np.clip(img * factor, 0.0, 1.0)


def adjust_saturation(img: np.ndarray, factor: float) -> np.ndarray:
    gray = img @ _YIQ[0]
    return np.clip(gray[..., None] + (img - gray[..., None]) * factor, 0.0, 1.0)


# ---------------------------------------------------------------------------

def derive_seed(global_seed: int, tile_id: str) -> int:
    """Stable per-record seed so parallel schedules stay byte-identical."""
    import zlib
    return int(np.random.SeedSequence(
        [int(global_seed), zlib.crc32(tile_id.encode())]).generate_state(1)[0])


def augment(pre: ImageTile, mask: BinaryMask, post: ImageTile,
            cfg: AugmentConfig, seed: int) -> tuple[ImageTile, BinaryMask, ImageTile]:
    if mask.values.shape != pre.pixels.shape[:2] or pre.pixels.shape != post.pixels.shape:
        raise ValidationError("pre, mask, post must share spatial dims")
    if cfg.crop_px and (cfg.crop_px > mask.height or cfg.crop_px > mask.width):
        raise ValidationError(
            f"crop of {cfg.crop_px} px exceeds tile dims {mask.height}x{mask.width}")
    rng = np.random.default_rng(seed)

    images = [pre.pixels.copy(), post.pixels.copy()]
    m = mask.values.copy()

    def geom(fn):
        nonlocal images, m
        images = [fn(im) for im in images]
        m = fn(m)

    if rng.random() < cfg.rotate_p:
        angle = float(rng.choice(cfg.rotate_angles))
        geom(lambda a: rotate(a, angle))
    if rng.random() < cfg.hflip_p:
        geom(lambda a: flip(a, horizontal=True))
    if rng.random() < cfg.vflip_p:
        geom(lambda a: flip(a, horizontal=False))
    if cfg.crop_px and rng.random() < cfg.crop_p:
        h, w = m.shape
        y0 = int(rng.integers(0, h - cfg.crop_px + 1))
        x0 = int(rng.integers(0, w - cfg.crop_px + 1))
        geom(lambda a: crop(a, y0, x0, cfg.crop_px))
    if rng.random() < cfg.elastic_p:
        dy, dx = elastic_displacement(m.shape, cfg.elastic_grid,
                                      cfg.elastic_alpha, cfg.elastic_sigma, rng)
        geom(lambda a: elastic(a, dy, dx))
    if rng.random() < cfg.downscale_p:
        geom(lambda a: downscale(a, cfg.downscale_scale))

    if rng.random() < cfg.hue_p:
        deg = float(rng.uniform(-cfg.hue_max_deg, cfg.hue_max_deg))
        images = [hue_shift(im, deg) for im in images]
    if rng.random() < cfg.contrast_p:
        f = float(rng.uniform(*cfg.contrast_range))
        images = [adjust_contrast(im, f) for im in images]
    if rng.random() < cfg.colorjitter_p:
        fb = float(rng.uniform(*cfg.brightness_range))
        fc = float(rng.uniform(*cfg.contrast_range))
        fs = float(rng.uniform(*cfg.saturation_range))
        deg = float(rng.uniform(-cfg.hue_max_deg, cfg.hue_max_deg))
        for fn in (lambda im: adjust_brightness(im, fb),
                   lambda im: adjust_contrast(im, fc),
                   lambda im: adjust_saturation(im, fs),
                   lambda im: hue_shift(im, deg)):
            images = [fn(im) for im in images]

    pre_out = ImageTile(pixels=images[0], gsd_m_per_px=pre.gsd_m_per_px,
                        tile_id=pre.tile_id, event=pre.event,
                        acquisition=pre.acquisition)
    post_out = ImageTile(pixels=images[1], gsd_m_per_px=post.gsd_m_per_px,
                         tile_id=post.tile_id, event=post.event,
                         acquisition=post.acquisition)
    mask_out = BinaryMask(values=m, gsd_m_per_px=mask.gsd_m_per_px,
                          semantics=mask.semantics)
    return pre_out, mask_out, post_out

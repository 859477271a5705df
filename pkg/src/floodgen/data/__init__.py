from floodgen.data.masks import (
    binarize_mask,
    coarse_grain_mask,
    reject_trivial_pair,
    threshold_ice_mask,
    upsample_mask,
)
from floodgen.data.tiling import tile_scene
from floodgen.data.manifest import build_manifest, split_dataset
from floodgen.data.augment import AugmentConfig, augment

__all__ = [
    "tile_scene",
    "binarize_mask",
    "coarse_grain_mask",
    "upsample_mask",
    "threshold_ice_mask",
    "reject_trivial_pair",
    "build_manifest",
    "split_dataset",
    "AugmentConfig",
    "augment",
]

import numpy as np
import pytest
import torch

from floodgen.metrics.perceptual import PerceptualDistance, create_calibration_checkpoint
from floodgen.types import BinaryMask, ImageTile

torch.set_num_threads(2)


@pytest.fixture(scope="session")
def backbone(tmp_path_factory):
    path = tmp_path_factory.mktemp("backbone") / "perceptual.pt"
    create_calibration_checkpoint(path, seed=0)
    return PerceptualDistance(path)


@pytest.fixture(scope="session")
def synthetic_dataset(tmp_path_factory):
    from floodgen.experiments.synthetic import make_synthetic_dataset

    out = tmp_path_factory.mktemp("syn")
    manifest = make_synthetic_dataset(12, 64, seed=7, out_dir=out)
    return manifest, out


def random_tile(rng, size=32, tile_id="t0"):
    return ImageTile(pixels=rng.random((size, size, 3)), gsd_m_per_px=0.5,
                     tile_id=tile_id)


def random_mask(rng, size=32):
    return BinaryMask(values=(rng.random((size, size)) < 0.4).astype(np.uint8),
                      gsd_m_per_px=0.5)

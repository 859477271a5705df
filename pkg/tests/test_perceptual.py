import numpy as np
import pytest

from floodgen.data.augment import hue_shift
from floodgen.metrics.perceptual import (
    PerceptualCheckpointError,
    PerceptualDistance,
    create_calibration_checkpoint,
)
from floodgen.types import ImageTile, ValidationError


def _tile(pixels, tid="t"):
    return ImageTile(pixels=pixels, gsd_m_per_px=0.5, tile_id=tid)


def test_missing_checkpoint_error_instructs(tmp_path):
    with pytest.raises(PerceptualCheckpointError, match="create_calibration_checkpoint"):
        PerceptualDistance(tmp_path / "nope.pt")


def test_identical_images_zero(backbone):
    rng = np.random.default_rng(0)
    a = _tile(rng.random((64, 64, 3)))
    assert backbone.distance(a, a) == 0.0


def test_symmetry(backbone):
    rng = np.random.default_rng(1)
    a = _tile(rng.random((64, 64, 3)))
    b = _tile(rng.random((64, 64, 3)))
    assert backbone.distance(a, b) == pytest.approx(backbone.distance(b, a), abs=1e-12)


def test_range_on_random_pairs(backbone):
    rng = np.random.default_rng(2)
    for _ in range(25):
        a = _tile(rng.random((64, 64, 3)))
        b = _tile(rng.random((64, 64, 3)))
        assert 0.0 <= backbone.distance(a, b) <= 1.0


def test_strong_hue_shift_beats_tiny_noise(backbone):
    rng = np.random.default_rng(3)
    base = rng.random((64, 64, 3))
    a = _tile(base)
    hue = _tile(hue_shift(base, 120.0))
    noisy = _tile(np.clip(base + rng.normal(0, 0.01, base.shape), 0, 1))
    assert backbone.distance(a, hue) > backbone.distance(a, noisy)


def test_deterministic_given_checkpoint(tmp_path):
    p = create_calibration_checkpoint(tmp_path / "b.pt", seed=4)
    m1 = PerceptualDistance(p)
    m2 = PerceptualDistance(p)
    rng = np.random.default_rng(5)
    a = _tile(rng.random((64, 64, 3)))
    b = _tile(rng.random((64, 64, 3)))
    assert m1.distance(a, b) == m2.distance(a, b)


def test_checkpoint_creation_deterministic(tmp_path):
    import torch
    p1 = create_calibration_checkpoint(tmp_path / "b1.pt", seed=7)
    p2 = create_calibration_checkpoint(tmp_path / "b2.pt", seed=7)
    s1 = torch.load(p1, weights_only=True)
    s2 = torch.load(p2, weights_only=True)
    assert all(torch.equal(s1[k], s2[k]) for k in s1)


def test_dim_mismatch_rejected(backbone):
    rng = np.random.default_rng(6)
    a = _tile(rng.random((64, 64, 3)))
    b = _tile(rng.random((128, 128, 3)))
    with pytest.raises(ValidationError):
        backbone.distance(a, b)

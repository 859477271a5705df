import numpy as np
import pytest

from floodgen.data.tiling import tile_scene
from floodgen.types import ValidationError


def _scene(h, w, seed=0):
    return np.random.default_rng(seed).random((h, w, 3))


def test_4800_scene_gives_4x4_grid():
    tiles = tile_scene(_scene(4800, 4800), 1024, 0)
    assert len(tiles) == 16
    assert all(t.pixels.shape == (1024, 1024, 3) for t in tiles)


def test_identity_tiling():
    scene = _scene(1024, 1024)
    tiles = tile_scene(scene, 1024, 0)
    assert len(tiles) == 1
    assert np.array_equal(tiles[0].pixels, scene)


def test_overlap_stride():
    tiles = tile_scene(_scene(2048, 2048), 1024, 512)
    assert len(tiles) == 9


def test_scene_smaller_than_tile_rejected():
    with pytest.raises(ValidationError, match="smaller"):
        tile_scene(_scene(512, 512), 1024, 0)


def test_tile_ids_encode_row_col():
    tiles = tile_scene(_scene(2048, 2048), 1024, 0, scene_id="s")
    assert [t.tile_id for t in tiles] == [
        "s_r000_c000", "s_r000_c001", "s_r001_c000", "s_r001_c001"]


def test_zero_overlap_partitions_covered_area():
    # every covered source pixel appears in exactly one tile
    scene = _scene(100, 70, seed=3)
    tiles = tile_scene(scene, 32, 0)
    count = np.zeros(scene.shape[:2], dtype=int)
    for t in tiles:
        r = int(t.tile_id.split("_r")[1].split("_c")[0])
        c = int(t.tile_id.split("_c")[1])
        count[r * 32:(r + 1) * 32, c * 32:(c + 1) * 32] += 1
        assert np.array_equal(t.pixels,
                              scene[r * 32:(r + 1) * 32, c * 32:(c + 1) * 32])
    covered = count[:96, :64]
    assert (covered == 1).all()
    assert (count[96:, :] == 0).all() and (count[:, 64:] == 0).all()

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floodgen.data.masks import (
    binarize_mask,
    coarse_grain_mask,
    reject_trivial_pair,
    threshold_ice_mask,
    upsample_mask,
)
from floodgen.types import BinaryMask, ImageTile, ValidationError


def mk(arr, gsd=0.5):
    return BinaryMask(values=np.asarray(arr, dtype=np.uint8), gsd_m_per_px=gsd)


def coarse_grain_oracle(values, block):
    """Independent block-counting reference for majority pooling."""
    h, w = values.shape
    oh, ow = -(-h // block), -(-w // block)
    out = np.zeros((oh, ow), dtype=np.uint8)
    for i in range(oh):
        for j in range(ow):
            blk = values[i * block:(i + 1) * block, j * block:(j + 1) * block]
            out[i, j] = 1 if blk.sum() * 2 >= blk.size else 0
    return out


class TestBinarize:
    def test_all_zero(self):
        assert binarize_mask(np.zeros((4, 4)), 0.5).values.sum() == 0

    def test_all_one(self):
        assert binarize_mask(np.ones((4, 4)), 0.5).values.sum() == 16

    def test_threshold_is_inclusive(self):
        out = binarize_mask(np.array([[0.4, 0.6]]), 0.5)
        assert out.values.tolist() == [[0, 1]]
        assert binarize_mask(np.array([[0.5]]), 0.5).values.tolist() == [[1]]

    def test_nan_rejected(self):
        with pytest.raises(ValidationError, match="NaN"):
            binarize_mask(np.array([[0.1, np.nan]]), 0.5)

    def test_bad_threshold(self):
        for t in (0.0, 1.0, -0.2):
            with pytest.raises(ValidationError):
                binarize_mask(np.zeros((2, 2)), t)


class TestCoarseGrain:
    def test_topleft_quadrant(self):
        vals = np.zeros((4, 4), dtype=np.uint8)
        vals[:2, :2] = 1
        out = coarse_grain_mask(mk(vals), 1.0)
        assert out.values.tolist() == [[1, 0], [0, 0]]
        assert out.gsd_m_per_px == pytest.approx(1.0)

    def test_all_one_stays_all_one(self):
        out = coarse_grain_mask(mk(np.ones((8, 8))), 2.0)
        assert (out.values == 1).all()

    def test_quarter_fraction_rounds_down(self):
        out = coarse_grain_mask(mk([[1, 0], [0, 0]]), 1.0)
        assert out.values.tolist() == [[0]]

    def test_partial_blocks_pooled(self):
        vals = np.ones((5, 5), dtype=np.uint8)
        out = coarse_grain_mask(mk(vals), 1.0)
        assert out.values.shape == (3, 3)
        assert (out.values == 1).all()

    def test_target_not_coarser_rejected(self):
        with pytest.raises(ValidationError):
            coarse_grain_mask(mk(np.zeros((4, 4))), 0.5)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(2, 5),
           st.integers(5, 33), st.integers(5, 33))
    def test_matches_block_counting_oracle(self, seed, block, h, w):
        rng = np.random.default_rng(seed)
        vals = (rng.random((h, w)) < rng.random()).astype(np.uint8)
        out = coarse_grain_mask(mk(vals), 0.5 * block)
        assert np.array_equal(out.values, coarse_grain_oracle(vals, block))


class TestUpsample:
    def test_single_pixel(self):
        out = upsample_mask(mk([[1]]), (4, 4))
        assert (out.values == 1).all()

    def test_nearest_neighbor_by_hand(self):
        out = upsample_mask(mk([[1, 0], [0, 0]]), (4, 4))
        expected = np.zeros((4, 4), dtype=np.uint8)
        expected[:2, :2] = 1
        assert np.array_equal(out.values, expected)

    def test_smaller_target_rejected(self):
        with pytest.raises(ValidationError):
            upsample_mask(mk(np.zeros((4, 4))), (2, 2))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(2, 6),
           st.integers(2, 12), st.integers(2, 12))
    def test_coarse_grain_inverts_upsample(self, seed, factor, h, w):
        rng = np.random.default_rng(seed)
        vals = (rng.random((h, w)) < 0.5).astype(np.uint8)
        m = mk(vals, gsd=0.5 * factor)
        up = upsample_mask(m, (h * factor, w * factor))
        back = coarse_grain_mask(up, m.gsd_m_per_px)
        assert np.array_equal(back.values, vals)

    def test_stays_binary(self):
        out = upsample_mask(mk([[1, 0], [0, 1]]), (7, 5))
        assert set(np.unique(out.values)) <= {0, 1}


class TestIceMask:
    def test_pure_white_is_ice(self):
        tile = ImageTile(pixels=np.ones((2, 2, 3)), gsd_m_per_px=30, tile_id="a",
                         event="arctic")
        assert (threshold_ice_mask(tile).values == 1).all()

    def test_near_white_is_not_ice(self):
        px = np.ones((1, 1, 3))
        px[0, 0, 0] = 254 / 255
        tile = ImageTile(pixels=px, gsd_m_per_px=30, tile_id="a", event="arctic")
        assert threshold_ice_mask(tile).values.tolist() == [[0]]

    def test_black_tile_all_zero(self):
        tile = ImageTile(pixels=np.zeros((3, 3, 3)), gsd_m_per_px=30, tile_id="a")
        assert threshold_ice_mask(tile).values.sum() == 0


class TestRejectTrivial:
    def test_all_zero_rejected(self):
        assert reject_trivial_pair(mk(np.zeros((4, 4))))

    def test_all_one_rejected(self):
        assert reject_trivial_pair(mk(np.ones((4, 4))))

    def test_mixed_kept(self):
        assert not reject_trivial_pair(mk([[1, 0], [0, 0]]))

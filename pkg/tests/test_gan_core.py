import numpy as np
import pytest
import torch

from floodgen.gan import (
    DiscriminatorConfig,
    GeneratorConfig,
    LogitPack,
    LossConfig,
    ModelCheckpoint,
    apply_spectral_norm,
    build_discriminator,
    build_generator,
    gan_losses,
    generator_forward,
    load_checkpoint,
    normalize_inputs,
    save_checkpoint,
)
from floodgen.gan.checkpoint import CheckpointMismatchError
from floodgen.types import BinaryMask, ImageTile, ValidationError

SMALL_GEN = GeneratorConfig(in_channels=4, base_width=8, n_downsample=2,
                            n_residual_blocks=1)
SMALL_DISC = DiscriminatorConfig(in_channels=7, n_scales=2, n_layers=2,
                                 base_width=8)


def _tile(size=64, seed=0, tid="t"):
    return ImageTile(pixels=np.random.default_rng(seed).random((size, size, 3)),
                     gsd_m_per_px=0.5, tile_id=tid)


def _mask(size=64, seed=1):
    return BinaryMask(
        values=(np.random.default_rng(seed).random((size, size)) < 0.5
                ).astype(np.uint8), gsd_m_per_px=0.5)


class TestGenerator:
    def test_shape_and_range(self):
        torch.manual_seed(0)
        gen = build_generator(SMALL_GEN)
        out = generator_forward(_tile(), _mask(), SMALL_GEN, gen.state_dict())
        assert out.pixels.shape == (64, 64, 3)
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 1.0

    def test_mask_required_when_conditioned(self):
        torch.manual_seed(0)
        gen = build_generator(SMALL_GEN)
        with pytest.raises(ValidationError, match="needs a mask"):
            generator_forward(_tile(), None, SMALL_GEN, gen.state_dict())

    def test_mask_rejected_when_unconditioned(self):
        cfg = GeneratorConfig(in_channels=3, base_width=8, n_downsample=2,
                              n_residual_blocks=1)
        gen = build_generator(cfg)
        with pytest.raises(ValidationError, match="takes no mask"):
            generator_forward(_tile(), _mask(), cfg, gen.state_dict())

    def test_inference_deterministic(self):
        torch.manual_seed(1)
        gen = build_generator(SMALL_GEN)
        a = generator_forward(_tile(), _mask(), SMALL_GEN, gen.state_dict())
        b = generator_forward(_tile(), _mask(), SMALL_GEN, gen.state_dict())
        assert np.array_equal(a.pixels, b.pixels)

    @pytest.mark.parametrize("size", [64, 128])
    def test_power_of_two_shape_contract(self, size):
        torch.manual_seed(2)
        gen = build_generator(SMALL_GEN)
        out = generator_forward(_tile(size), _mask(size), SMALL_GEN,
                                gen.state_dict())
        assert out.pixels.shape == (size, size, 3)

    def test_local_enhancer_preserves_shape(self):
        cfg = GeneratorConfig(in_channels=4, base_width=8, n_downsample=1,
                              n_residual_blocks=1, use_local_enhancer=True)
        torch.manual_seed(3)
        gen = build_generator(cfg)
        out = generator_forward(_tile(64), _mask(64), cfg, gen.state_dict())
        assert out.pixels.shape == (64, 64, 3)

    def test_normalize_inputs_ranges(self):
        x = normalize_inputs(_tile(), _mask(), 4)
        assert x.shape == (1, 4, 64, 64)
        assert x[:, :3].min() >= -1.0 and x[:, :3].max() <= 1.0
        assert set(x[:, 3].unique().tolist()) <= {-1.0, 1.0}

    def test_bad_in_channels(self):
        with pytest.raises(ValidationError):
            GeneratorConfig(in_channels=5)


class TestDiscriminator:
    def test_two_scales_and_downsampling(self):
        torch.manual_seed(0)
        disc = build_discriminator(SMALL_DISC)
        x = torch.randn(1, 7, 64, 64)
        logits, feats = disc(x)
        assert len(logits) == 2
        # each scale's logit map is spatially smaller than its input
        assert logits[0].shape[-1] < 64
        assert logits[1].shape[-1] < 32
        assert logits[1].shape[-1] < logits[0].shape[-1]

    def test_feature_list_length_matches_layers(self):
        disc = build_discriminator(SMALL_DISC)
        _, feats = disc(torch.randn(1, 7, 64, 64))
        assert all(len(f) == SMALL_DISC.n_layers for f in feats)

    def test_deterministic(self):
        torch.manual_seed(1)
        disc = build_discriminator(SMALL_DISC)
        x = torch.randn(1, 7, 64, 64)
        a, _ = disc(x)
        b, _ = disc(x)
        assert all(torch.equal(p, q) for p, q in zip(a, b))

    def test_channel_mismatch_rejected(self):
        disc = build_discriminator(SMALL_DISC)
        with pytest.raises(ValidationError, match="channels"):
            disc(torch.randn(1, 6, 64, 64))


class TestSpectralNorm:
    def test_toggle_and_idempotence(self):
        cfg = apply_spectral_norm(SMALL_DISC)
        assert cfg.use_spectral_norm
        assert apply_spectral_norm(cfg) == cfg
        assert not SMALL_DISC.use_spectral_norm  # original untouched

    def test_normalized_weights_have_unit_sigma(self):
        torch.manual_seed(0)
        disc = build_discriminator(apply_spectral_norm(SMALL_DISC))
        # power-iteration state converges over a few forward passes
        x = torch.randn(1, 7, 64, 64)
        for _ in range(20):
            disc(x)
        for name, module in disc.named_modules():
            w = getattr(module, "weight", None)
            if w is None or not name:
                continue
            if not hasattr(module, "weight_orig"):
                continue
            sigma = _power_iteration_sigma(w.detach())
            assert 0.9 <= sigma <= 1.1, f"{name}: sigma={sigma}"

    def test_disabled_leaves_weights_untouched(self):
        torch.manual_seed(0)
        disc = build_discriminator(SMALL_DISC)
        assert not any(hasattr(m, "weight_orig") for m in disc.modules())


def _power_iteration_sigma(weight: torch.Tensor, iters: int = 200) -> float:
    """Independent top-singular-value estimate of the flattened weight."""
    mat = weight.reshape(weight.shape[0], -1).double()
    v = torch.randn(mat.shape[1], dtype=torch.float64,
                    generator=torch.Generator().manual_seed(0))
    v /= v.norm()
    for _ in range(iters):
        u = mat @ v
        u /= u.norm()
        v = mat.t() @ u
        v /= v.norm()
    return float((mat @ v).norm())


class TestLosses:
    def _packs(self, real_val=None, fake_val=None, seed=0, with_features=True):
        g = torch.Generator().manual_seed(seed)
        def lg(val):
            if val is None:
                return torch.randn(1, 1, 6, 6, generator=g)
            return torch.full((1, 1, 6, 6), float(val))
        feats_r = [[torch.randn(1, 4, 8, 8, generator=g) for _ in range(2)]
                   for _ in range(2)] if with_features else []
        feats_f = [[f.clone() for f in fs] for fs in feats_r]
        return (LogitPack([lg(real_val), lg(real_val)], feats_r),
                LogitPack([lg(fake_val), lg(fake_val)], feats_f))

    def test_equal_features_zero_fm_term(self):
        real, fake = self._packs(0.5, 0.5)
        out = gan_losses(real, fake, LossConfig())
        assert float(out["components"]["g_feature_matching"]) == 0.0

    def test_perfect_discriminator_zero_loss(self):
        real, fake = self._packs(1.0, 0.0)
        out = gan_losses(real, fake, LossConfig())
        assert float(out["discriminator_loss"]) == 0.0

    def test_relativistic_identical_logits_closed_form(self):
        # identical constant real/fake logits -> relativistic logits all 0,
        # so D loss = 0.5 * ((0-1)^2 + (0-0)^2) = 0.5 and G adv = (0-1)^2 = 1
        real, fake = self._packs(0.7, 0.7)
        out = gan_losses(real, fake, LossConfig(adversarial="relativistic",
                                                feature_matching_weight=0.0))
        assert float(out["discriminator_loss"]) == pytest.approx(0.5)
        assert float(out["generator_loss"]) == pytest.approx(1.0)

    def test_fm_weight_scales_generator_loss(self):
        real, fake = self._packs(0.5, 0.5, seed=3)
        for fs in fake.features:
            for i in range(len(fs)):
                fs[i] = fs[i] + 0.1
        no_fm = gan_losses(real, fake, LossConfig(feature_matching_weight=0.0))
        with_fm = gan_losses(real, fake, LossConfig(feature_matching_weight=10.0))
        fm = float(with_fm["components"]["g_feature_matching"])
        assert fm == pytest.approx(0.1, abs=1e-6)
        assert float(with_fm["generator_loss"]) == pytest.approx(
            float(no_fm["generator_loss"]) + 10.0 * fm, abs=1e-5)

    def test_shape_mismatch_rejected(self):
        real, fake = self._packs(0.5, 0.5)
        fake.logits[0] = torch.zeros(1, 1, 3, 3)
        with pytest.raises(ValidationError):
            gan_losses(real, fake, LossConfig())

    def test_bad_mode_rejected(self):
        with pytest.raises(ValidationError):
            LossConfig(adversarial="wasserstein")


class TestGradientFlow:
    def test_generator_gradients_match_finite_differences(self):
        torch.manual_seed(0)
        gcfg = GeneratorConfig(in_channels=4, base_width=4, n_downsample=1,
                               n_residual_blocks=1)
        dcfg = DiscriminatorConfig(in_channels=7, n_scales=1, n_layers=2,
                                   base_width=4)
        gen = build_generator(gcfg).double()
        disc = build_discriminator(dcfg).double()
        loss_cfg = LossConfig(feature_matching_weight=10.0)
        x = normalize_inputs(_tile(64, seed=5), _mask(64, seed=6), 4).double()
        y_real = torch.rand(1, 3, 64, 64, dtype=torch.float64) * 2 - 1

        def g_loss():
            y_fake = gen(x)
            r_lg, r_ft = disc(torch.cat([x, y_real], dim=1))
            f_lg, f_ft = disc(torch.cat([x, y_fake], dim=1))
            out = gan_losses(LogitPack([t.detach() for t in r_lg], r_ft),
                             LogitPack(f_lg, f_ft), loss_cfg)
            return out["generator_loss"]

        loss = g_loss()
        params = [p for p in gen.parameters() if p.requires_grad]
        grads = torch.autograd.grad(loss, params)

        rng = np.random.default_rng(0)
        flat = [(pi, tuple(idx)) for pi, p in enumerate(params)
                for idx in [np.unravel_index(rng.integers(p.numel()), p.shape)]]
        checked = 0
        picks = rng.choice(len(flat), size=10, replace=False)
        h = 1e-5
        for k in picks:
            pi, idx = flat[k]
            p = params[pi]
            orig = p.data[idx].item()
            with torch.no_grad():
                p.data[idx] = orig + h
                lp = float(g_loss())
                p.data[idx] = orig - h
                lm = float(g_loss())
                p.data[idx] = orig
            fd = (lp - lm) / (2 * h)
            an = float(grads[pi][idx])
            denom = max(abs(fd), abs(an), 1e-8)
            assert abs(fd - an) / denom < 1e-3, (pi, idx, fd, an)
            checked += 1
        assert checked == 10


class TestCheckpoint:
    def test_roundtrip_and_mismatch(self, tmp_path):
        torch.manual_seed(0)
        gen = build_generator(SMALL_GEN)
        disc = build_discriminator(SMALL_DISC)
        configs = {"generator": SMALL_GEN, "discriminator": SMALL_DISC,
                   "loss": LossConfig()}
        h = save_checkpoint(tmp_path / "c.pt",
                            weights={"generator": gen.state_dict(),
                                     "discriminator": disc.state_dict()},
                            configs=configs, dataset_fingerprint="abc", epoch=7)
        ckpt = load_checkpoint(tmp_path / "c.pt", expected_configs=configs)
        assert isinstance(ckpt, ModelCheckpoint)
        assert ckpt.epoch == 7 and ckpt.config_hash == h
        assert ckpt.dataset_fingerprint == "abc"

        other = {"generator": GeneratorConfig(in_channels=3, base_width=8),
                 "discriminator": SMALL_DISC, "loss": LossConfig()}
        with pytest.raises(CheckpointMismatchError, match="force"):
            load_checkpoint(tmp_path / "c.pt", expected_configs=other)
        forced = load_checkpoint(tmp_path / "c.pt", expected_configs=other,
                                 force=True)
        assert forced.epoch == 7

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_checkpoint(tmp_path / "missing.pt")

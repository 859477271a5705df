"""Adversarial training loop with periodic, resumable checkpoints."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

from floodgen.data.augment import augment, derive_seed
from floodgen.experiments.config import GAN_MODELS, Preset, RunConfig, get_preset
from floodgen.gan.checkpoint import load_checkpoint, save_checkpoint
from floodgen.gan.discriminator import build_discriminator
from floodgen.gan.generator import build_generator, normalize_inputs
from floodgen.gan.losses import LogitPack, gan_losses
from floodgen.io_utils import load_image, load_mask
from floodgen.types import Manifest, ValidationError


def dataset_fingerprint(manifest: Manifest) -> str:
    h = hashlib.sha256()
    for r in manifest.records:
        h.update(f"{r.tile_id}|{r.split}|{r.event}".encode())
    return h.hexdigest()[:16]


def _load_triplets(manifest: Manifest, split: str):
    out = []
    for r in manifest.subset(split):
        pre = load_image(r.pre_path, r.gsd_m_per_px, r.tile_id, r.event)
        mask = load_mask(r.mask_path, r.gsd_m_per_px)
        post = load_image(r.post_path, r.gsd_m_per_px, r.tile_id, r.event)
        out.append((r.tile_id, pre, mask, post))
    return out


def _batch_tensors(samples, conditioned: bool):
    xs, ys = [], []
    for _, pre, mask, post in samples:
        xs.append(normalize_inputs(pre, mask if conditioned else None,
                                   4 if conditioned else 3).squeeze(0))
        ys.append(normalize_inputs(post, None, 3).squeeze(0))
    return torch.stack(xs), torch.stack(ys)


def train(cfg: RunConfig, out_dir: str | Path, *,
          resume_from: str | Path | None = None,
          perceptual_model=None,
          log_every: int = 0) -> Path:
    """Run the configured GAN training; returns the final checkpoint path.

    Alternates discriminator and generator updates, checkpoints every
    cfg.checkpoint_every epochs (optimizer and RNG state included so a
    resumed run replays the original step sequence exactly), and logs
    per-epoch losses to metrics.jsonl.
    """
    if cfg.model not in GAN_MODELS:
        raise ValidationError(
            f"model {cfg.model!r}: baselines are not trainable")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg.save(out_dir / "run_config.json")

    conditioned = cfg.model == "gan_physics"
    preset = get_preset(cfg.preset, conditioned=conditioned)
    manifest = Manifest.load(cfg.dataset)
    fingerprint = dataset_fingerprint(manifest)
    triplets = _load_triplets(manifest, "train")
    if not triplets:
        raise ValidationError("manifest has no train split")

    torch.manual_seed(cfg.seed)
    gen = build_generator(preset.generator)
    disc = build_discriminator(preset.discriminator)
    g_opt = torch.optim.Adam(gen.parameters(), lr=preset.lr, betas=preset.betas)
    d_opt = torch.optim.Adam(disc.parameters(), lr=preset.lr, betas=preset.betas)
    rng = np.random.default_rng(cfg.seed)
    start_epoch = 0

    # only architecture/loss configs go into the compatibility hash; run
    # settings like epoch count may legitimately change across a resume
    configs = {"generator": preset.generator, "discriminator": preset.discriminator,
               "loss": preset.loss}

    if resume_from is not None:
        ckpt = load_checkpoint(resume_from, expected_configs=configs)
        gen.load_state_dict(ckpt.weights["generator"])
        disc.load_state_dict(ckpt.weights["discriminator"])
        g_opt.load_state_dict(ckpt.extra["g_opt"])
        d_opt.load_state_dict(ckpt.extra["d_opt"])
        torch.set_rng_state(ckpt.extra["torch_rng"])
        rng.bit_generator.state = json.loads(ckpt.extra["np_rng"])
        start_epoch = ckpt.epoch

    use_augment = any(getattr(cfg.augment, f) > 0 for f in
                      ("rotate_p", "crop_p", "hflip_p", "vflip_p", "elastic_p",
                       "downscale_p", "hue_p", "contrast_p", "colorjitter_p"))

    metrics_path = out_dir / "metrics.jsonl"
    log_f = open(metrics_path, "a")
    ckpt_path = out_dir / "checkpoint.pt"

    def save(epoch: int) -> None:
        save_checkpoint(
            ckpt_path,
            weights={"generator": gen.state_dict(),
                     "discriminator": disc.state_dict()},
            configs=configs,
            dataset_fingerprint=fingerprint,
            epoch=epoch,
            extra={"model": cfg.model, "preset": cfg.preset,
                   "g_opt": g_opt.state_dict(), "d_opt": d_opt.state_dict(),
                   "torch_rng": torch.get_rng_state(),
                   "np_rng": json.dumps(rng.bit_generator.state)},
        )

    n = len(triplets)
    bs = preset.batch_size
    for epoch in range(start_epoch, cfg.epochs):
        order = rng.permutation(n)
        g_losses, d_losses, l1s = [], [], []
        for b0 in range(0, n, bs):
            idx = order[b0:b0 + bs]
            samples = []
            for i in idx:
                tid, pre, mask, post = triplets[i]
                if use_augment:
                    seed = derive_seed(cfg.seed + epoch, tid)
                    pre, mask, post = augment(pre, mask, post, cfg.augment, seed)
                samples.append((tid, pre, mask, post))
            x, y_real = _batch_tensors(samples, conditioned)

            y_fake = gen(x)

            # discriminator step
            d_real_lg, d_real_ft = disc(torch.cat([x, y_real], dim=1))
            d_fake_lg, d_fake_ft = disc(torch.cat([x, y_fake.detach()], dim=1))
            d_out = gan_losses(LogitPack(d_real_lg, d_real_ft),
                               LogitPack(d_fake_lg, d_fake_ft), preset.loss)
            d_opt.zero_grad()
            d_out["discriminator_loss"].backward()
            d_opt.step()

            # generator step (fresh discriminator pass after its update)
            g_real_lg, g_real_ft = disc(torch.cat([x, y_real], dim=1))
            g_fake_lg, g_fake_ft = disc(torch.cat([x, y_fake], dim=1))
            g_out = gan_losses(
                LogitPack([t.detach() for t in g_real_lg], g_real_ft),
                LogitPack(g_fake_lg, g_fake_ft), preset.loss)
            g_loss = g_out["generator_loss"]
            if preset.loss.reconstruction_weight > 0:
                g_loss = g_loss + preset.loss.reconstruction_weight * \
                    F.l1_loss(y_fake, y_real)
            if preset.loss.perceptual_weight > 0:
                if perceptual_model is None:
                    raise ValidationError(
                        "perceptual_weight > 0 needs a perceptual_model")
                g_loss = g_loss + preset.loss.perceptual_weight * \
                    perceptual_model.distance_tensor(y_fake, y_real).float()
            g_opt.zero_grad()
            g_loss.backward()
            g_opt.step()

            if not (torch.isfinite(g_loss) and
                    torch.isfinite(d_out["discriminator_loss"])):
                raise RuntimeError(f"non-finite loss at epoch {epoch}")
            g_losses.append(float(g_loss.detach()))
            d_losses.append(float(d_out["discriminator_loss"].detach()))
            l1s.append(float(F.l1_loss(y_fake.detach(), y_real)))

        row = {"epoch": epoch + 1,
               "g_loss": float(np.mean(g_losses)),
               "d_loss": float(np.mean(d_losses)),
               "l1_to_gt": float(np.mean(l1s))}
        log_f.write(json.dumps(row) + "\n")
        log_f.flush()
        if log_every and (epoch + 1) % log_every == 0:
            print(f"epoch {row['epoch']}/{cfg.epochs}  g {row['g_loss']:.3f}  "
                  f"d {row['d_loss']:.3f}  l1 {row['l1_to_gt']:.3f}")
        if (epoch + 1) % cfg.checkpoint_every == 0 or (epoch + 1) == cfg.epochs:
            save(epoch + 1)

    log_f.close()
    if not ckpt_path.exists():
        save(cfg.epochs)
    return ckpt_path

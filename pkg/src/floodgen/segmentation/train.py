"""Segmenter training: L1 + soft-IoU + optional adversarial objective,
with an optional last-layers L1-only finetune phase, and k-fold cross
validation over a labeled pool."""

from __future__ import annotations

import numpy as np
import torch
import torch.nn.functional as F

from floodgen.gan.discriminator import DiscriminatorConfig, build_discriminator
from floodgen.gan.losses import LogitPack, LossConfig, gan_losses
from floodgen.metrics.iou import iou as iou_metric
from floodgen.segmentation.unet import (
    SegmenterConfig,
    build_segmenter,
    segment,
    soft_iou_loss,
)
from floodgen.types import BinaryMask, ImageTile, ValidationError

LabeledPair = tuple[ImageTile, BinaryMask]


def _to_batch(pairs: list[LabeledPair]) -> tuple[torch.Tensor, torch.Tensor]:
    xs = torch.stack([
        torch.from_numpy(np.ascontiguousarray(im.pixels)).float().permute(2, 0, 1)
        for im, _ in pairs])
    ys = torch.stack([
        torch.from_numpy(m.values.astype(np.float32)).unsqueeze(0)
        for _, m in pairs])
    return xs, ys


def train_segmenter(labeled: list[LabeledPair], cfg: SegmenterConfig, seed: int = 0,
                    *, steps: int = 200, batch_size: int = 4, lr: float = 2e-3,
                    log_every: int = 0) -> dict:
    """Returns {"state_dict", "losses", "cfg"}. Reproducible given seed
    at a fixed thread count."""
    if not labeled:
        raise ValidationError("labeled set is empty")
    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)
    model = build_segmenter(cfg)
    opt = torch.optim.Adam(model.parameters(), lr=lr)

    use_adv = cfg.losses.adversarial_weight > 0
    if use_adv:
        # single-scale patch critic over (image, mask-channel) pairs
        d_cfg = DiscriminatorConfig(in_channels=4, n_scales=1, n_layers=2,
                                    base_width=16)
        disc = build_discriminator(d_cfg)
        d_opt = torch.optim.Adam(disc.parameters(), lr=lr)
        adv_cfg = LossConfig(feature_matching_weight=0.0)

    losses = []
    model.train()
    n = len(labeled)
    for step in range(steps):
        idx = rng.choice(n, size=min(batch_size, n), replace=False)
        xs, ys = _to_batch([labeled[i] for i in idx])
        pred = model(xs)
        loss = (cfg.losses.l1_weight * F.l1_loss(pred, ys)
                + cfg.losses.iou_weight * soft_iou_loss(pred, ys))
        if use_adv:
            real_in = torch.cat([xs, ys], dim=1)
            fake_in = torch.cat([xs, pred], dim=1)
            r_lg, r_ft = disc(real_in)
            f_lg, f_ft = disc(fake_in.detach())
            d_pack = gan_losses(LogitPack(r_lg, r_ft), LogitPack(f_lg, f_ft), adv_cfg)
            d_opt.zero_grad()
            d_pack["discriminator_loss"].backward()
            d_opt.step()
            f_lg, f_ft = disc(fake_in)
            g_pack = gan_losses(LogitPack([t.detach() for t in r_lg], r_ft),
                                LogitPack(f_lg, f_ft), adv_cfg)
            loss = loss + cfg.losses.adversarial_weight * g_pack["generator_loss"]
        opt.zero_grad()
        loss.backward()
        opt.step()
        losses.append(float(loss.detach()))
        if log_every and (step + 1) % log_every == 0:
            print(f"  step {step + 1}/{steps}  loss {losses[-1]:.4f}")

    if cfg.finetune.enabled:
        _finetune(model, labeled, cfg, rng, lr)

    model.eval()
    return {"state_dict": model.state_dict(), "losses": losses, "cfg": cfg}


def _finetune(model, labeled, cfg: SegmenterConfig, rng, lr: float) -> None:
    """Freeze everything except the last `layers` decoder blocks and the
    head, then run L1-only updates."""
    for p in model.parameters():
        p.requires_grad_(False)
    tail: list[torch.nn.Module] = [model.head]
    tail += list(model.up_convs[-cfg.finetune.layers:])
    params = []
    for mod in tail:
        for p in mod.parameters():
            p.requires_grad_(True)
            params.append(p)
    opt = torch.optim.Adam(params, lr=lr * 0.1)
    n = len(labeled)
    model.train()
    for _ in range(cfg.finetune.steps):
        idx = rng.choice(n, size=min(4, n), replace=False)
        xs, ys = _to_batch([labeled[i] for i in idx])
        loss = F.l1_loss(model(xs), ys)
        opt.zero_grad()
        loss.backward()
        opt.step()
    for p in model.parameters():
        p.requires_grad_(True)


def make_folds(n: int, k: int = 4, holdout: int = 23, seed: int = 0
               ) -> tuple[list[int], list[list[int]]]:
    """Holdout indices first, then k near-equal folds over the remainder.

    Returns (holdout_indices, fold_index_lists); folds are disjoint and
    their union is exactly the non-holdout pool.
    """
    if holdout >= n:
        raise ValidationError(f"holdout {holdout} must be < dataset size {n}")
    remaining = n - holdout
    if k < 1 or k > remaining:
        raise ValidationError(f"k={k} invalid for a pool of {remaining}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n).tolist()
    held = sorted(order[:holdout])
    pool = order[holdout:]
    folds = [sorted(pool[i::k]) for i in range(k)]
    return held, folds


def cross_validate(labeled: list[LabeledPair], k: int = 4, holdout: int = 23,
                   cfg: SegmenterConfig | None = None, seed: int = 0,
                   *, steps: int = 100, threshold: float = 0.5) -> dict:
    """k-fold CV after reserving a holdout test set.

    Each fold trains on the other folds and validates on itself; reports
    per-fold mean IoU and their mean."""
    import warnings

    cfg = cfg or SegmenterConfig()
    n = len(labeled)
    if k == 1:
        warnings.warn("k=1 degenerates to a single train/validate split",
                      stacklevel=2)
    held, folds = make_folds(n, max(k, 1), holdout, seed)

    fold_ious = []
    for fi, fold in enumerate(folds):
        val_set = fold
        train_idx = [i for f in folds for i in f if i not in set(fold)] or fold
        result = train_segmenter([labeled[i] for i in train_idx], cfg,
                                 seed=seed + fi, steps=steps)
        model = build_segmenter(cfg)
        model.load_state_dict(result["state_dict"])
        ious = []
        for i in val_set:
            img, gt = labeled[i]
            ious.append(iou_metric(segment(img, model, threshold), gt))
        fold_ious.append(float(np.mean(ious)))

    return {
        "holdout_indices": held,
        "fold_indices": folds,
        "fold_iou": fold_ious,
        "mean_iou": float(np.mean(fold_ious)),
    }

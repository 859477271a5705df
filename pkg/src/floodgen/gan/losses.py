"""Adversarial loss stack: least-squares or relativistic-average
objectives plus the discriminator feature-matching term."""

from __future__ import annotations

from dataclasses import dataclass, field

import torch

from floodgen.types import ValidationError

ADVERSARIAL_MODES = ("least_squares", "relativistic")


@dataclass
class LossConfig:
    adversarial: str = "least_squares"
    feature_matching_weight: float = 10.0
    perceptual_weight: float = 0.0
    reconstruction_weight: float = 0.0  # applied by the training loop, not here

    def __post_init__(self) -> None:
        if self.adversarial not in ADVERSARIAL_MODES:
            raise ValidationError(f"unknown adversarial mode {self.adversarial!r}")
        for name in ("feature_matching_weight", "perceptual_weight",
                     "reconstruction_weight"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")


@dataclass
class LogitPack:
    """Per-scale patch logits and per-scale intermediate feature lists."""

    logits: list[torch.Tensor]
    features: list[list[torch.Tensor]] = field(default_factory=list)


def _mse_to(xs: list[torch.Tensor], target: float) -> torch.Tensor:
    return torch.stack([((x - target) ** 2).mean() for x in xs]).mean()


def _check_packs(real: LogitPack, fake: LogitPack) -> None:
    if len(real.logits) != len(fake.logits):
        raise ValidationError("real/fake packs have different scale counts")
    for r, f in zip(real.logits, fake.logits):
        if r.shape != f.shape:
            raise ValidationError(
                f"logit shape mismatch: {tuple(r.shape)} vs {tuple(f.shape)}")
    if real.features and fake.features:
        for rs, fs in zip(real.features, fake.features):
            if len(rs) != len(fs):
                raise ValidationError("feature list lengths differ between packs")
            for r, f in zip(rs, fs):
                if r.shape != f.shape:
                    raise ValidationError(
                        f"feature shape mismatch: {tuple(r.shape)} vs {tuple(f.shape)}")


def feature_matching_loss(real: LogitPack, fake: LogitPack) -> torch.Tensor:
    """Mean absolute difference of discriminator features, real vs fake,
    averaged over layers and scales. Real features are constants."""
    terms = []
    for rs, fs in zip(real.features, fake.features):
        for r, f in zip(rs, fs):
            terms.append((f - r.detach()).abs().mean())
    if not terms:
        return torch.tensor(0.0)
    return torch.stack(terms).mean()


def gan_losses(real_pack: LogitPack, fake_pack: LogitPack,
               loss_cfg: LossConfig) -> dict:
    """Generator and discriminator objectives from one real/fake pair.

    least_squares: D pushes real patch logits to 1 and fake to 0, G
    pushes fake to 1. relativistic: each logit is first recentred by the
    mean logit of the opposing batch, then the same squared targets
    apply.
    """
    _check_packs(real_pack, fake_pack)

    if loss_cfg.adversarial == "least_squares":
        d_real = _mse_to(real_pack.logits, 1.0)
        d_fake = _mse_to([f for f in fake_pack.logits], 0.0)
        g_adv = _mse_to(fake_pack.logits, 1.0)
    else:  # relativistic average
        rel_real, rel_fake, rel_fake_g = [], [], []
        for r, f in zip(real_pack.logits, fake_pack.logits):
            rel_real.append(r - f.mean())
            rel_fake.append(f - r.mean())
            rel_fake_g.append(f - r.mean())
        d_real = _mse_to(rel_real, 1.0)
        d_fake = _mse_to(rel_fake, 0.0)
        g_adv = _mse_to(rel_fake_g, 1.0)

    fm = feature_matching_loss(real_pack, fake_pack)

    discriminator_loss = 0.5 * (d_real + d_fake)
    generator_loss = g_adv + loss_cfg.feature_matching_weight * fm
    return {
        "generator_loss": generator_loss,
        "discriminator_loss": discriminator_loss,
        "components": {
            "g_adv": g_adv.detach(),
            "g_feature_matching": fm.detach(),
            "d_real": d_real.detach(),
            "d_fake": d_fake.detach(),
        },
    }

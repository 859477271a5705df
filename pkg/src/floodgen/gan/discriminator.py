"""Multi-scale patch discriminator with intermediate-feature taps."""

from __future__ import annotations

from dataclasses import dataclass, replace

import torch
import torch.nn as nn
import torch.nn.functional as F

from floodgen.types import ValidationError


@dataclass
class DiscriminatorConfig:
    in_channels: int = 7  # condition (3 or 4) + candidate post image (3)
    n_scales: int = 2
    n_layers: int = 3
    base_width: int = 64
    use_spectral_norm: bool = False

    def __post_init__(self) -> None:
        if self.n_scales < 1:
            raise ValidationError("n_scales must be >= 1")
        if self.n_layers < 1:
            raise ValidationError("n_layers must be >= 1")


def apply_spectral_norm(cfg: DiscriminatorConfig) -> DiscriminatorConfig:
    """Enable per-layer weight spectral normalization (idempotent)."""
    return replace(cfg, use_spectral_norm=True)


class _PatchDiscriminator(nn.Module):
    """One scale: strided conv stack emitting per-layer features + patch logits."""

    def __init__(self, cfg: DiscriminatorConfig):
        super().__init__()

        def conv(in_ch, out_ch, stride):
            c = nn.Conv2d(in_ch, out_ch, 4, stride=stride, padding=2)
            return nn.utils.spectral_norm(c) if cfg.use_spectral_norm else c

        blocks = [nn.Sequential(conv(cfg.in_channels, cfg.base_width, 2),
                                nn.LeakyReLU(0.2, inplace=True))]
        w = cfg.base_width
        for i in range(1, cfg.n_layers):
            nw = min(w * 2, 512)
            blocks.append(nn.Sequential(conv(w, nw, 2 if i < cfg.n_layers - 1 else 1),
                                        nn.LeakyReLU(0.2, inplace=True)))
            w = nw
        self.blocks = nn.ModuleList(blocks)
        self.head = conv(w, 1, 1)

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, list[torch.Tensor]]:
        feats = []
        for block in self.blocks:
            x = block(x)
            feats.append(x)
        return self.head(x), feats


class MultiScaleDiscriminator(nn.Module):
    def __init__(self, cfg: DiscriminatorConfig):
        super().__init__()
        self.cfg = cfg
        self.scales = nn.ModuleList(
            [_PatchDiscriminator(cfg) for _ in range(cfg.n_scales)])

    def forward(self, x: torch.Tensor
                ) -> tuple[list[torch.Tensor], list[list[torch.Tensor]]]:
        if x.shape[1] != self.cfg.in_channels:
            raise ValidationError(
                f"discriminator expects {self.cfg.in_channels} channels, "
                f"got {x.shape[1]}")
        logits, features = [], []
        for k, disc in enumerate(self.scales):
            xs = F.avg_pool2d(x, 2 ** k) if k else x
            lg, ft = disc(xs)
            logits.append(lg)
            features.append(ft)
        return logits, features


def build_discriminator(cfg: DiscriminatorConfig) -> MultiScaleDiscriminator:
    return MultiScaleDiscriminator(cfg)


def discriminator_forward(image_and_condition: torch.Tensor,
                          cfg: DiscriminatorConfig,
                          weights: dict[str, torch.Tensor]
                          ) -> tuple[list[torch.Tensor], list[list[torch.Tensor]]]:
    """Stateless inference over a channel-concatenated (condition, candidate)."""
    model = build_discriminator(cfg)
    model.load_state_dict(weights)
    model.eval()
    with torch.no_grad():
        return model(image_and_condition)

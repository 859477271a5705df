"""Coarse-to-fine conditional generator.

A global encoder/resnet/decoder stack (optionally wrapped by a local
enhancer branch) maps a 4-channel pre-image + mask input, normalized to
[-1,1], to a 3-channel post-event image squashed by tanh. Denormalized
outputs always land in [0,1] regardless of weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn as nn

from floodgen.types import BinaryMask, ImageTile, ValidationError


@dataclass
class GeneratorConfig:
    in_channels: int = 4
    out_channels: int = 3
    base_width: int = 64
    n_downsample: int = 3
    n_residual_blocks: int = 9
    use_local_enhancer: bool = False

    def __post_init__(self) -> None:
        if self.in_channels not in (3, 4):
            raise ValidationError("in_channels must be 3 (unconditioned) or 4")
        if self.out_channels != 3:
            raise ValidationError("out_channels must be 3")


class _ResidualBlock(nn.Module):
    def __init__(self, width: int):
        super().__init__()
        self.body = nn.Sequential(
            nn.ReflectionPad2d(1),
            nn.Conv2d(width, width, 3),
            nn.InstanceNorm2d(width),
            nn.ReLU(inplace=True),
            nn.ReflectionPad2d(1),
            nn.Conv2d(width, width, 3),
            nn.InstanceNorm2d(width),
        )

    def forward(self, x):
        return x + self.body(x)


class _GlobalGenerator(nn.Module):
    def __init__(self, cfg: GeneratorConfig):
        super().__init__()
        w = cfg.base_width
        layers: list[nn.Module] = [
            nn.ReflectionPad2d(3),
            nn.Conv2d(cfg.in_channels, w, 7),
            nn.InstanceNorm2d(w),
            nn.ReLU(inplace=True),
        ]
        for _ in range(cfg.n_downsample):
            layers += [nn.Conv2d(w, w * 2, 3, stride=2, padding=1),
                       nn.InstanceNorm2d(w * 2), nn.ReLU(inplace=True)]
            w *= 2
        for _ in range(cfg.n_residual_blocks):
            layers.append(_ResidualBlock(w))
        for _ in range(cfg.n_downsample):
            layers += [nn.ConvTranspose2d(w, w // 2, 3, stride=2, padding=1,
                                          output_padding=1),
                       nn.InstanceNorm2d(w // 2), nn.ReLU(inplace=True)]
            w //= 2
        self.body = nn.Sequential(*layers)
        self.head = nn.Sequential(nn.ReflectionPad2d(3),
                                  nn.Conv2d(w, cfg.out_channels, 7), nn.Tanh())

    def forward(self, x, return_features: bool = False):
        feats = self.body(x)
        out = self.head(feats)
        return (out, feats) if return_features else out


class FloodGenerator(nn.Module):
    """Global generator with an optional full-resolution enhancer branch."""

    def __init__(self, cfg: GeneratorConfig):
        super().__init__()
        self.cfg = cfg
        self.global_net = _GlobalGenerator(cfg)
        if cfg.use_local_enhancer:
            w = cfg.base_width // 2 or 1
            self.enhancer_stem = nn.Sequential(
                nn.ReflectionPad2d(3), nn.Conv2d(cfg.in_channels, w, 7),
                nn.InstanceNorm2d(w), nn.ReLU(inplace=True),
                nn.Conv2d(w, w * 2, 3, stride=2, padding=1),
                nn.InstanceNorm2d(w * 2), nn.ReLU(inplace=True),
            )
            self.enhancer_merge = nn.Conv2d(w * 2 + cfg.base_width, w * 2, 3, padding=1)
            self.enhancer_tail = nn.Sequential(
                _ResidualBlock(w * 2), _ResidualBlock(w * 2),
                nn.ConvTranspose2d(w * 2, w, 3, stride=2, padding=1, output_padding=1),
                nn.InstanceNorm2d(w), nn.ReLU(inplace=True),
                nn.ReflectionPad2d(3), nn.Conv2d(w, cfg.out_channels, 7), nn.Tanh(),
            )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.shape[1] != self.cfg.in_channels:
            raise ValidationError(
                f"generator expects {self.cfg.in_channels} channels, got {x.shape[1]}")
        if not self.cfg.use_local_enhancer:
            return self.global_net(x)
        coarse = torch.nn.functional.avg_pool2d(x, 2)
        _, global_feats = self.global_net(coarse, return_features=True)
        stem = self.enhancer_stem(x)
        merged = self.enhancer_merge(torch.cat([stem, global_feats], dim=1))
        return self.enhancer_tail(merged)


def build_generator(cfg: GeneratorConfig) -> FloodGenerator:
    return FloodGenerator(cfg)


def normalize_inputs(pre: ImageTile, mask: BinaryMask | None,
                     in_channels: int) -> torch.Tensor:
    """Stack image (and mask, when conditioned) into a [-1,1] NCHW tensor.

    The mask channel is carried as {-1,+1} so its dynamic range matches
    the image channels.
    """
    if in_channels == 4 and mask is None:
        raise ValidationError("conditioned generator (in_channels=4) needs a mask")
    if in_channels == 3 and mask is not None:
        raise ValidationError("unconditioned generator (in_channels=3) takes no mask")
    img = torch.from_numpy(np.ascontiguousarray(pre.pixels)).float()
    img = img.permute(2, 0, 1) * 2.0 - 1.0
    if mask is not None:
        if mask.values.shape != pre.pixels.shape[:2]:
            raise ValidationError(
                f"mask dims {mask.values.shape} != image dims {pre.pixels.shape[:2]}")
        m = torch.from_numpy(mask.values.astype(np.float32)) * 2.0 - 1.0
        img = torch.cat([img, m.unsqueeze(0)], dim=0)
    return img.unsqueeze(0)


def denormalize_output(y: torch.Tensor) -> np.ndarray:
    arr = ((y.clamp(-1.0, 1.0) + 1.0) / 2.0).squeeze(0).permute(1, 2, 0)
    return arr.detach().cpu().numpy().astype(np.float64)


def generator_forward(pre: ImageTile, mask: BinaryMask | None,
                      cfg: GeneratorConfig,
                      weights: dict[str, torch.Tensor]) -> ImageTile:
    """Stateless inference: build, load, eval. Deterministic per input."""
    model = build_generator(cfg)
    model.load_state_dict(weights)
    model.eval()
    with torch.no_grad():
        x = normalize_inputs(pre, mask, cfg.in_channels)
        y = model(x)
    return ImageTile(pixels=denormalize_output(y), gsd_m_per_px=pre.gsd_m_per_px,
                     tile_id=pre.tile_id, event=pre.event,
                     acquisition=pre.acquisition)

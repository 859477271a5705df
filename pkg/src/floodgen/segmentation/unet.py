"""Vanilla U-Net flood segmenter.

Doubles as the physical-consistency oracle inside the evaluation stack:
segment() maps an image to a binary flood mask by thresholding the
sigmoid probability map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn as nn

from floodgen.types import BinaryMask, ImageTile, ValidationError


@dataclass
class SegmenterLosses:
    l1_weight: float = 1.0
    iou_weight: float = 1.0
    adversarial_weight: float = 0.0


@dataclass
class FinetuneConfig:
    enabled: bool = False
    l1_only: bool = True
    layers: int = 1
    steps: int = 50


@dataclass
class SegmenterConfig:
    in_channels: int = 3
    out_channels: int = 1
    depth: int = 3
    base_width: int = 16
    losses: SegmenterLosses = field(default_factory=SegmenterLosses)
    finetune: FinetuneConfig = field(default_factory=FinetuneConfig)

    def __post_init__(self) -> None:
        if self.in_channels != 3 or self.out_channels != 1:
            raise ValidationError("segmenter is RGB-in, single-channel-out")
        for name in ("l1_weight", "iou_weight", "adversarial_weight"):
            if getattr(self.losses, name) < 0:
                raise ValidationError(f"losses.{name} must be >= 0")


def _double_conv(in_ch: int, out_ch: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, 3, padding=1), nn.BatchNorm2d(out_ch),
        nn.ReLU(inplace=True),
        nn.Conv2d(out_ch, out_ch, 3, padding=1), nn.BatchNorm2d(out_ch),
        nn.ReLU(inplace=True),
    )


class UNetSegmenter(nn.Module):
    def __init__(self, cfg: SegmenterConfig):
        super().__init__()
        self.cfg = cfg
        w = cfg.base_width
        self.downs = nn.ModuleList()
        in_ch = cfg.in_channels
        widths = [w * (2 ** d) for d in range(cfg.depth + 1)]
        for out_ch in widths[:-1]:
            self.downs.append(_double_conv(in_ch, out_ch))
            in_ch = out_ch
        self.pool = nn.MaxPool2d(2)
        self.bottleneck = _double_conv(widths[-2], widths[-1])
        self.ups = nn.ModuleList()
        self.up_convs = nn.ModuleList()
        for skip_ch in reversed(widths[:-1]):
            self.ups.append(nn.ConvTranspose2d(skip_ch * 2, skip_ch, 2, stride=2))
            self.up_convs.append(_double_conv(skip_ch * 2, skip_ch))
        self.head = nn.Conv2d(widths[0], cfg.out_channels, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Returns per-pixel probabilities in (0,1)."""
        skips = []
        for down in self.downs:
            x = down(x)
            skips.append(x)
            x = self.pool(x)
        x = self.bottleneck(x)
        for up, conv, skip in zip(self.ups, self.up_convs, reversed(skips)):
            x = up(x)
            x = conv(torch.cat([skip, x], dim=1))
        return torch.sigmoid(self.head(x))


def build_segmenter(cfg: SegmenterConfig) -> UNetSegmenter:
    return UNetSegmenter(cfg)


def segment(image: ImageTile, model: UNetSegmenter,
            threshold: float = 0.5) -> BinaryMask:
    """Deterministic probability -> {0,1} thresholding (p >= threshold)."""
    model.eval()
    with torch.no_grad():
        x = torch.from_numpy(np.ascontiguousarray(image.pixels)).float()
        x = x.permute(2, 0, 1).unsqueeze(0)
        prob = model(x).squeeze(0).squeeze(0).numpy()
    return BinaryMask(values=(prob >= threshold).astype(np.uint8),
                      gsd_m_per_px=image.gsd_m_per_px, semantics="flood")


def soft_iou_loss(pred: torch.Tensor, target: torch.Tensor,
                  smooth: float = 1.0) -> torch.Tensor:
    """1 - smoothed soft IoU; equals 1 - IoU exactly on binary inputs
    as smooth -> 0, bounded in [0,1]."""
    inter = (pred * target).sum()
    union = pred.sum() + target.sum() - inter
    if float((union + smooth).detach()) == 0.0:
        return pred.sum() * 0.0  # both empty: perfect agreement, zero loss
    return 1.0 - (inter + smooth) / (union + smooth)

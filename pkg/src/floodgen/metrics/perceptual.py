"""Calibrated deep-feature perceptual distance (the photorealism submetric).

An AlexNet-style convolutional feature stack with per-layer linear
calibration weights: features are channel-normalized, squared
differences are reweighted by the calibration vector, spatially
averaged, and averaged across layers. 0 means identical; the score is
clamped to [0,1] so the reported range matches the metric contract.

The backbone weights live in a checkpoint file. ``create_calibration_checkpoint``
materializes a deterministic randomly-initialized stand-in for desk
work; a properly calibrated checkpoint (converted from a published
LPIPS-style release) can be dropped in at the same path.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
import torch.nn as nn

from floodgen.types import ImageTile, ValidationError


class PerceptualCheckpointError(FileNotFoundError):
    pass


_CONV_SPECS = [
    # (out_ch, kernel, stride, padding, pool_after)
    (64, 11, 4, 2, True),
    (192, 5, 1, 2, True),
    (384, 3, 1, 1, False),
    (256, 3, 1, 1, False),
    (256, 3, 1, 1, False),
]


class _FeatureStack(nn.Module):
    """AlexNet-shaped conv tower exposing all five post-ReLU feature maps."""

    def __init__(self, width_mult: float = 1.0):
        super().__init__()
        layers = []
        in_ch = 3
        self.out_channels = []
        for out_ch, k, s, p, pool in _CONV_SPECS:
            out_ch = max(8, int(out_ch * width_mult))
            block = [nn.Conv2d(in_ch, out_ch, k, stride=s, padding=p), nn.ReLU()]
            if pool:
                block.append(nn.MaxPool2d(3, stride=2, ceil_mode=True))
            layers.append(nn.Sequential(*block))
            self.out_channels.append(out_ch)
            in_ch = out_ch
        self.blocks = nn.ModuleList(layers)

    def forward(self, x: torch.Tensor) -> list[torch.Tensor]:
        feats = []
        for block in self.blocks:
            x = block(x)
            feats.append(x)
        return feats


class PerceptualDistance:
    """Loads a backbone checkpoint once; distance calls are pure."""

    def __init__(self, checkpoint_path: str | Path):
        path = Path(checkpoint_path)
        if not path.is_file():
            raise PerceptualCheckpointError(
                f"perceptual backbone checkpoint not found at {path}. Create a "
                "deterministic stand-in with "
                "floodgen.metrics.perceptual.create_calibration_checkpoint(path) "
                "or `floodgen make-backbone --out PATH`, or supply a converted "
                "calibrated checkpoint at that location.")
        state = torch.load(path, map_location="cpu", weights_only=True)
        width_mult = float(state.pop("_width_mult", 1.0))
        self.net = _FeatureStack(width_mult).double()
        cal = [state.pop(f"_calibration.{i}") for i in range(len(_CONV_SPECS))]
        self.calibration = [c.double() for c in cal]
        self.net.load_state_dict(state)
        self.net.eval()
        for p in self.net.parameters():
            p.requires_grad_(False)

    def distance(self, a: ImageTile, b: ImageTile) -> float:
        if a.pixels.shape != b.pixels.shape:
            raise ValidationError(
                f"image dims differ: {a.pixels.shape} vs {b.pixels.shape}")
        if min(a.pixels.shape[:2]) < 64:
            raise ValidationError(
                "perceptual distance needs tiles of at least 64x64 px")
        with torch.no_grad():
            fa = self.net(_to_tensor(a.pixels))
            fb = self.net(_to_tensor(b.pixels))
            per_layer = []
            for za, zb, w in zip(fa, fb, self.calibration):
                za = _unit_normalize(za)
                zb = _unit_normalize(zb)
                diff2 = (za - zb) ** 2
                layer_val = (diff2 * w.view(1, -1, 1, 1)).sum(dim=1).mean()
                per_layer.append(layer_val)
            raw = torch.stack(per_layer).mean().item()
        return float(min(max(raw, 0.0), 1.0))

    __call__ = distance

    def distance_tensor(self, a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
        """Differentiable variant over NCHW tensors already in [-1,1];
        used as an optional training loss. Not clamped."""
        fa = self.net(a.double())
        fb = self.net(b.double())
        vals = []
        for za, zb, w in zip(fa, fb, self.calibration):
            diff2 = (_unit_normalize(za) - _unit_normalize(zb)) ** 2
            vals.append((diff2 * w.view(1, -1, 1, 1)).sum(dim=1).mean())
        return torch.stack(vals).mean()


def _to_tensor(pixels: np.ndarray) -> torch.Tensor:
    t = torch.from_numpy(np.ascontiguousarray(pixels)).double()
    return (t.permute(2, 0, 1).unsqueeze(0) * 2.0) - 1.0


def _unit_normalize(z: torch.Tensor, eps: float = 1e-10) -> torch.Tensor:
    norm = torch.sqrt((z ** 2).sum(dim=1, keepdim=True) + eps)
    return z / norm


def perceptual_distance(a: ImageTile, b: ImageTile,
                        model: PerceptualDistance) -> float:
    return model.distance(a, b)


def create_calibration_checkpoint(path: str | Path, seed: int = 0,
                                  width_mult: float = 1.0) -> Path:
    """Write a deterministic randomly-initialized backbone checkpoint."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    gen = torch.Generator().manual_seed(seed)
    net = _FeatureStack(width_mult).double()
    state = {}
    for name, p in net.state_dict().items():
        state[name] = torch.randn(p.shape, generator=gen).double() * 0.1
    for i, ch in enumerate(net.out_channels):
        # nonnegative calibration weights, scaled so typical distances sit in (0,1)
        state[f"_calibration.{i}"] = torch.rand(ch, generator=gen).double() * 0.5
    state["_width_mult"] = torch.tensor(width_mult)
    torch.save(state, path)
    return path

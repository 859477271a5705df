"""Run configuration and size presets.

The paper-scale preset matches the published setup (1024 px tiles,
full-width networks, 200 epochs); the desk presets shrink everything so
the full pipeline runs on a workstation CPU in minutes. Optimizer
family and schedule are recorded here so runs are self-describing.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from floodgen.data.augment import AugmentConfig
from floodgen.gan.discriminator import DiscriminatorConfig
from floodgen.gan.generator import GeneratorConfig
from floodgen.gan.losses import LossConfig
from floodgen.types import ValidationError

MODELS = ("gan_physics", "gan_no_physics", "handcrafted",
          "green_mask_dark", "green_mask_light")
GAN_MODELS = ("gan_physics", "gan_no_physics")
PRESETS = ("paper_1024", "desk_256", "desk_64")


@dataclass
class Preset:
    name: str
    tile_px: int
    generator: GeneratorConfig
    discriminator: DiscriminatorConfig
    loss: LossConfig
    lr: float = 2e-4
    betas: tuple[float, float] = (0.5, 0.999)
    batch_size: int = 1


def get_preset(name: str, conditioned: bool = True) -> Preset:
    in_ch = 4 if conditioned else 3
    d_in = in_ch + 3  # condition channels + candidate post image
    if name == "paper_1024":
        return Preset(
            name=name, tile_px=1024,
            generator=GeneratorConfig(in_channels=in_ch, base_width=64,
                                      n_downsample=4, n_residual_blocks=9,
                                      use_local_enhancer=True),
            discriminator=DiscriminatorConfig(in_channels=d_in, n_scales=2,
                                              n_layers=3, base_width=64,
                                              use_spectral_norm=True),
            loss=LossConfig(feature_matching_weight=10.0),
        )
    if name == "desk_256":
        return Preset(
            name=name, tile_px=256,
            generator=GeneratorConfig(in_channels=in_ch, base_width=32,
                                      n_downsample=3, n_residual_blocks=4),
            discriminator=DiscriminatorConfig(in_channels=d_in, n_scales=2,
                                              n_layers=3, base_width=32),
            loss=LossConfig(feature_matching_weight=10.0,
                            reconstruction_weight=50.0),
            batch_size=2,
        )
    if name == "desk_64":
        return Preset(
            name=name, tile_px=64,
            generator=GeneratorConfig(in_channels=in_ch, base_width=16,
                                      n_downsample=2, n_residual_blocks=2),
            discriminator=DiscriminatorConfig(in_channels=d_in, n_scales=2,
                                              n_layers=2, base_width=16),
            loss=LossConfig(feature_matching_weight=10.0,
                            reconstruction_weight=100.0),
            lr=4e-4,
            batch_size=4,
        )
    raise ValidationError(f"unknown preset {name!r}; choose from {PRESETS}")


@dataclass
class EvalConfig:
    mask_resolution: str = "high"
    coarse_gsd: float = 30.0

    def __post_init__(self) -> None:
        if self.mask_resolution not in ("high", "low"):
            raise ValidationError("mask_resolution must be 'high' or 'low'")


@dataclass
class RunConfig:
    dataset: str = ""
    model: str = "gan_physics"
    preset: str = "desk_64"
    epochs: int = 200
    seed: int = 0
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    checkpoint_every: int = 10

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValidationError(f"unknown model {self.model!r}")
        if self.preset not in PRESETS:
            raise ValidationError(f"unknown preset {self.preset!r}")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        from floodgen import __version__
        blob = asdict(self)
        blob["_floodgen_version"] = __version__
        path.write_text(json.dumps(blob, indent=2, sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        blob = json.loads(Path(path).read_text())
        blob.pop("_floodgen_version", None)
        blob["augment"] = AugmentConfig(**{
            k: tuple(v) if isinstance(v, list) else v
            for k, v in blob.get("augment", {}).items()})
        blob["eval"] = EvalConfig(**blob.get("eval", {}))
        return cls(**blob)

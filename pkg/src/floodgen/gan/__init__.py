from floodgen.gan.generator import (
    GeneratorConfig,
    build_generator,
    generator_forward,
    normalize_inputs,
)
from floodgen.gan.discriminator import (
    DiscriminatorConfig,
    apply_spectral_norm,
    build_discriminator,
    discriminator_forward,
)
from floodgen.gan.losses import LogitPack, LossConfig, gan_losses
from floodgen.gan.checkpoint import ModelCheckpoint, load_checkpoint, save_checkpoint

__all__ = [
    "GeneratorConfig",
    "build_generator",
    "generator_forward",
    "normalize_inputs",
    "DiscriminatorConfig",
    "build_discriminator",
    "discriminator_forward",
    "apply_spectral_norm",
    "LossConfig",
    "LogitPack",
    "gan_losses",
    "ModelCheckpoint",
    "save_checkpoint",
    "load_checkpoint",
]

"""Versioned model checkpoints.

A checkpoint bundles generator/discriminator/segmenter weights with the
configs that built them, a dataset fingerprint, and the epoch counter.
Loading refuses a config-hash mismatch unless forced.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, is_dataclass
from pathlib import Path
from typing import Any

import torch

from floodgen.types import ValidationError

FORMAT_VERSION = 1


class CheckpointMismatchError(ValidationError):
    pass


def config_hash(*configs: Any) -> str:
    blobs = []
    for c in configs:
        d = asdict(c) if is_dataclass(c) else c
        blobs.append(json.dumps(d, sort_keys=True, default=str))
    return hashlib.sha256("|".join(blobs).encode()).hexdigest()[:16]


@dataclass
class ModelCheckpoint:
    weights: dict[str, dict]
    configs: dict[str, dict]
    config_hash: str
    dataset_fingerprint: str
    epoch: int
    format_version: int = FORMAT_VERSION
    extra: dict | None = None


def save_checkpoint(path: str | Path, *, weights: dict[str, dict],
                    configs: dict[str, Any], dataset_fingerprint: str,
                    epoch: int, extra: dict | None = None) -> str:
    """Returns the config hash written into the file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cfg_dicts = {k: (asdict(v) if is_dataclass(v) else v) for k, v in configs.items()}
    h = config_hash(*cfg_dicts.values())
    torch.save({
        "format_version": FORMAT_VERSION,
        "weights": weights,
        "configs": cfg_dicts,
        "config_hash": h,
        "dataset_fingerprint": dataset_fingerprint,
        "epoch": epoch,
        "extra": extra or {},
    }, path)
    return h


def load_checkpoint(path: str | Path, expected_configs: dict[str, Any] | None = None,
                    force: bool = False) -> ModelCheckpoint:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    blob = torch.load(path, map_location="cpu", weights_only=False)
    if blob.get("format_version") != FORMAT_VERSION and not force:
        raise CheckpointMismatchError(
            f"checkpoint format {blob.get('format_version')} != {FORMAT_VERSION}")
    if expected_configs is not None and not force:
        cfg_dicts = {k: (asdict(v) if is_dataclass(v) else v)
                     for k, v in expected_configs.items()}
        expected = config_hash(*cfg_dicts.values())
        if expected != blob["config_hash"]:
            raise CheckpointMismatchError(
                f"config hash mismatch: checkpoint {blob['config_hash']} vs "
                f"expected {expected}; pass force=True to override")
    return ModelCheckpoint(
        weights=blob["weights"],
        configs=blob["configs"],
        config_hash=blob["config_hash"],
        dataset_fingerprint=blob["dataset_fingerprint"],
        epoch=blob["epoch"],
        format_version=blob["format_version"],
        extra=blob.get("extra"),
    )

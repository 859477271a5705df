"""Core raster and manifest types shared across the toolkit."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

EVENTS = (
    "harvey",
    "florence",
    "michael",
    "matthew",
    "midwest",
    "tsunami",
    "monsoon",
    "reforestation",
    "arctic",
    "synthetic",
)

MASK_SEMANTICS = ("flood", "reforestation", "ice")

SPLITS = ("train", "test")


class ValidationError(ValueError):
    """Raised when a raster or record violates its declared invariants."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


@dataclass
class ImageTile:
    """An RGB raster, float values in [0,1], with geospatial metadata.

    Paper-scale tiles are 1024x1024; any square power-of-two size >= 64
    is accepted for desk-scale work.
    """

    pixels: np.ndarray
    gsd_m_per_px: float
    tile_id: str
    event: str = "synthetic"
    acquisition: str | None = None

    def __post_init__(self) -> None:
        self.pixels = np.asarray(self.pixels, dtype=np.float64)
        _require(self.pixels.ndim == 3 and self.pixels.shape[2] == 3,
                 f"ImageTile needs HxWx3 pixels, got shape {self.pixels.shape}")
        _require(bool(np.all(np.isfinite(self.pixels))), "ImageTile has non-finite pixels")
        _require(bool((self.pixels >= 0).all() and (self.pixels <= 1).all()),
                 "ImageTile pixel values must lie in [0,1]")
        _require(self.gsd_m_per_px > 0, "gsd_m_per_px must be positive")
        _require(self.event in EVENTS, f"unknown event {self.event!r}")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass
class BinaryMask:
    """A {0,1} raster at a stated GSD; the physics conditioning signal."""

    values: np.ndarray
    gsd_m_per_px: float
    semantics: str = "flood"

    def __post_init__(self) -> None:
        arr = np.asarray(self.values)
        _require(arr.ndim == 2, f"BinaryMask needs an HxW array, got shape {arr.shape}")
        uniq = np.unique(arr)
        _require(bool(np.isin(uniq, (0, 1)).all()),
                 f"BinaryMask values must be exactly 0 or 1, found {uniq[:8]}")
        self.values = arr.astype(np.uint8)
        _require(self.gsd_m_per_px > 0, "gsd_m_per_px must be positive")
        _require(self.semantics in MASK_SEMANTICS, f"unknown semantics {self.semantics!r}")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def coverage(self) -> float:
        return float(self.values.mean())


@dataclass
class TripletRecord:
    """One (pre, mask, post) path triple with its split assignment."""

    tile_id: str
    pre_path: str
    mask_path: str
    post_path: str
    event: str = "synthetic"
    split: str = "train"
    gsd_m_per_px: float = 0.5

    def __post_init__(self) -> None:
        _require(self.event in EVENTS, f"unknown event {self.event!r}")
        _require(self.split in SPLITS, f"unknown split {self.split!r}")
        _require(self.gsd_m_per_px > 0, "gsd_m_per_px must be positive")

    def to_json(self) -> str:
        return json.dumps({
            "tile_id": self.tile_id,
            "pre_path": self.pre_path,
            "mask_path": self.mask_path,
            "post_path": self.post_path,
            "event": self.event,
            "split": self.split,
            "gsd_m_per_px": self.gsd_m_per_px,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "TripletRecord":
        d = json.loads(line)
        return cls(**d)


@dataclass
class Manifest:
    """Ordered triplet records; tile_ids are unique."""

    records: list[TripletRecord] = field(default_factory=list)
    dataset_name: str = "dataset"
    version: str = "1"

    def __post_init__(self) -> None:
        ids = [r.tile_id for r in self.records]
        dupes = {i for i in ids if ids.count(i) > 1}
        _require(not dupes, f"duplicate tile_id(s) in manifest: {sorted(dupes)}")

    def __len__(self) -> int:
        return len(self.records)

    def subset(self, split: str) -> list[TripletRecord]:
        _require(split in SPLITS, f"unknown split {split!r}")
        return [r for r in self.records if r.split == split]

    def get(self, tile_id: str) -> TripletRecord:
        for r in self.records:
            if r.tile_id == tile_id:
                return r
        raise KeyError(tile_id)

    def save(self, path: str | Path) -> None:
        """Write one JSON object per line (tile order preserved)."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            for r in self.records:
                f.write(r.to_json() + "\n")

    @classmethod
    def load(cls, path: str | Path, dataset_name: str | None = None) -> "Manifest":
        path = Path(path)
        records = []
        with open(path) as f:
            for line in f:
                line = line.strip()
                if line:
                    records.append(TripletRecord.from_json(line))
        return cls(records=records, dataset_name=dataset_name or path.stem)

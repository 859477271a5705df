"""Per-image metric records, physical-consistency check, and aggregation."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from floodgen.metrics.fvps import DEFAULT_FVPS_EPS, fvps
from floodgen.metrics.iou import iou
from floodgen.metrics.perceptual import PerceptualDistance
from floodgen.types import BinaryMask, ImageTile, ValidationError

Segmenter = Callable[[ImageTile], BinaryMask]

MASK_RESOLUTIONS = ("high", "low")


@dataclass
class EpsilonConfig:
    """The two distinct epsilons: the FVPS division guard and the
    membership margin of the physically-consistent image set."""

    fvps_eps: float = DEFAULT_FVPS_EPS
    consistency_margin: float = 0.05

    def __post_init__(self) -> None:
        if self.fvps_eps <= 0 or self.consistency_margin <= 0:
            raise ValidationError("both epsilons must be strictly positive")


@dataclass
class MetricRecord:
    tile_id: str
    iou: float
    lpips: float
    fvps: float
    mask_resolution: str = "high"
    model_tag: str = ""

    def __post_init__(self) -> None:
        for name in ("iou", "lpips", "fvps"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name}={v} outside [0,1]")
        if self.mask_resolution not in MASK_RESOLUTIONS:
            raise ValidationError(f"unknown mask_resolution {self.mask_resolution!r}")


@dataclass
class MetricSummary:
    model_tag: str
    mask_resolution: str
    mean_iou: float
    mean_lpips: float
    mean_fvps: float
    n_images: int


def evaluate_image(gen: ImageTile, gt_post: ImageTile, flood_map: BinaryMask,
                   segmenter: Segmenter, perceptual: PerceptualDistance,
                   eps: EpsilonConfig | None = None, *,
                   mask_resolution: str = "high",
                   model_tag: str = "") -> MetricRecord:
    """Score one generated tile: IoU of its segmented flood extent vs the
    conditioning mask, perceptual distance to the real post image, and
    their harmonic-mean combination."""
    eps = eps or EpsilonConfig()
    iou_val = iou(segmenter(gen), flood_map)
    lpips_val = perceptual.distance(gen, gt_post)
    return MetricRecord(
        tile_id=gen.tile_id,
        iou=iou_val,
        lpips=lpips_val,
        fvps=fvps(iou_val, lpips_val, eps.fvps_eps),
        mask_resolution=mask_resolution,
        model_tag=model_tag,
    )


def is_physically_consistent(gen: ImageTile, flood_map: BinaryMask,
                             segmenter: Segmenter, margin: float) -> bool:
    """Mean absolute difference between the segmented extent and the
    requested extent stays under the margin. Normalized L1 keeps the
    margin resolution-independent."""
    if margin <= 0:
        raise ValidationError("margin must be positive")
    seg = segmenter(gen)
    diff = np.abs(seg.values.astype(np.float64) - flood_map.values.astype(np.float64))
    return float(diff.mean()) < margin


def aggregate(records: list[MetricRecord]) -> MetricSummary:
    """Arithmetic means over per-image records.

    The FVPS column is the mean of per-image FVPS values, not
    fvps(mean_iou, mean_lpips) — the two differ because the harmonic
    mean is nonlinear.
    """
    if not records:
        raise ValidationError("cannot aggregate an empty record list")
    tags = {r.model_tag for r in records}
    ress = {r.mask_resolution for r in records}
    if len(tags) > 1 or len(ress) > 1:
        raise ValidationError(
            f"records are not homogeneous: model_tags={tags}, resolutions={ress}")
    return MetricSummary(
        model_tag=records[0].model_tag,
        mask_resolution=records[0].mask_resolution,
        mean_iou=float(np.mean([r.iou for r in records])),
        mean_lpips=float(np.mean([r.lpips for r in records])),
        mean_fvps=float(np.mean([r.fvps for r in records])),
        n_images=len(records),
    )


CSV_COLUMNS = ["tile_id", "model_tag", "mask_resolution", "iou", "lpips", "fvps"]


def write_records_csv(records: list[MetricRecord], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for r in records:
            d = asdict(r)
            w.writerow({k: d[k] for k in CSV_COLUMNS})


def write_records_json(records: list[MetricRecord], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump([asdict(r) for r in records], f, indent=2, sort_keys=True)


def render_summary_table(summaries: list[MetricSummary]) -> str:
    """Models down the rows, {LPIPS, IoU, FVPS} x {high, low} across."""
    by_model: dict[str, dict[str, MetricSummary]] = {}
    order: list[str] = []
    for s in summaries:
        if s.model_tag not in by_model:
            by_model[s.model_tag] = {}
            order.append(s.model_tag)
        by_model[s.model_tag][s.mask_resolution] = s

    cols = ["LPIPS hi", "LPIPS lo", "IoU hi", "IoU lo", "FVPS hi", "FVPS lo"]
    widths = [max(len(c), 6) for c in cols]
    name_w = max([len(m) for m in order] + [5])
    lines = ["model".ljust(name_w) + "  " +
             "  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    for m in order:
        cells = []
        for metric in ("mean_lpips", "mean_iou", "mean_fvps"):
            for res in ("high", "low"):
                s = by_model[m].get(res)
                cells.append(f"{getattr(s, metric):.3f}" if s else "-")
        lines.append(m.ljust(name_w) + "  " +
                     "  ".join(c.rjust(w) for c, w in zip(cells, widths)))
    return "\n".join(lines)

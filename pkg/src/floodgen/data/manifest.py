"""Manifest construction and train/test splitting."""

from __future__ import annotations

import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from floodgen.types import EVENTS, Manifest, TripletRecord, ValidationError

RASTER_EXTS = (".png", ".tif", ".tiff")


def _stems(directory: Path) -> dict[str, Path]:
    out: dict[str, Path] = {}
    for p in sorted(directory.iterdir()):
        if p.suffix.lower() in RASTER_EXTS:
            if p.stem in out:
                raise ValidationError(f"duplicate tile_id {p.stem!r} in {directory}")
            out[p.stem] = p
    return out


def build_manifest(pre_dir: str | Path, mask_dir: str | Path, post_dir: str | Path,
                   dataset_name: str = "dataset", *, event: str = "synthetic",
                   gsd_m_per_px: float = 0.5) -> Manifest:
    """Pair rasters across three directories by filename stem.

    Incomplete triples are reported via a warning, never silently
    dropped; zero complete triples is an error.
    """
    pre_dir, mask_dir, post_dir = Path(pre_dir), Path(mask_dir), Path(post_dir)
    for d in (pre_dir, mask_dir, post_dir):
        if not d.is_dir():
            raise ValidationError(f"directory does not exist: {d}")

    pre, mask, post = _stems(pre_dir), _stems(mask_dir), _stems(post_dir)
    all_ids = sorted(set(pre) | set(mask) | set(post))
    complete = [t for t in all_ids if t in pre and t in mask and t in post]
    incomplete = [t for t in all_ids if t not in complete]
    if incomplete:
        warnings.warn(
            f"{len(incomplete)} incomplete triple(s) skipped: {incomplete}",
            stacklevel=2)
    if not complete:
        raise ValidationError(
            f"no complete (pre, mask, post) triples found under {pre_dir.parent}")

    records = [
        TripletRecord(
            tile_id=t,
            pre_path=str(pre[t]),
            mask_path=str(mask[t]),
            post_path=str(post[t]),
            event=event,
            gsd_m_per_px=gsd_m_per_px,
        )
        for t in complete
    ]
    return Manifest(records=records, dataset_name=dataset_name)


def split_dataset(manifest: Manifest, policy: str, *, seed: int = 0,
                  test_frac: float = 0.2,
                  test_events: set[str] | None = None) -> Manifest:
    """Assign each record to train or test.

    policy "random": a seeded shuffle sends round(n * test_frac) records
    to test, deterministically. policy "by_event": every record whose
    event is listed goes to test.
    """
    if policy == "random":
        if not 0.0 <= test_frac <= 1.0:
            raise ValidationError(f"test_frac must be in [0,1], got {test_frac}")
        ids = sorted(r.tile_id for r in manifest.records)
        rng = np.random.default_rng(seed)
        rng.shuffle(ids)
        n_test = int(round(len(ids) * test_frac))
        test_ids = set(ids[:n_test])
        records = [replace(r, split="test" if r.tile_id in test_ids else "train")
                   for r in manifest.records]
    elif policy == "by_event":
        if not test_events:
            raise ValidationError("by_event policy needs a nonempty test_events set")
        unknown = set(test_events) - set(EVENTS)
        if unknown:
            raise ValidationError(f"unknown event name(s): {sorted(unknown)}")
        records = [replace(r, split="test" if r.event in test_events else "train")
                   for r in manifest.records]
    else:
        raise ValidationError(f"unknown split policy {policy!r}")

    return Manifest(records=records, dataset_name=manifest.dataset_name,
                    version=manifest.version)

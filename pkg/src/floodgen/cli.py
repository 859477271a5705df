"""Command-line entry points."""

from __future__ import annotations

from pathlib import Path

import click

from floodgen.types import Manifest


@click.group()
def main():
    """Flood scenario imagery toolkit."""


@main.command("prepare-data")
@click.option("--pre", "pre_dir", required=True, type=click.Path(exists=True))
@click.option("--mask", "mask_dir", required=True, type=click.Path(exists=True))
@click.option("--post", "post_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--name", default="dataset")
@click.option("--event", default="synthetic")
@click.option("--gsd", default=0.5, type=float)
@click.option("--tile-px", default=1024, type=int, help="expected tile size (informational)")
@click.option("--coarse-gsd", default=30.0, type=float)
@click.option("--split", "split_spec", default=None,
              help="e.g. 'by-event:harvey,florence' or 'random:0:0.2' (seed:frac)")
def prepare_data(pre_dir, mask_dir, post_dir, out_path, name, event, gsd,
                 tile_px, coarse_gsd, split_spec):
    """Pair pre/mask/post rasters into a JSONL manifest."""
    from floodgen.data.manifest import build_manifest, split_dataset

    manifest = build_manifest(pre_dir, mask_dir, post_dir, name,
                              event=event, gsd_m_per_px=gsd)
    if split_spec:
        kind, _, rest = split_spec.partition(":")
        if kind == "by-event":
            manifest = split_dataset(manifest, "by_event",
                                     test_events=set(rest.split(",")))
        elif kind == "random":
            seed_s, _, frac_s = rest.partition(":")
            manifest = split_dataset(manifest, "random", seed=int(seed_s or 0),
                                     test_frac=float(frac_s or 0.2))
        else:
            raise click.BadParameter(f"unknown split spec {split_spec!r}")
    manifest.save(out_path)
    click.echo(f"wrote {len(manifest)} records to {out_path}")


@main.command("make-synthetic")
@click.option("--n", default=48, type=int)
@click.option("--size", default=64, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--test-frac", default=0.25, type=float)
def make_synthetic(n, size, seed, out_dir, test_frac):
    """Generate a procedural triplet dataset with a color-match oracle."""
    from floodgen.experiments.synthetic import make_synthetic_dataset

    manifest = make_synthetic_dataset(n, size, seed, out_dir, test_frac=test_frac)
    click.echo(f"wrote {len(manifest)} triplets under {out_dir}")


@main.command("make-backbone")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--seed", default=0, type=int)
def make_backbone(out_path, seed):
    """Write the deterministic perceptual-backbone checkpoint."""
    from floodgen.metrics.perceptual import create_calibration_checkpoint

    create_calibration_checkpoint(out_path, seed=seed)
    click.echo(f"wrote perceptual backbone to {out_path}")


@main.command("train")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", type=click.Path(exists=True))
@click.option("--model", default="gan_physics")
@click.option("--preset", default="desk_64")
@click.option("--epochs", default=30, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--resume", "resume_from", type=click.Path(exists=True))
def train_cmd(config_path, manifest_path, model, preset, epochs, seed, out_dir,
              resume_from):
    """Train a conditional (or unconditioned) GAN."""
    from floodgen.experiments.config import RunConfig
    from floodgen.experiments.train_loop import train

    if config_path:
        cfg = RunConfig.load(config_path)
    else:
        if not manifest_path:
            raise click.BadParameter("either --config or --manifest is required")
        cfg = RunConfig(dataset=manifest_path, model=model, preset=preset,
                        epochs=epochs, seed=seed)
    ckpt = train(cfg, out_dir, resume_from=resume_from, log_every=1)
    click.echo(f"checkpoint: {ckpt}")


@main.command("train-segmenter")
@click.option("--labels", "labels_dir", required=True, type=click.Path(exists=True),
              help="directory with images/ and masks/ paired by filename stem")
@click.option("--cv", "k", default=4, type=int)
@click.option("--holdout", default=23, type=int)
@click.option("--steps", default=200, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def train_segmenter_cmd(labels_dir, k, holdout, steps, seed, out_path):
    """Train the flood segmenter, with optional cross validation."""
    import torch

    from floodgen.io_utils import load_image, load_mask
    from floodgen.segmentation import SegmenterConfig, cross_validate, train_segmenter

    labels_dir = Path(labels_dir)
    imgs = sorted((labels_dir / "images").glob("*.png"))
    labeled = [(load_image(p), load_mask(labels_dir / "masks" / p.name))
               for p in imgs]
    cfg = SegmenterConfig()
    if k > 1 and len(labeled) > holdout:
        cv = cross_validate(labeled, k=k, holdout=holdout, cfg=cfg, seed=seed,
                            steps=steps)
        click.echo(f"fold IoU: {[f'{v:.3f}' for v in cv['fold_iou']]}  "
                   f"mean {cv['mean_iou']:.3f}")
    result = train_segmenter(labeled, cfg, seed=seed, steps=steps)
    torch.save({"state_dict": result["state_dict"]}, out_path)
    click.echo(f"segmenter saved to {out_path}")


@main.command("evaluate")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_tag", required=True)
@click.option("--checkpoint", "ckpt_path", type=click.Path(exists=True))
@click.option("--backbone", "backbone_path", required=True, type=click.Path(exists=True))
@click.option("--mask-resolution", default="high", type=click.Choice(["high", "low"]))
@click.option("--coarse-gsd", default=30.0, type=float)
@click.option("--oracle-segmenter/--no-oracle-segmenter", default=True,
              help="use the synthetic color-match oracle as m_seg")
@click.option("--segmenter", "seg_path", type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def evaluate_cmd(manifest_path, model_tag, ckpt_path, backbone_path,
                 mask_resolution, coarse_gsd, oracle_segmenter, seg_path, out_dir):
    """Score a model on a manifest's test split."""
    from floodgen.experiments.config import EvalConfig
    from floodgen.experiments.evaluate import evaluate, make_model_fn
    from floodgen.experiments.synthetic import oracle_segmenter as make_oracle
    from floodgen.gan.checkpoint import load_checkpoint
    from floodgen.metrics.evaluate import write_records_csv, write_records_json
    from floodgen.metrics.perceptual import PerceptualDistance

    manifest = Manifest.load(manifest_path)
    ckpt = load_checkpoint(ckpt_path) if ckpt_path else None
    model_fn = make_model_fn(model_tag, ckpt)
    if seg_path:
        import torch

        from floodgen.segmentation import SegmenterConfig, build_segmenter, segment
        model = build_segmenter(SegmenterConfig())
        model.load_state_dict(torch.load(seg_path, weights_only=True)["state_dict"])
        segmenter = lambda img: segment(img, model)
    elif oracle_segmenter:
        segmenter = make_oracle()
    else:
        raise click.BadParameter("supply --segmenter or keep --oracle-segmenter")

    report = evaluate(model_fn, model_tag, manifest, segmenter,
                      PerceptualDistance(backbone_path),
                      EvalConfig(mask_resolution=mask_resolution,
                                 coarse_gsd=coarse_gsd))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_records_csv(report.records, out_dir / "records.csv")
    write_records_json(report.records, out_dir / "records.json")
    (out_dir / "summary.txt").write_text(report.table + "\n")
    click.echo(report.table)


@main.command("generate")
@click.option("--model", "model_tag", default="handcrafted")
@click.option("--color", default="#998d6f")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--checkpoint", "ckpt_path", type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def generate_cmd(model_tag, color, manifest_path, ckpt_path, out_dir):
    """Run a generator or baseline over every manifest record."""
    from floodgen.baselines import OverlayColor, handcrafted_composite
    from floodgen.experiments.evaluate import make_model_fn
    from floodgen.gan.checkpoint import load_checkpoint
    from floodgen.io_utils import load_image, load_mask, save_image

    manifest = Manifest.load(manifest_path)
    if model_tag == "handcrafted":
        overlay = OverlayColor.from_hex(color)
        model_fn = lambda pre, mask: handcrafted_composite(pre, mask, overlay)
    else:
        ckpt = load_checkpoint(ckpt_path) if ckpt_path else None
        model_fn = make_model_fn(model_tag, ckpt)
    out_dir = Path(out_dir)
    for rec in manifest.records:
        pre = load_image(rec.pre_path, rec.gsd_m_per_px, rec.tile_id, rec.event)
        mask = load_mask(rec.mask_path, rec.gsd_m_per_px)
        save_image(model_fn(pre, mask), out_dir / f"{rec.tile_id}.png")
    click.echo(f"wrote {len(manifest)} images to {out_dir}")


@main.command("render-grid")
@click.option("--images", "images_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--cols", default=8, type=int)
@click.option("--sample", default=None, type=int)
@click.option("--seed", default=0, type=int)
def render_grid_cmd(images_dir, out_path, cols, sample, seed):
    """Montage a directory of equally-sized PNG tiles."""
    from floodgen.experiments.grid import render_grid
    from floodgen.io_utils import load_image

    images = [load_image(p) for p in sorted(Path(images_dir).glob("*.png"))]
    render_grid(images, out_path, cols, sample=sample, seed=seed)
    click.echo(f"grid written to {out_path}")


@main.command("serve")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--dataset-name", default="default")
@click.option("--checkpoint", "ckpt_path", type=click.Path(exists=True))
@click.option("--backbone", "backbone_path", type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve_cmd(manifest_path, dataset_name, ckpt_path, backbone_path, host, port):
    """Start the HTTP inference service (handcrafted baseline always loaded)."""
    import uvicorn

    from floodgen.experiments.evaluate import make_model_fn
    from floodgen.experiments.synthetic import oracle_segmenter
    from floodgen.gan.checkpoint import load_checkpoint
    from floodgen.service.app import ServiceState, create_app

    models = {"handcrafted": make_model_fn("handcrafted")}
    if ckpt_path:
        ckpt = load_checkpoint(ckpt_path)
        tag = (ckpt.extra or {}).get("model", "gan_physics")
        models[tag] = make_model_fn(tag, ckpt)
    state = ServiceState(datasets={dataset_name: Manifest.load(manifest_path)},
                         models=models, segmenter=oracle_segmenter())
    uvicorn.run(create_app(state), host=host, port=port)


if __name__ == "__main__":
    main()

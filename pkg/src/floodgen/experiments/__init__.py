from floodgen.experiments.config import EvalConfig, Preset, RunConfig, get_preset
from floodgen.experiments.synthetic import make_synthetic_dataset, oracle_segmenter
from floodgen.experiments.train_loop import train
from floodgen.experiments.evaluate import EvalReport, evaluate, make_model_fn
from floodgen.experiments.grid import render_grid

__all__ = [
    "RunConfig",
    "EvalConfig",
    "Preset",
    "get_preset",
    "make_synthetic_dataset",
    "oracle_segmenter",
    "train",
    "evaluate",
    "EvalReport",
    "make_model_fn",
    "render_grid",
]

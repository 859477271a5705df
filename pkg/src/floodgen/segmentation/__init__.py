from floodgen.segmentation.unet import (
    SegmenterConfig,
    UNetSegmenter,
    build_segmenter,
    segment,
    soft_iou_loss,
)
from floodgen.segmentation.train import cross_validate, make_folds, train_segmenter

__all__ = [
    "SegmenterConfig",
    "UNetSegmenter",
    "build_segmenter",
    "segment",
    "soft_iou_loss",
    "train_segmenter",
    "cross_validate",
    "make_folds",
]

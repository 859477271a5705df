from floodgen.metrics.iou import iou
from floodgen.metrics.fvps import fvps
from floodgen.metrics.perceptual import PerceptualDistance, perceptual_distance
from floodgen.metrics.evaluate import (
    EpsilonConfig,
    MetricRecord,
    MetricSummary,
    aggregate,
    evaluate_image,
    is_physically_consistent,
    render_summary_table,
    write_records_csv,
    write_records_json,
)

__all__ = [
    "iou",
    "fvps",
    "perceptual_distance",
    "PerceptualDistance",
    "MetricRecord",
    "MetricSummary",
    "EpsilonConfig",
    "evaluate_image",
    "is_physically_consistent",
    "aggregate",
    "write_records_csv",
    "write_records_json",
    "render_summary_table",
]

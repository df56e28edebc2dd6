"""
Training loops, configuration and metrics
"""

from shotdp.training.config import TrainConfig, TrainMode, format_shots, parse_shots
from shotdp.training.metrics import (
    CSV_COLUMNS,
    METRICS_SCHEMA_VERSION,
    MetricsRecord,
    StepMetrics,
)
from shotdp.training.trainer import (
    RunResult,
    Trainer,
    adaptive_qshiftdp_step,
    evaluate,
    init_params,
    pixeldp_perturb,
    privatize_gradient,
    qshiftdp_step,
    sample_batch,
    train,
)

__all__ = [
    "TrainConfig",
    "TrainMode",
    "format_shots",
    "parse_shots",
    "CSV_COLUMNS",
    "METRICS_SCHEMA_VERSION",
    "MetricsRecord",
    "StepMetrics",
    "RunResult",
    "Trainer",
    "adaptive_qshiftdp_step",
    "evaluate",
    "init_params",
    "pixeldp_perturb",
    "privatize_gradient",
    "qshiftdp_step",
    "sample_batch",
    "train",
]

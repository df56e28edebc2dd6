"""
Experiment configuration, grid runner and studies
"""

from shotdp.experiments.config import ExperimentConfig, GridCell
from shotdp.experiments.runner import (
    CellOutput,
    ExperimentRunner,
    build_datasets,
    build_summary,
    run_cell,
    run_experiment,
)
from shotdp.experiments.studies import (
    STUDY_NAMES,
    StudyResult,
    accuracy_table_study,
    adaptive_vs_fixed_study,
    hyperparam_study,
    noise_reduction_study,
    variance_study,
)

__all__ = [
    "ExperimentConfig",
    "GridCell",
    "CellOutput",
    "ExperimentRunner",
    "build_datasets",
    "build_summary",
    "run_cell",
    "run_experiment",
    "STUDY_NAMES",
    "StudyResult",
    "accuracy_table_study",
    "adaptive_vs_fixed_study",
    "hyperparam_study",
    "noise_reduction_study",
    "variance_study",
]

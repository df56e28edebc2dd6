"""
Experiment runner - executes every cell of an experiment grid
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from shotdp.circuit.labels import LabelObservables
from shotdp.config import SystemConfig
from shotdp.data.datasets import (
    Dataset,
    gen_bars_stripes,
    gen_binary_blobs,
    load_downscaled_mnist,
    train_test_split,
)
from shotdp.experiments.config import ExperimentConfig, GridCell
from shotdp.sim.rng import RngStream
from shotdp.training.config import TrainMode, format_shots
from shotdp.training.metrics import CSV_COLUMNS, METRICS_SCHEMA_VERSION
from shotdp.training.trainer import STREAM_DATA, RunResult, Trainer
from shotdp.utils.logger import LogContext
from shotdp.utils.serialization import save_json_file, write_metrics_csv

logger = logging.getLogger(__name__)

# child keys of the data stream
DATA_TRAIN = 0
DATA_TEST = 1
DATA_SPLIT = 2


def build_datasets(config: ExperimentConfig, seed: int) -> Tuple[Dataset, Dataset]:
    """
    Training and test sets of a run

    Generated datasets draw the two sets from separate children of the
    run's data stream; MNIST is loaded once and split.

    Args:
        config: Experiment configuration
        seed: Seed of the grid cell

    Returns:
        (training set, test set)
    """
    section = config.dataset
    data_stream = RngStream(seed).child(STREAM_DATA)

    if section.name == "bars_stripes":
        train = gen_bars_stripes(
            section.n_samples,
            data_stream.child(DATA_TRAIN),
            section.uniform_fraction,
            section.noise_std,
        )
        test = gen_bars_stripes(
            section.n_test,
            data_stream.child(DATA_TEST),
            section.uniform_fraction,
            section.noise_std,
        )
        return train, test

    if section.name == "binary_blobs":
        train = gen_binary_blobs(
            section.n_samples,
            section.flip_prob,
            data_stream.child(DATA_TRAIN),
            section.n_classes,
        )
        test = gen_binary_blobs(
            section.n_test,
            section.flip_prob,
            data_stream.child(DATA_TEST),
            section.n_classes,
        )
        return train, test

    dataset = load_downscaled_mnist(section.path)
    return train_test_split(dataset, section.test_fraction, data_stream.child(DATA_SPLIT))


@dataclass(frozen=True)
class CellOutput:
    """Files written for one grid cell"""

    cell: GridCell
    metrics_path: Path
    summary_path: Path
    timing_path: Path
    final_accuracy: float


def build_summary(
    config: ExperimentConfig,
    cell: GridCell,
    result: RunResult,
    train_size: int,
    test_size: int,
    metrics_file: str,
) -> Dict[str, Any]:
    """
    Summary mapping of a finished run

    The wall time is only included when ``[output] record_timing`` is set,
    otherwise the key is present with a null value.
    """
    record = result.metrics
    calib = result.calibration
    private = cell.mode is not TrainMode.NON_PRIVATE
    return {
        "schema_version": METRICS_SCHEMA_VERSION,
        "config": config.to_dict(),
        "cell": cell.to_dict(),
        "dataset": config.dataset.name,
        "mode": cell.mode.value,
        "seed": cell.seed,
        "shots": format_shots(cell.n_shots),
        "alpha": cell.alpha,
        "n_train": train_size,
        "n_test": test_size,
        "final_accuracy": record.final_accuracy,
        "final_nll": record.final_nll,
        "train_accuracy": record.train_accuracy,
        "epsilon": record.epsilon,
        "delta": config.privacy.delta if private else None,
        "delta_effective": record.delta_effective,
        "c_dp": calib.c_dp if calib is not None else None,
        "sigma2": calib.sigma2 if calib is not None else None,
        "sensitivity": calib.delta_sens if calib is not None else None,
        "epsilon0": calib.epsilon0 if calib is not None else None,
        "metrics_file": metrics_file,
        "wall_time_s": record.wall_time_s if config.output.record_timing else None,
    }


def run_cell(
    config: ExperimentConfig, cell: GridCell, digits: int = 17
) -> CellOutput:
    """
    Train one grid cell and write its metrics, summary and timing files

    Args:
        config: Experiment configuration
        cell: Grid cell to run
        digits: Significant digits of written floats

    Returns:
        CellOutput with the written paths

    Raises:
        ValueError: If the cell's training configuration is invalid
        OSError: If an output file cannot be written
    """
    out_dir = Path(config.output.path)
    stem = cell.stem(config.dataset.name)

    with LogContext(logger, f"cell {stem}"):
        train_set, test_set = build_datasets(config, cell.seed)
        ansatz = config.ansatz()
        labels = LabelObservables.for_classes(ansatz.n_qubits, train_set.n_classes)
        train_config = config.train_config(cell)
        errors = train_config.validate(train_set.size)
        if errors:
            raise ValueError(f"Invalid cell {stem}: {'; '.join(errors)}")

        result = Trainer(ansatz, train_config, labels).fit(train_set, test_set)

    metrics_path = out_dir / f"{stem}.metrics.csv"
    summary_path = out_dir / f"{stem}.summary.json"
    timing_path = out_dir / f"{stem}.timing.json"

    write_metrics_csv(metrics_path, result.metrics.to_rows(), CSV_COLUMNS, digits)
    summary = build_summary(
        config, cell, result, train_set.size, test_set.size, metrics_path.name
    )
    save_json_file(summary, summary_path, digits=digits)
    save_json_file(
        {"cell": stem, "wall_time_s": result.metrics.wall_time_s},
        timing_path,
        digits=digits,
    )

    return CellOutput(
        cell=cell,
        metrics_path=metrics_path,
        summary_path=summary_path,
        timing_path=timing_path,
        final_accuracy=result.metrics.final_accuracy,
    )


def _run_cell_job(args: Tuple[Dict[str, Any], GridCell, int]) -> CellOutput:
    config_data, cell, digits = args
    return run_cell(ExperimentConfig.model_validate(config_data), cell, digits)


class ExperimentRunner:
    """
    Runs every cell of an experiment grid

    Cells are independent: each derives all randomness from its own seed
    and writes its own files, so they may run in worker processes.

    Example:
    >>> from shotdp.config import SystemConfig
    >>> from shotdp.experiments import ExperimentConfig, ExperimentRunner

    >>> config = ExperimentConfig.from_file("bars.toml")
    >>> runner = ExperimentRunner(config, SystemConfig(workers=4))
    >>> outputs = runner.run()
    """

    def __init__(
        self,
        config: ExperimentConfig,
        system_config: Optional[SystemConfig] = None,
    ):
        """
        Initialize the runner

        Args:
            config: Experiment configuration
            system_config: Process-wide settings (defaults to SystemConfig())
        """
        self.config = config
        self.system_config = system_config or SystemConfig()
        errors = self.system_config.validate()
        if errors:
            raise ValueError(f"Invalid system configuration: {errors}")

    @property
    def cells(self) -> List[GridCell]:
        """Cells of the grid in run order"""
        return self.config.cells()

    def run(
        self, on_cell_done: Optional[Callable[[CellOutput], None]] = None
    ) -> List[CellOutput]:
        """
        Run all cells

        Args:
            on_cell_done: Called after each finished cell (in grid order)

        Returns:
            One CellOutput per cell, in grid order
        """
        cells = self.cells
        digits = self.system_config.significant_digits
        workers = min(self.system_config.workers, len(cells))
        Path(self.config.output.path).mkdir(parents=True, exist_ok=True)

        logger.info(f"Running {self.config.describe()} with {workers} worker(s)")

        outputs: List[CellOutput] = []
        if workers <= 1:
            for cell in cells:
                output = run_cell(self.config, cell, digits)
                outputs.append(output)
                if on_cell_done:
                    on_cell_done(output)
        else:
            config_data = self.config.model_dump()
            jobs = [(config_data, cell, digits) for cell in cells]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for output in pool.map(_run_cell_job, jobs):
                    outputs.append(output)
                    if on_cell_done:
                        on_cell_done(output)

        accuracies = [o.final_accuracy for o in outputs if not math.isnan(o.final_accuracy)]
        if accuracies:
            logger.info(
                f"Finished {len(outputs)} cells, mean accuracy "
                f"{sum(accuracies) / len(accuracies):.4f}"
            )
        return outputs


def run_experiment(
    config: ExperimentConfig, system_config: Optional[SystemConfig] = None
) -> List[Path]:
    """
    Run an experiment grid

    Args:
        config: Experiment configuration
        system_config: Process-wide settings

    Returns:
        Paths of the written summary files, in grid order
    """
    outputs = ExperimentRunner(config, system_config).run()
    return [o.summary_path for o in outputs]

"""Tests for experiments module - Configuration, Grid Runner and Studies.

Use Case Description:
This test file validates how experiments are described, executed and summarized. Key functionalities tested include:

1. **Experiment Configuration**: Validated TOML/YAML settings
   - Unknown fields and invalid values rejected before any computation
   - Dotted overrides and grid expansion

2. **Grid Runner**: Cell execution and result files
   - Metrics CSV, summary JSON and timing sidecar per cell
   - Byte-identical reruns from the same configuration

3. **Studies**: Variance floor, noise reduction and accuracy sweeps
   - No variance below the depolarizing floor
   - Noise reduction shrinking with more shots and larger batches
   - Accuracy trends over privacy budgets, shot counts and calibrations
"""

import json
import math

import pytest
from pydantic import ValidationError

from shotdp.config import SystemConfig
from shotdp.experiments import (
    ExperimentConfig,
    ExperimentRunner,
    GridCell,
    StudyResult,
    accuracy_table_study,
    adaptive_vs_fixed_study,
    build_datasets,
    noise_reduction_study,
    run_experiment,
    variance_study,
)
from shotdp.training import CSV_COLUMNS, TrainMode
from shotdp.utils.serialization import read_metrics_csv

TOML_CONFIG = """
[dataset]
name = "bars_stripes"
n_samples = 40
n_test = 20

[train]
mode = "adaptive"
steps = 2
batch_size = 8
shots = 50

[privacy]
epsilon = 0.5

[grid]
alphas = [0.0, 0.1]
"""

YAML_CONFIG = """
dataset:
  name: binary_blobs
  n_samples: 30
  n_test: 10
train:
  batch_size: 8
  shots: inf
  mode: non-private
"""

# slack on five-seed mean test accuracies
ACCURACY_TOL = 0.01


class TestExperimentConfig:
    """Tests for experiment configuration."""

    def test_defaults(self):
        """Test the default experiment."""
        config = ExperimentConfig()

        assert config.dataset.name == "bars_stripes"
        assert config.train.batch_size == 512
        assert math.isinf(config.train.shots)
        assert config.privacy.beta == 1e-5
        assert config.output.record_timing is False
        assert len(config.cells()) == 1

    def test_unknown_field_rejected(self, tiny_config_data):
        """Test that typos in field names are reported."""
        tiny_config_data["train"]["learning_rate"] = 0.1

        with pytest.raises(ValidationError):
            ExperimentConfig.from_dict(tiny_config_data)

    def test_invalid_values_rejected(self, tiny_config_data):
        """Test field-level validation."""
        for section, key, value in [
            ("train", "mode", "quantum"),
            ("train", "shots", 1),
            ("train", "shots", "lots"),
            ("privacy", "epsilon", 0.0),
            ("privacy", "delta", 1.5),
            ("dataset", "name", "cifar"),
        ]:
            data = {k: dict(v) for k, v in tiny_config_data.items()}
            data[section][key] = value
            with pytest.raises(ValueError):
                ExperimentConfig.from_dict(data)

    def test_shots_inf(self, tiny_config_data):
        """Test the 'inf' shot count."""
        tiny_config_data["train"]["shots"] = "inf"

        config = ExperimentConfig.from_dict(tiny_config_data)

        assert math.isinf(config.train.shots)

    def test_adaptive_needs_finite_shots(self, tiny_config_data):
        """Test that an adaptive cell with N_s = ∞ is rejected."""
        tiny_config_data["train"]["mode"] = "adaptive"
        tiny_config_data["train"]["shots"] = "inf"

        with pytest.raises(ValidationError):
            ExperimentConfig.from_dict(tiny_config_data)

    def test_batch_exceeds_dataset(self, tiny_config_data):
        """Test that B > N is rejected."""
        tiny_config_data["train"]["batch_size"] = 100

        with pytest.raises(ValidationError):
            ExperimentConfig.from_dict(tiny_config_data)

    def test_mnist_needs_path(self):
        """Test that the MNIST dataset requires a file."""
        with pytest.raises(ValidationError):
            ExperimentConfig.from_dict({"dataset": {"name": "mnist"}})

    def test_overrides(self, tiny_config_data):
        """Test dotted overrides; None values leave settings untouched."""
        config = ExperimentConfig.from_dict(
            tiny_config_data, {"train.lr": 0.05, "privacy.epsilon": None}
        )

        assert config.train.lr == 0.05
        assert config.privacy.epsilon == 1.0
        with pytest.raises(ValueError):
            ExperimentConfig.from_dict(tiny_config_data, {"lr": 0.05})

    def test_from_toml(self, tmp_path):
        """Test loading a TOML file with a grid."""
        path = tmp_path / "experiment.toml"
        path.write_text(TOML_CONFIG)

        config = ExperimentConfig.from_file(path, {"train.seed": 3})
        cells = config.cells()

        assert config.train.mode is TrainMode.ADAPTIVE
        assert [cell.alpha for cell in cells] == [0.0, 0.1]
        assert all(cell.seed == 3 and cell.epsilon == 0.5 for cell in cells)

    def test_from_yaml(self, tmp_path):
        """Test loading a YAML file."""
        path = tmp_path / "experiment.yaml"
        path.write_text(YAML_CONFIG)

        config = ExperimentConfig.from_file(path)

        assert config.dataset.name == "binary_blobs"
        assert config.train.mode is TrainMode.NON_PRIVATE
        assert math.isinf(config.train.shots)

    def test_unparsable_file(self, tmp_path):
        """Test that parse errors surface as ValueError."""
        path = tmp_path / "broken.toml"
        path.write_text("[train\nlr = ")

        with pytest.raises(ValueError):
            ExperimentConfig.from_file(path)

    def test_grid_cells(self, tiny_config_data):
        """Test grid expansion order and the ε collapse of non-private cells."""
        tiny_config_data["grid"] = {
            "modes": ["qshiftdp", "non-private"],
            "epsilons": [0.5, 1.0],
            "shots": [50, "inf"],
            "seeds": [0, 1],
        }

        cells = ExperimentConfig.from_dict(tiny_config_data).cells()

        private = [c for c in cells if c.mode is TrainMode.QSHIFTDP]
        baseline = [c for c in cells if c.mode is TrainMode.NON_PRIVATE]
        assert len(private) == 8
        assert len(baseline) == 4
        assert all(math.isinf(c.epsilon) for c in baseline)
        assert cells[0] == GridCell(TrainMode.QSHIFTDP, 0.5, 50.0, 0.0, 0)

    def test_cell_stem(self):
        """Test output file names."""
        cell = GridCell(TrainMode.ADAPTIVE, 0.5, 1000.0, 0.1, 2)
        baseline = GridCell(TrainMode.NON_PRIVATE, math.inf, math.inf, 0.0, 0)

        assert cell.stem("bars_stripes") == "bars_stripes_adaptive_eps0.5_shots1000_alpha0.1_seed2"
        assert baseline.stem("mnist") == "mnist_non-private_epsinf_shotsinf_alpha0_seed0"

    def test_train_config(self, tiny_config_data):
        """Test conversion of a cell to a TrainConfig."""
        config = ExperimentConfig.from_dict(tiny_config_data)
        cell = GridCell(TrainMode.QSHIFTDP, 0.25, 50.0, 0.1, 7)

        train_config = config.train_config(cell)

        assert train_config.budget.epsilon == 0.25
        assert train_config.budget.beta == 1e-5
        assert train_config.seed == 7
        assert train_config.alpha == 0.1
        assert train_config.is_valid(40)


class TestRunner:
    """Tests for running experiment grids."""

    def test_build_datasets(self, tiny_config_data):
        """Test separate, reproducible training and test sets."""
        config = ExperimentConfig.from_dict(tiny_config_data)

        train, test = build_datasets(config, 0)
        again, _ = build_datasets(config, 0)

        assert train.size == 40 and test.size == 20
        assert (train.inputs == again.inputs).all()

    def test_run_writes_files(self, tiny_config_data, tmp_path):
        """Test the three files of a cell and the summary contents."""
        config = ExperimentConfig.from_dict(tiny_config_data)

        summaries = run_experiment(config)

        assert len(summaries) == 1
        stem = "bars_stripes_qshiftdp_eps1_shots50_alpha0_seed0"
        out = tmp_path / "results"
        assert summaries[0] == out / f"{stem}.summary.json"
        assert (out / f"{stem}.timing.json").exists()

        rows = read_metrics_csv(out / f"{stem}.metrics.csv")
        assert len(rows) == 2
        assert tuple(rows[0].keys()) == CSV_COLUMNS
        assert rows[0]["eta_hat_B2"] is None

        summary = json.loads(summaries[0].read_text())
        for key in ("final_accuracy", "c_dp", "sigma2", "sensitivity", "delta_effective"):
            assert key in summary
        assert summary["wall_time_s"] is None
        assert summary["metrics_file"] == f"{stem}.metrics.csv"
        assert summary["n_train"] == 40 and summary["n_test"] == 20
        assert 0.0 <= summary["final_accuracy"] <= 1.0

    def test_record_timing(self, tiny_config_data):
        """Test that wall time enters the summary only when requested."""
        tiny_config_data["output"]["record_timing"] = True

        path = run_experiment(ExperimentConfig.from_dict(tiny_config_data))[0]

        assert json.loads(path.read_text())["wall_time_s"] > 0.0

    def test_non_private_summary(self, tiny_config_data):
        """Test summary values of the non-private baseline."""
        tiny_config_data["train"]["mode"] = "non-private"

        path = run_experiment(ExperimentConfig.from_dict(tiny_config_data))[0]
        summary = json.loads(path.read_text())

        assert summary["epsilon"] == "inf"
        assert summary["delta"] is None
        assert summary["c_dp"] is None

    def test_rerun_byte_identical(self, tiny_config_data):
        """Test that a rerun writes byte-identical metrics and summaries."""
        tiny_config_data["train"]["mode"] = "adaptive"
        config = ExperimentConfig.from_dict(tiny_config_data)

        path = run_experiment(config)[0]
        first_summary = path.read_bytes()
        metrics_path = path.with_name(path.name.replace(".summary.json", ".metrics.csv"))
        first_metrics = metrics_path.read_bytes()

        run_experiment(config)

        assert path.read_bytes() == first_summary
        assert metrics_path.read_bytes() == first_metrics

    def test_runner_callback(self, tiny_config_data):
        """Test progress callbacks in grid order."""
        tiny_config_data["grid"] = {"seeds": [0, 1]}
        runner = ExperimentRunner(ExperimentConfig.from_dict(tiny_config_data))
        seen = []

        outputs = runner.run(seen.append)

        assert [o.cell.seed for o in seen] == [0, 1]
        assert outputs == seen

    def test_invalid_system_config(self, tiny_config_data):
        """Test that the runner rejects invalid system settings."""
        with pytest.raises(ValueError):
            ExperimentRunner(
                ExperimentConfig.from_dict(tiny_config_data), SystemConfig(workers=0)
            )


class TestStudies:
    """Tests for the benchmark studies."""

    def test_variance_floor_holds(self):
        """Test that no shifted-circuit variance falls below α·σ²_uniform."""
        result = variance_study(n_samples=200, alphas=(0.0, 0.1, 0.2), seed=1)

        assert len(result.rows) == 6
        assert all(row["violations"] == 0 for row in result.rows)
        assert all(row["min"] >= row["floor"] - 1e-10 for row in result.rows)

    def test_study_save(self, tmp_path):
        """Test CSV and JSON output of a study."""
        result = StudyResult(
            name="demo",
            columns=("a", "b"),
            rows=[{"a": 1, "b": 0.5}, {"a": 2, "b": None}],
            parameters={"seed": 0},
        )

        csv_path, json_path = result.save(tmp_path)

        assert csv_path.read_text() == "a,b\n1,0.5\n2,\n"
        assert json.loads(json_path.read_text())["parameters"] == {"seed": 0}

    @pytest.mark.slow
    def test_noise_reduction_trends(self):
        """Test that savings shrink with more shots and with larger batches."""
        result = noise_reduction_study(
            shots=(100, 1000, 10000), batch_sizes=(64, 256), n_batches=20
        )
        rows = {(r["shots"], r["batch_size"]): r for r in result.rows}

        for batch_size in (64, 256):
            means = [rows[(s, batch_size)]["mean_reduction_pct"] for s in (100, 1000, 10000)]
            assert means[0] > means[1] > means[2] >= 0.0
        assert (
            rows[(100, 64)]["mean_reduction_pct"] > rows[(100, 256)]["mean_reduction_pct"]
        )
        assert 5.0 <= rows[(100, 64)]["mean_reduction_pct"] <= 25.0
        assert rows[(10000, 64)]["mean_reduction_pct"] < 2.0

    @pytest.mark.slow
    def test_accuracy_table_trends(self, tmp_path):
        """Test accuracy over (ε, N_s) on Bars & Stripes with five seeds."""
        shots = (1000, 10000, 100000, math.inf)
        result = accuracy_table_study(
            epsilons=(0.1, 0.5, 1.0), shots=shots, out_dir=tmp_path
        )
        table = {
            (r["epsilon"], r["shots"]): r["mean_accuracy"] for r in result.rows
        }
        labels = ["1000", "10000", "100000", "inf"]

        assert len(table) == 12
        assert all(r["n_seeds"] == 5 for r in result.rows)
        for epsilon in (0.1, 0.5, 1.0):
            accuracies = [table[(epsilon, s)] for s in labels]
            for lower, higher in zip(accuracies, accuracies[1:]):
                assert higher >= lower - ACCURACY_TOL
        assert table[(1.0, "inf")] >= 0.85
        assert table[(0.1, "1000")] <= min(table.values()) + ACCURACY_TOL

    @pytest.mark.slow
    def test_adaptive_not_worse_than_fixed(self, tmp_path):
        """Test that adaptive calibration matches or beats fixed calibration at every α."""
        result = adaptive_vs_fixed_study(
            alphas=(0.0, 0.1, 0.2), epsilon=1.0, n_shots=1000, out_dir=tmp_path
        )
        table = {(r["alpha"], r["mode"]): r["mean_accuracy"] for r in result.rows}

        assert len(table) == 6
        for alpha in (0.0, 0.1, 0.2):
            assert table[(alpha, "adaptive")] >= table[(alpha, "qshiftdp")] - ACCURACY_TOL

"""
Studies reproducing the benchmark tables and sweeps
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from shotdp.circuit.ansatz import AnsatzSpec, psr_shifts
from shotdp.circuit.encoding import EncoderSpec, EncodingScheme, encode_batch
from shotdp.circuit.labels import LabelObservables
from shotdp.config import SystemConfig
from shotdp.data.datasets import gen_bars_stripes
from shotdp.experiments.config import ExperimentConfig
from shotdp.experiments.runner import CellOutput, ExperimentRunner
from shotdp.gradients.engine import GradientEngine
from shotdp.privacy.budget import NoiseCalibration, PrivacyBudget
from shotdp.privacy.calibration import (
    adaptive_sigma,
    batch_variance_estimator,
    noise_reduction_pct,
)
from shotdp.sim.measurement import (
    depolarize_probabilities,
    outcome_probabilities,
    uniform_variance,
)
from shotdp.sim.observables import Observable
from shotdp.sim.rng import RngStream
from shotdp.training.config import TrainMode, format_shots
from shotdp.training.trainer import init_params, sample_batch
from shotdp.utils.serialization import save_json_file, write_metrics_csv

logger = logging.getLogger(__name__)

FLOOR_TOL = 1e-10
"""Slack allowed below the depolarizing variance floor"""

STUDY_NAMES = (
    "variances",
    "noise-reduction",
    "accuracy-table",
    "adaptive-vs-fixed",
    "hyperparams",
)


@dataclass
class StudyResult:
    """Rows of a study plus the parameters it ran with"""

    name: str
    columns: Tuple[str, ...]
    rows: List[Dict[str, Any]]
    parameters: Dict[str, Any] = field(default_factory=dict)

    def save(self, out_dir, digits: int = 17) -> Tuple[Path, Path]:
        """
        Write ``{name}.csv`` and ``{name}.json`` into a directory

        Returns:
            (CSV path, JSON path)
        """
        out_dir = Path(out_dir)
        csv_path = out_dir / f"{self.name}.csv"
        json_path = out_dir / f"{self.name}.json"
        write_metrics_csv(csv_path, self.rows, self.columns, digits)
        save_json_file(
            {"study": self.name, "parameters": self.parameters, "rows": self.rows},
            json_path,
            digits=digits,
        )
        logger.info(f"Wrote study {self.name} to {csv_path} and {json_path}")
        return csv_path, json_path


def variance_study(
    n_samples: int = 1000,
    alphas: Sequence[float] = (0.0, 0.1, 0.2),
    n_qubits: int = 4,
    n_layers: int = 1,
    seed: int = 0,
) -> StudyResult:
    """
    Exact single-shot variances of shifted circuits against the depolarizing floor

    For random inputs, parameters and shifted coordinates, the variance of
    one shot of the depolarized output is compared with α·σ²_uniform, for a
    binary label-cost observable and a non-degenerate observable.

    Args:
        n_samples: Random (x, θ, k, ±) draws
        alphas: Depolarizing strengths
        n_qubits: Register size
        n_layers: Strongly entangling layers
        seed: Root seed

    Returns:
        StudyResult with one row per (observable, α)
    """
    if n_samples < 1:
        raise ValueError(f"Number of samples must be positive, got {n_samples}")
    ansatz = AnsatzSpec(n_qubits=n_qubits, n_layers=n_layers)
    rng = RngStream(seed).generator()

    inputs = rng.random((n_samples, n_qubits))
    thetas = rng.uniform(0.0, 2.0 * np.pi, size=(n_samples, ansatz.n_params))
    coords = rng.integers(0, ansatz.n_params, size=n_samples)
    signs = np.where(rng.integers(0, 2, size=n_samples) == 0, 1.0, -1.0)
    thetas[np.arange(n_samples), coords] += signs * psr_shifts(ansatz)[coords]

    states = ansatz.evolve(
        encode_batch(inputs, EncoderSpec(EncodingScheme.ANGLE, n_qubits)), thetas
    )

    observables = {
        "binary": LabelObservables.for_classes(n_qubits, 2).cost(0),
        "non_degenerate": Observable.non_degenerate(n_qubits),
    }
    rows = []
    for label, observable in observables.items():
        probs = outcome_probabilities(states, observable)
        outcomes = observable.outcomes
        for alpha in alphas:
            p = depolarize_probabilities(probs, observable, alpha)
            mean = p @ outcomes
            variances = np.maximum(p @ outcomes**2 - mean**2, 0.0)
            floor = alpha * uniform_variance(observable)
            violations = int(np.sum(variances < floor - FLOOR_TOL))
            rows.append(
                {
                    "observable": label,
                    "alpha": float(alpha),
                    "floor": floor,
                    "min": float(variances.min()),
                    "mean": float(variances.mean()),
                    "p05": float(np.percentile(variances, 5)),
                    "median": float(np.median(variances)),
                    "p95": float(np.percentile(variances, 95)),
                    "violations": violations,
                }
            )
            if violations:
                logger.error(
                    f"{violations} variances below the floor for {label}, alpha={alpha}"
                )

    return StudyResult(
        name="variances",
        columns=(
            "observable",
            "alpha",
            "floor",
            "min",
            "mean",
            "p05",
            "median",
            "p95",
            "violations",
        ),
        rows=rows,
        parameters={
            "n_samples": n_samples,
            "alphas": list(alphas),
            "n_qubits": n_qubits,
            "n_layers": n_layers,
            "seed": seed,
        },
    )


def noise_reduction_study(
    shots: Sequence[int] = (100, 1000, 10000),
    batch_sizes: Sequence[int] = (64, 128, 256, 512),
    n_batches: int = 20,
    epsilon: float = 1.0,
    delta: float = 1e-3,
    beta: float = 1e-5,
    c2: float = 1.0,
    steps: int = 30,
    n_samples: int = 1000,
    seed: int = 0,
) -> StudyResult:
    """
    Artificial noise saved by the adaptive calibration

    Each batch is drawn from Bars & Stripes with freshly initialized
    parameters; its shot statistics give η̂²_B and σ²_B.

    Args:
        shots: Shot counts N_s
        batch_sizes: Batch sizes B
        n_batches: Random batches per (N_s, B)
        epsilon: Target ε
        delta: Target δ
        beta: Significance level of the variance estimate
        c2: Accountant constant
        steps: Number of steps T entering C_DP
        n_samples: Dataset size N
        seed: Root seed

    Returns:
        StudyResult with one row per (N_s, B)
    """
    if n_batches < 1:
        raise ValueError(f"Number of batches must be positive, got {n_batches}")
    root = RngStream(seed)
    ansatz = AnsatzSpec(n_qubits=4, n_layers=1)
    labels = LabelObservables.for_classes(ansatz.n_qubits, 2)
    data = gen_bars_stripes(n_samples, root.child(0))
    engine = GradientEngine(ansatz)

    rows = []
    for i, n_shots in enumerate(shots):
        for j, batch_size in enumerate(batch_sizes):
            budget = PrivacyBudget(
                epsilon=epsilon,
                delta=delta,
                beta=beta,
                c2=c2,
                q=batch_size / n_samples,
                T=steps,
            )
            calib = NoiseCalibration.build(
                budget, ansatz, labels.costs[0], n_shots, batch_size, adaptive=True
            )
            reductions = []
            estimates = []
            for b in range(n_batches):
                stream = root.child(1, i, j, b)
                theta = init_params(ansatz, stream.child(0))
                batch = data.subset(sample_batch(data.size, batch_size, stream.child(1)))
                states = engine.encode(batch.inputs)
                costs = engine.label_costs(batch.labels, labels)
                _, stats = engine.sampled(states, theta, costs, n_shots, stream.child(2))
                eta_hat = batch_variance_estimator(stats, calib.z_beta)
                sigma2_B = adaptive_sigma(
                    calib.c_dp, eta_hat, ansatz.frequencies, n_shots, calib.delta_sens
                )
                estimates.append(eta_hat)
                reductions.append(noise_reduction_pct(calib.c_dp, sigma2_B))

            reductions = np.asarray(reductions)
            rows.append(
                {
                    "shots": int(n_shots),
                    "batch_size": int(batch_size),
                    "c_dp": calib.c_dp,
                    "fixed_sigma2": calib.sigma2,
                    "mean_eta_hat_B2": float(np.mean(estimates)),
                    "mean_reduction_pct": float(reductions.mean()),
                    "std_reduction_pct": float(reductions.std()),
                    "min_reduction_pct": float(reductions.min()),
                    "max_reduction_pct": float(reductions.max()),
                }
            )
            logger.debug(
                f"shots={n_shots} B={batch_size}: "
                f"reduction={reductions.mean():.3f}%"
            )

    return StudyResult(
        name="noise-reduction",
        columns=(
            "shots",
            "batch_size",
            "c_dp",
            "fixed_sigma2",
            "mean_eta_hat_B2",
            "mean_reduction_pct",
            "std_reduction_pct",
            "min_reduction_pct",
            "max_reduction_pct",
        ),
        rows=rows,
        parameters={
            "n_batches": n_batches,
            "epsilon": epsilon,
            "delta": delta,
            "beta": beta,
            "c2": c2,
            "steps": steps,
            "n_samples": n_samples,
            "seed": seed,
        },
    )


def _with_settings(
    base: ExperimentConfig, out_dir: Path, updates: Dict[str, Dict[str, Any]]
) -> ExperimentConfig:
    data = base.to_dict()
    for section, values in updates.items():
        data.setdefault(section, {}).update(values)
    data["output"]["path"] = str(out_dir)
    return ExperimentConfig.model_validate(data)


def _aggregate(
    outputs: Sequence[CellOutput],
    key: Callable[[CellOutput], Tuple[Hashable, ...]],
    key_columns: Tuple[str, ...],
) -> List[Dict[str, Any]]:
    """Mean and std of test accuracy per group, in first-seen order"""
    groups: Dict[Tuple[Hashable, ...], List[float]] = {}
    for output in outputs:
        groups.setdefault(key(output), []).append(output.final_accuracy)
    rows = []
    for values, accuracies in groups.items():
        acc = np.asarray(accuracies)
        row = dict(zip(key_columns, values))
        row.update(
            {
                "mean_accuracy": float(acc.mean()),
                "std_accuracy": float(acc.std()),
                "n_seeds": len(acc),
            }
        )
        rows.append(row)
    return rows


def accuracy_table_study(
    base: Optional[ExperimentConfig] = None,
    epsilons: Sequence[float] = (0.1, 0.5, 1.0),
    shots: Sequence[float] = (1000, 10000, 100000, math.inf),
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
    out_dir="results/accuracy-table",
    system_config: Optional[SystemConfig] = None,
) -> StudyResult:
    """
    Test accuracy over privacy budgets and shot counts

    Args:
        base: Settings shared by every run (Bars & Stripes defaults)
        epsilons: Privacy budgets ε
        shots: Shot counts N_s (∞ for exact expectations)
        seeds: Repeat seeds
        out_dir: Directory of the per-run files
        system_config: Process-wide settings (worker count)

    Returns:
        StudyResult with one row per (ε, N_s)
    """
    base = base or ExperimentConfig()
    config = _with_settings(
        base,
        Path(out_dir) / "runs",
        {
            "grid": {
                "modes": [base.train.mode.value],
                "epsilons": list(epsilons),
                "shots": list(shots),
                "alphas": None,
                "seeds": list(seeds),
            }
        },
    )
    outputs = ExperimentRunner(config, system_config).run()
    rows = _aggregate(
        outputs,
        lambda o: (o.cell.epsilon, format_shots(o.cell.n_shots)),
        ("epsilon", "shots"),
    )
    return StudyResult(
        name="accuracy-table",
        columns=("epsilon", "shots", "mean_accuracy", "std_accuracy", "n_seeds"),
        rows=rows,
        parameters={"config": config.to_dict()},
    )


def adaptive_vs_fixed_study(
    base: Optional[ExperimentConfig] = None,
    alphas: Sequence[float] = (0.0, 0.1, 0.2),
    epsilon: float = 1.0,
    n_shots: int = 1000,
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
    out_dir="results/adaptive-vs-fixed",
    system_config: Optional[SystemConfig] = None,
) -> StudyResult:
    """
    Adaptive against fixed calibration across depolarizing strengths

    Returns:
        StudyResult with one row per (α, mode)
    """
    base = base or ExperimentConfig()
    config = _with_settings(
        base,
        Path(out_dir) / "runs",
        {
            "grid": {
                "modes": [TrainMode.QSHIFTDP.value, TrainMode.ADAPTIVE.value],
                "epsilons": [epsilon],
                "shots": [n_shots],
                "alphas": list(alphas),
                "seeds": list(seeds),
            }
        },
    )
    outputs = ExperimentRunner(config, system_config).run()
    rows = _aggregate(
        outputs, lambda o: (o.cell.alpha, o.cell.mode.value), ("alpha", "mode")
    )
    rows.sort(key=lambda r: (r["alpha"], r["mode"]))
    return StudyResult(
        name="adaptive-vs-fixed",
        columns=("alpha", "mode", "mean_accuracy", "std_accuracy", "n_seeds"),
        rows=rows,
        parameters={"config": config.to_dict()},
    )


def hyperparam_study(
    base: Optional[ExperimentConfig] = None,
    batch_sizes: Sequence[int] = (32, 64, 128, 256, 512),
    learning_rates: Sequence[float] = (0.2, 0.1, 0.05, 0.01, 0.005),
    epsilons: Sequence[float] = (0.1, 0.5, 1.0),
    seeds: Sequence[int] = (0,),
    out_dir="results/hyperparams",
    system_config: Optional[SystemConfig] = None,
) -> StudyResult:
    """
    Batch size, learning rate and ε sweep with exact expectations

    Returns:
        StudyResult with one row per (B, lr, ε)
    """
    base = base or ExperimentConfig()
    rows = []
    for batch_size in batch_sizes:
        for lr in learning_rates:
            config = _with_settings(
                base,
                Path(out_dir) / "runs" / f"B{batch_size}_lr{lr:g}",
                {
                    "train": {"batch_size": batch_size, "lr": lr},
                    "grid": {
                        "modes": [TrainMode.QSHIFTDP.value],
                        "epsilons": list(epsilons),
                        "shots": [math.inf],
                        "alphas": None,
                        "seeds": list(seeds),
                    },
                },
            )
            outputs = ExperimentRunner(config, system_config).run()
            rows.extend(
                _aggregate(
                    outputs,
                    lambda o, b=batch_size, r=lr: (b, r, o.cell.epsilon),
                    ("batch_size", "lr", "epsilon"),
                )
            )
    return StudyResult(
        name="hyperparams",
        columns=("batch_size", "lr", "epsilon", "mean_accuracy", "std_accuracy", "n_seeds"),
        rows=rows,
        parameters={
            "base": base.to_dict(),
            "batch_sizes": list(batch_sizes),
            "learning_rates": list(learning_rates),
            "epsilons": list(epsilons),
            "seeds": list(seeds),
        },
    )

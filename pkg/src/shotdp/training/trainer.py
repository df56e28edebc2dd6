"""
Private training loops for variational classifiers
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from shotdp.circuit.ansatz import AnsatzSpec, ParamVector, ThetaLike, check_theta
from shotdp.circuit.encoding import EncoderSpec, EncodingScheme
from shotdp.circuit.labels import LabelObservables, predict_batch
from shotdp.data.datasets import Dataset
from shotdp.gradients.engine import GradientEngine
from shotdp.privacy.budget import NoiseCalibration, PrivacyBudget
from shotdp.privacy.calibration import (
    adaptive_sigma,
    batch_variance_estimator,
    gaussian_input_std,
    noise_reduction_pct,
)
from shotdp.sim.rng import RngStream
from shotdp.training.config import TrainConfig, TrainMode, format_shots
from shotdp.training.metrics import MetricsRecord, StepMetrics
from shotdp.utils.logger import log_metrics

logger = logging.getLogger(__name__)

# child keys of a run's root stream
STREAM_DATA = 0
STREAM_INIT = 1
STREAM_STEPS = 2
STREAM_INPUT_NOISE = 3

# child keys of a step stream
STEP_BATCH = 0
STEP_SHOTS = 1
STEP_NOISE = 2

NLL_PROB_FLOOR = 1e-12


def init_params(ansatz: AnsatzSpec, stream: RngStream) -> np.ndarray:
    """Parameters drawn uniformly from [0, 2π)"""
    return stream.generator().uniform(0.0, 2.0 * np.pi, size=ansatz.n_params)


def sample_batch(n_samples: int, batch_size: int, stream: RngStream) -> np.ndarray:
    """
    Mini-batch indices drawn uniformly without replacement

    Args:
        n_samples: Dataset size N
        batch_size: Batch size B <= N
        stream: Random stream of the step

    Returns:
        Index array of length B
    """
    if not 1 <= batch_size <= n_samples:
        raise ValueError(
            f"Batch size must be in [1, {n_samples}], got {batch_size}"
        )
    return stream.generator().choice(n_samples, size=batch_size, replace=False)


def privatize_gradient(
    per_sample: np.ndarray, sigma2: float, delta_sens: float, stream: RngStream
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gaussian mechanism on the summed per-sample gradients

    g̃ = (Σ_j g_j + z)/B with z ~ N(0, σ²Δ²·I). The per-sample gradients are
    summed as they are; nothing is clipped.

    Args:
        per_sample: Array of shape (B, K)
        sigma2: Noise multiplier σ²
        delta_sens: Sensitivity Δ
        stream: Random stream of the noise draw

    Returns:
        (noisy mean gradient g̃, injected noise z)
    """
    per_sample = np.asarray(per_sample, dtype=float)
    if per_sample.ndim != 2 or len(per_sample) == 0:
        raise ValueError("Need a nonempty (B, K) array of per-sample gradients")
    if sigma2 < 0.0:
        raise ValueError(f"Noise multiplier must be nonnegative, got {sigma2}")
    std = math.sqrt(sigma2) * delta_sens
    z = stream.generator().normal(0.0, std, size=per_sample.shape[1])
    return (per_sample.sum(axis=0) + z) / len(per_sample), z


def pixeldp_perturb(
    x,
    budget: PrivacyBudget,
    input_sensitivity: float,
    stream: RngStream,
    clamp: bool = True,
) -> np.ndarray:
    """
    Gaussian input perturbation

    Adds noise with per-coordinate std Δ_in·√(2·ln(1.25/δ))/ε.

    Args:
        x: Input vector or array of inputs
        budget: Privacy budget (ε, δ)
        input_sensitivity: Per-coordinate input range Δ_in
        stream: Random stream
        clamp: Clip the result to [0, 1] (angle-encoded inputs)

    Returns:
        Noisy inputs of the same shape
    """
    x = np.asarray(x, dtype=float)
    std = gaussian_input_std(input_sensitivity, budget.epsilon, budget.delta)
    noisy = x + stream.generator().normal(0.0, std, size=x.shape)
    return np.clip(noisy, 0.0, 1.0) if clamp else noisy


def evaluate(
    theta: ThetaLike,
    dataset: Dataset,
    ansatz: AnsatzSpec,
    labels: LabelObservables,
    enc: Optional[EncoderSpec] = None,
    chunk_size: int = 512,
) -> Tuple[float, float]:
    """
    Accuracy and NLL of a parameter vector on a dataset

    Args:
        theta: Parameter vector
        dataset: Evaluation set
        ansatz: Circuit template
        labels: Label observables
        enc: Encoder (inferred from the input length when omitted)
        chunk_size: Samples simulated together

    Returns:
        (accuracy, mean negative log-likelihood of the renormalized label
        probabilities)
    """
    if dataset.size == 0:
        raise ValueError("Cannot evaluate on an empty dataset")
    theta = check_theta(theta, ansatz)
    correct = 0
    nll = 0.0
    for start in range(0, dataset.size, chunk_size):
        inputs = dataset.inputs[start : start + chunk_size]
        y = dataset.labels[start : start + chunk_size]
        classes, probs = predict_batch(inputs, theta, ansatz, labels, enc)
        correct += int(np.sum(classes == y))
        p_true = probs[np.arange(len(y)), y]
        nll -= float(np.sum(np.log(np.maximum(p_true, NLL_PROB_FLOOR))))
    return correct / dataset.size, nll / dataset.size


@dataclass
class RunResult:
    """Outcome of a training run"""

    theta: ParamVector
    metrics: MetricsRecord
    calibration: Optional[NoiseCalibration] = None

    def __iter__(self) -> Iterator:
        # unpacks as (theta, metrics)
        yield self.theta
        yield self.metrics


class Trainer:
    """
    Runs Q-ShiftDP, its adaptive variant and the baselines

    Every random draw of a run comes from ``RngStream(config.seed)``: the
    initial parameters, each step's mini-batch, shot outcomes and
    Gaussian noise use separate keyed children, so a run is bit-reproducible
    from its seed.

    Example:
    >>> from shotdp.circuit import AnsatzSpec
    >>> from shotdp.data import gen_bars_stripes
    >>> from shotdp.sim import RngStream
    >>> from shotdp.training import Trainer, TrainConfig

    >>> data = gen_bars_stripes(1000, RngStream(0))
    >>> trainer = Trainer(AnsatzSpec(4, 1), TrainConfig(n_shots=1000))
    >>> theta, metrics = trainer.fit(data)
    """

    def __init__(
        self,
        ansatz: AnsatzSpec,
        config: TrainConfig,
        labels: Optional[LabelObservables] = None,
        enc: Optional[EncoderSpec] = None,
    ):
        """
        Initialize the trainer

        Args:
            ansatz: Circuit template
            config: Training configuration
            labels: Label observables (two classes on the ansatz register by default)
            enc: Encoder (inferred from the input length when omitted)
        """
        errors = config.validate()
        if errors:
            raise ValueError(f"Invalid training configuration: {'; '.join(errors)}")
        self.ansatz = ansatz
        self.config = config
        self.labels = labels or LabelObservables.for_classes(ansatz.n_qubits, 2)
        self.enc = enc
        self.engine = GradientEngine(ansatz, enc, config.alpha)

    def calibrate(self, dataset_size: int) -> Optional[NoiseCalibration]:
        """Noise calibration for a training set of the given size (None if not private)"""
        if not self.config.mode.gradient_private:
            return None
        budget = self.config.budget.for_schedule(
            q=self.config.batch_size / dataset_size, T=max(self.config.steps, 1)
        )
        return NoiseCalibration.build(
            budget,
            self.ansatz,
            self.labels.costs[0],
            self.config.n_shots,
            self.config.batch_size,
            alpha=self.config.alpha,
            adaptive=self.config.mode is TrainMode.ADAPTIVE,
        )

    def _batch_gradients(self, theta: np.ndarray, batch: Dataset, stream: RngStream):
        states = self.engine.encode(batch.inputs)
        costs = self.engine.label_costs(batch.labels, self.labels)
        grads, stats = self.engine.gradients(
            states, theta, costs, self.config.n_shots, stream.child(STEP_SHOTS)
        )
        loss = float(np.mean(self.engine.expected_values(states, theta, costs)))
        return grads, stats, loss

    def qshiftdp_step(
        self,
        theta: ThetaLike,
        batch: Dataset,
        calib: NoiseCalibration,
        stream: RngStream,
        step: int = 0,
    ) -> Tuple[np.ndarray, StepMetrics]:
        """
        One step with the globally calibrated noise multiplier

        Args:
            theta: Current parameters
            batch: Mini-batch
            calib: Noise calibration of the run
            stream: Random stream of this step
            step: Step number for the metrics row

        Returns:
            (updated parameters, metrics row)
        """
        theta = check_theta(theta, self.ansatz)
        grads, _, loss = self._batch_gradients(theta, batch, stream)
        g_tilde, _ = privatize_gradient(
            grads, calib.sigma2, calib.delta_sens, stream.child(STEP_NOISE)
        )
        row = StepMetrics(
            step=step,
            loss=loss,
            grad_norm=float(np.linalg.norm(g_tilde)),
            sigma2=calib.sigma2,
            noise_reduction_pct=(
                noise_reduction_pct(calib.c_dp, calib.sigma2) if calib.c_dp > 0 else None
            ),
        )
        return theta - self.config.lr * g_tilde, row

    def adaptive_step(
        self,
        theta: ThetaLike,
        batch: Dataset,
        calib: NoiseCalibration,
        stream: RngStream,
        step: int = 0,
    ) -> Tuple[np.ndarray, StepMetrics]:
        """
        One step with a noise multiplier recomputed from the batch's shots

        Returns:
            (updated parameters, metrics row)
        """
        if math.isinf(self.config.n_shots):
            raise ValueError("Adaptive steps need finite shots to estimate variance")
        theta = check_theta(theta, self.ansatz)
        grads, stats, loss = self._batch_gradients(theta, batch, stream)
        eta_hat = batch_variance_estimator(stats, calib.z_beta)
        sigma2_B = adaptive_sigma(
            calib.c_dp,
            eta_hat,
            self.ansatz.frequencies,
            self.config.n_shots,
            calib.delta_sens,
        )
        g_tilde, _ = privatize_gradient(
            grads, sigma2_B, calib.delta_sens, stream.child(STEP_NOISE)
        )
        row = StepMetrics(
            step=step,
            loss=loss,
            grad_norm=float(np.linalg.norm(g_tilde)),
            sigma2=sigma2_B,
            eta_hat_B2=eta_hat,
            noise_reduction_pct=noise_reduction_pct(calib.c_dp, sigma2_B),
        )
        return theta - self.config.lr * g_tilde, row

    def plain_step(
        self, theta: ThetaLike, batch: Dataset, stream: RngStream, step: int = 0
    ) -> Tuple[np.ndarray, StepMetrics]:
        """One step of plain mini-batch gradient descent"""
        theta = check_theta(theta, self.ansatz)
        grads, _, loss = self._batch_gradients(theta, batch, stream)
        g = grads.mean(axis=0)
        row = StepMetrics(step=step, loss=loss, grad_norm=float(np.linalg.norm(g)))
        return theta - self.config.lr * g, row

    def _training_inputs(self, dataset: Dataset, root: RngStream) -> Dataset:
        if self.config.mode is not TrainMode.PIXELDP:
            return dataset
        angle = (
            self.enc.scheme is EncodingScheme.ANGLE
            if self.enc is not None
            else dataset.input_dim == self.ansatz.n_qubits
        )
        noisy = pixeldp_perturb(
            dataset.inputs,
            self.config.budget,
            self.config.input_sensitivity,
            root.child(STREAM_INPUT_NOISE),
            clamp=angle,
        )
        return Dataset(
            noisy, dataset.labels, dataset.name, dataset.n_classes, dict(dataset.metadata)
        )

    def fit(self, dataset: Dataset, test_set: Optional[Dataset] = None) -> RunResult:
        """
        Train on a dataset

        Args:
            dataset: Training set
            test_set: Evaluation set (the training set when omitted)

        Returns:
            RunResult with θ_T and the metrics record
        """
        config = self.config
        errors = config.validate(dataset.size)
        if errors:
            raise ValueError(f"Invalid training configuration: {'; '.join(errors)}")

        started = time.perf_counter()
        root = RngStream(config.seed)
        theta = init_params(self.ansatz, root.child(STREAM_INIT))
        calib = self.calibrate(dataset.size)
        train_inputs = self._training_inputs(dataset, root)
        record = MetricsRecord()

        logger.info(
            f"Training {config.mode.value}: N={dataset.size}, B={config.batch_size}, "
            f"T={config.steps}, lr={config.lr}, shots={format_shots(config.n_shots)}, "
            f"alpha={config.alpha}, seed={config.seed}"
        )

        for step in range(config.steps):
            step_stream = root.child(STREAM_STEPS, step)
            indices = sample_batch(
                dataset.size, config.batch_size, step_stream.child(STEP_BATCH)
            )
            batch = train_inputs.subset(indices)

            if config.mode is TrainMode.QSHIFTDP:
                theta, row = self.qshiftdp_step(theta, batch, calib, step_stream, step)
            elif config.mode is TrainMode.ADAPTIVE:
                theta, row = self.adaptive_step(theta, batch, calib, step_stream, step)
            else:
                theta, row = self.plain_step(theta, batch, step_stream, step)

            record.append(row)
            log_metrics(logger, row.to_row())

        evaluation = test_set if test_set is not None else dataset
        record.final_accuracy, record.final_nll = evaluate(
            theta, evaluation, self.ansatz, self.labels, self.enc
        )
        record.train_accuracy, _ = evaluate(
            theta, dataset, self.ansatz, self.labels, self.enc
        )
        if config.mode is TrainMode.NON_PRIVATE:
            record.epsilon = math.inf
        else:
            record.epsilon = config.budget.epsilon
            record.delta_effective = (
                calib.delta_effective if calib is not None else config.budget.delta
            )
        record.wall_time_s = time.perf_counter() - started

        logger.info(
            f"Finished {config.mode.value}: accuracy={record.final_accuracy:.4f}, "
            f"nll={record.final_nll:.4f}, epsilon={record.epsilon}, "
            f"delta_effective={record.delta_effective}"
        )
        return RunResult(ParamVector(theta), record, calib)


def qshiftdp_step(
    theta: ThetaLike,
    batch: Dataset,
    config: TrainConfig,
    calib: NoiseCalibration,
    stream: RngStream,
    ansatz: AnsatzSpec,
    labels: Optional[LabelObservables] = None,
) -> Tuple[np.ndarray, StepMetrics]:
    """Functional form of ``Trainer.qshiftdp_step``"""
    return Trainer(ansatz, config, labels).qshiftdp_step(theta, batch, calib, stream)


def adaptive_qshiftdp_step(
    theta: ThetaLike,
    batch: Dataset,
    config: TrainConfig,
    calib: NoiseCalibration,
    stream: RngStream,
    ansatz: AnsatzSpec,
    labels: Optional[LabelObservables] = None,
) -> Tuple[np.ndarray, StepMetrics]:
    """Functional form of ``Trainer.adaptive_step``"""
    return Trainer(ansatz, config, labels).adaptive_step(theta, batch, calib, stream)


def train(
    dataset: Dataset,
    config: TrainConfig,
    ansatz: Optional[AnsatzSpec] = None,
    test_set: Optional[Dataset] = None,
    labels: Optional[LabelObservables] = None,
) -> RunResult:
    """
    Train a classifier; the result unpacks as ``(theta, metrics)``

    Args:
        dataset: Training set
        config: Training configuration
        ansatz: Circuit template (one strongly entangling layer on 4 qubits by default)
        test_set: Evaluation set
        labels: Label observables

    Returns:
        RunResult
    """
    ansatz = ansatz or AnsatzSpec(n_qubits=4, n_layers=1)
    return Trainer(ansatz, config, labels).fit(dataset, test_set)

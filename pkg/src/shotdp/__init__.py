"""
shotdp - shot-noise aware differential privacy for variational quantum classifiers

This library provides:
- A statevector and density-matrix simulator with finite-shot sampling
- Strongly entangling classifiers with angle or amplitude encoding
- Parameter-shift gradients, exact or estimated from shots
- Q-ShiftDP training, which credits shot noise against the Gaussian noise
  required for (ε, δ)-DP, and its adaptive per-batch variant
- Benchmark datasets, an experiment runner and studies

Example usage:
>>> from shotdp import AnsatzSpec, PrivacyBudget, RngStream, TrainConfig, TrainMode, train
>>> from shotdp import gen_bars_stripes

>>> data = gen_bars_stripes(1000, RngStream(0))
>>> config = TrainConfig(
...     mode=TrainMode.ADAPTIVE,
...     n_shots=1000,
...     budget=PrivacyBudget(epsilon=1.0, delta=1e-3, beta=1e-5),
... )
>>> theta, metrics = train(data, config, AnsatzSpec(n_qubits=4, n_layers=1))
>>> metrics.final_accuracy
"""

__version__ = "1.0.0"

from shotdp.circuit import AnsatzSpec, EncoderSpec, EncodingScheme, LabelObservables
from shotdp.config import SystemConfig
from shotdp.data import Dataset, gen_bars_stripes, gen_binary_blobs, load_downscaled_mnist
from shotdp.experiments import ExperimentConfig, ExperimentRunner, run_experiment
from shotdp.gradients import GradientEngine, psr_gradient_analytic, psr_gradient_sampled
from shotdp.privacy import NoiseCalibration, PrivacyBudget
from shotdp.sim import Observable, RngStream
from shotdp.training import TrainConfig, Trainer, TrainMode, train

__all__ = [
    "__version__",
    "AnsatzSpec",
    "EncoderSpec",
    "EncodingScheme",
    "LabelObservables",
    "SystemConfig",
    "Dataset",
    "gen_bars_stripes",
    "gen_binary_blobs",
    "load_downscaled_mnist",
    "ExperimentConfig",
    "ExperimentRunner",
    "run_experiment",
    "GradientEngine",
    "psr_gradient_analytic",
    "psr_gradient_sampled",
    "NoiseCalibration",
    "PrivacyBudget",
    "Observable",
    "RngStream",
    "TrainConfig",
    "Trainer",
    "TrainMode",
    "train",
]

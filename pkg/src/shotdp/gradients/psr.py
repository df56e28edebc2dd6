"""
Parameter-shift gradients of single samples, sensitivity and error bounds
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from shotdp.circuit.ansatz import AnsatzSpec, ThetaLike, prepare_input
from shotdp.circuit.encoding import EncoderSpec
from shotdp.gradients.engine import GradientEngine
from shotdp.gradients.statistics import ShotStatistics
from shotdp.sim.observables import Observable
from shotdp.sim.rng import RngStream


class GradientMode(Enum):
    """How the shifted expectations were obtained"""

    ANALYTIC = "analytic"
    SAMPLED = "sampled"


@dataclass(frozen=True, eq=False)
class GradientEstimate:
    """Per-sample PSR gradient"""

    g: np.ndarray
    """Gradient vector of length K"""

    mode: GradientMode
    """Analytic or sampled"""

    n_shots: float = math.inf
    """Shots per shifted circuit (∞ in analytic mode)"""

    index: Optional[int] = None
    """Position of the sample in its batch"""

    @property
    def norm(self) -> float:
        """ℓ2 norm of the gradient"""
        return float(np.linalg.norm(self.g))


def sensitivity_bound(lambda_min: float, lambda_max: float, omegas) -> float:
    """
    ℓ2 sensitivity Δ = ((λ_max − λ_min)/2)·√(Σ Ω_k²) of a per-sample gradient

    Args:
        lambda_min: Smallest eigenvalue of the cost observable
        lambda_max: Largest eigenvalue of the cost observable
        omegas: Generator frequencies of the K parameters

    Returns:
        Sensitivity Δ
    """
    omegas = np.asarray(omegas, dtype=float).reshape(-1)
    if omegas.size == 0:
        raise ValueError("Frequency vector is empty")
    if lambda_max < lambda_min:
        raise ValueError(
            f"lambda_max ({lambda_max}) must not be below lambda_min ({lambda_min})"
        )
    if np.any(omegas <= 0.0):
        raise ValueError("All frequencies must be positive")
    return float((lambda_max - lambda_min) / 2.0 * np.sqrt(np.sum(omegas**2)))


def psr_gradient_analytic(
    x,
    theta: ThetaLike,
    ansatz: AnsatzSpec,
    observable: Observable,
    enc: Optional[EncoderSpec] = None,
    alpha: float = 0.0,
) -> GradientEstimate:
    """
    Exact parameter-shift gradient of f(θ) = ⟨O⟩ for one input

    Args:
        x: Input vector or prepared input state
        theta: Parameter vector
        ansatz: Circuit template
        observable: Observable to differentiate
        enc: Encoder for vector inputs
        alpha: Global depolarizing strength

    Returns:
        Analytic GradientEstimate
    """
    engine = GradientEngine(ansatz, enc, alpha)
    states = prepare_input(x, ansatz, enc)[None, :]
    g = engine.analytic(states, theta, observable)[0]
    return GradientEstimate(g, GradientMode.ANALYTIC)


def psr_gradient_sampled(
    x,
    theta: ThetaLike,
    ansatz: AnsatzSpec,
    observable: Observable,
    n_shots: int,
    alpha: float,
    stream: RngStream,
    enc: Optional[EncoderSpec] = None,
) -> Tuple[GradientEstimate, ShotStatistics]:
    """
    Finite-shot parameter-shift gradient for one input

    Args:
        x: Input vector or prepared input state
        theta: Parameter vector
        ansatz: Circuit template
        observable: Observable to differentiate
        n_shots: Shots per shifted circuit, at least 2
        alpha: Global depolarizing strength applied before measurement
        stream: Random stream
        enc: Encoder for vector inputs

    Returns:
        (GradientEstimate, ShotStatistics of shape (K, 2))
    """
    if not np.isfinite(n_shots) or n_shots < 2:
        raise ValueError(f"Sampled gradients need N_s >= 2, got {n_shots}")
    engine = GradientEngine(ansatz, enc, alpha)
    states = prepare_input(x, ansatz, enc)[None, :]
    grads, stats = engine.sampled(states, theta, observable, int(n_shots), stream)
    estimate = GradientEstimate(grads[0], GradientMode.SAMPLED, int(n_shots))
    return estimate, stats.for_sample(0)


def mse_bound(delta: float, B: int, n_shots: float, K: int, sigma2: float) -> float:
    """
    Upper bound on the MSE of the noisy batch gradient

    (Δ²/B)(1 + 1/(2N_s)) + K·σ²·Δ²/B², with N_s = ∞ for analytic mode.

    Args:
        delta: Sensitivity Δ
        B: Batch size
        n_shots: Shots per shifted circuit
        K: Number of parameters
        sigma2: Noise multiplier σ²

    Returns:
        MSE bound
    """
    if B <= 0:
        raise ValueError(f"Batch size must be positive, got {B}")
    if n_shots < 1:
        raise ValueError(f"Shot count must be at least 1, got {n_shots}")
    shot_term = 0.0 if math.isinf(n_shots) else 1.0 / (2.0 * n_shots)
    return (delta**2 / B) * (1.0 + shot_term) + K * sigma2 * delta**2 / B**2

"""
Noise calibration with shot-noise credit
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.stats import norm

from shotdp.gradients.statistics import ShotStatistics
from shotdp.sim.measurement import uniform_variance
from shotdp.sim.observables import Observable

logger = logging.getLogger(__name__)


def _check_delta(delta: float, name: str = "delta") -> None:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"{name} must be in (0, 1), got {delta}")


def dp_constant(
    q: float, T: int, delta: float, epsilon: float, c2: float = 1.0
) -> float:
    """
    Calibration constant C_DP = (c₂·q·√(T·ln(1/δ))/ε)²

    Args:
        q: Sampling rate B/N in (0, 1]
        T: Number of training steps
        delta: Target δ in (0, 1)
        epsilon: Target ε > 0
        c2: Accountant constant > 0

    Returns:
        C_DP
    """
    _check_delta(delta)
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0.0 < q <= 1.0:
        raise ValueError(f"Sampling rate q must be in (0, 1], got {q}")
    if T < 1:
        raise ValueError(f"Number of steps T must be at least 1, got {T}")
    if c2 <= 0.0:
        raise ValueError(f"c2 must be positive, got {c2}")
    return (c2 * q * math.sqrt(T * math.log(1.0 / delta)) / epsilon) ** 2


def shot_credit(
    batch_size: int, sigma2_shot: float, n_shots: float, lambda_range: float
) -> float:
    """Noise credit 2·B·σ²_shot/(N_s·(λ_max − λ_min)²) of the shot noise"""
    if lambda_range <= 0.0:
        raise ValueError(f"Eigenvalue range must be positive, got {lambda_range}")
    if sigma2_shot < 0.0 or batch_size < 1:
        raise ValueError("Shot variance must be nonnegative and B positive")
    if math.isinf(n_shots):
        return 0.0
    if n_shots < 1:
        raise ValueError(f"Shot count must be at least 1, got {n_shots}")
    return 2.0 * batch_size * sigma2_shot / (n_shots * lambda_range**2)


def calibrate_sigma(
    c_dp: float,
    batch_size: int,
    sigma2_shot: float,
    n_shots: float,
    lambda_range: float,
) -> float:
    """
    Artificial noise multiplier σ² = max(0, C_DP − shot credit)

    Args:
        c_dp: Calibration constant
        batch_size: Batch size B
        sigma2_shot: Lower bound on the single-shot variance
        n_shots: Shots per shifted circuit (∞ gives no credit)
        lambda_range: λ_max − λ_min of the cost observable

    Returns:
        σ²
    """
    if c_dp < 0.0:
        raise ValueError(f"C_DP must be nonnegative, got {c_dp}")
    credit = shot_credit(batch_size, sigma2_shot, n_shots, lambda_range)
    return max(0.0, c_dp - credit)


def per_iteration_epsilon(
    sigma2: float,
    sigma2_shot: float,
    batch_size: int,
    n_shots: float,
    lambda_range: float,
    delta0: float,
) -> float:
    """
    Per-iteration ε₀ of the combined shot and Gaussian noise

    ε₀ = √(2·ln(1.25/δ₀)) / √(shot credit + σ²)

    Raises:
        ValueError: If the total noise is zero
    """
    _check_delta(delta0, "delta0")
    total = shot_credit(batch_size, sigma2_shot, n_shots, lambda_range) + sigma2
    if total <= 0.0:
        raise ValueError("Per-iteration epsilon is undefined without any noise")
    return math.sqrt(2.0 * math.log(1.25 / delta0)) / math.sqrt(total)


def depolarizing_floor(alpha: float, observable: Observable) -> float:
    """Lower bound α·σ²_uniform on the single-shot variance under depolarizing"""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"Depolarizing strength alpha must be in [0, 1], got {alpha}")
    return alpha * uniform_variance(observable)


def z_critical(beta: float) -> float:
    """Upper normal critical value z_β = Φ⁻¹(1 − β); β = 0 gives ∞"""
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must be in [0, 1), got {beta}")
    return float(norm.isf(beta))


def batch_variance_estimator(
    stats: ShotStatistics, z_beta: float, n_shots: Optional[int] = None
) -> float:
    """
    Lower-confidence estimate of the total shot variance of a batch

    η̂²_B = Σ η̄² − z_β·√(Σ (μ̄₄ − (η̄²)²)/N_s), summed over every (j, k, τ)
    outcome set. The result may be negative. A negative spread sum, which
    tiny N_s can produce, is treated as zero.

    Args:
        stats: Statistics of all outcome sets of the batch
        z_beta: Normal critical value
        n_shots: Shots per outcome set (defaults to ``stats.n_shots``)

    Returns:
        η̂²_B
    """
    if stats.n_groups == 0:
        raise ValueError("Shot statistics are empty")
    n_shots = stats.n_shots if n_shots is None else n_shots
    if n_shots < 2:
        raise ValueError(f"Variance estimation needs N_s >= 2, got {n_shots}")

    eta_bar = float(np.sum(stats.variance))
    spread_sq = float(np.sum(stats.fourth_moment - stats.variance**2)) / n_shots
    spread = math.sqrt(max(0.0, spread_sq))
    if spread == 0.0 or z_beta == 0.0:
        return eta_bar
    return eta_bar - z_beta * spread


def adaptive_sigma(
    c_dp: float, eta_hat_B2: float, omega, n_shots: float, delta_sens: float
) -> float:
    """
    Per-batch noise multiplier σ²_B = max(0, C_DP − Ω²·max(0, η̂²_B)/(4·N_s·Δ²))

    Args:
        c_dp: Calibration constant
        eta_hat_B2: Batch variance estimate
        omega: Common generator frequency, or the frequency vector
        n_shots: Shots per outcome set
        delta_sens: Sensitivity Δ

    Returns:
        σ²_B

    Raises:
        ValueError: If the supplied frequencies differ
    """
    omegas = np.unique(np.asarray(omega, dtype=float).reshape(-1))
    if len(omegas) != 1:
        raise ValueError(
            f"Adaptive calibration needs one common frequency, got {omegas.tolist()}"
        )
    omega = float(omegas[0])
    if c_dp < 0.0 or delta_sens <= 0.0 or omega <= 0.0:
        raise ValueError("C_DP must be nonnegative, Δ and Ω positive")
    if not np.isfinite(n_shots) or n_shots < 2:
        raise ValueError(f"Adaptive calibration needs finite N_s >= 2, got {n_shots}")
    credit = omega**2 * max(0.0, eta_hat_B2) / (4.0 * n_shots * delta_sens**2)
    return max(0.0, c_dp - credit)


def effective_delta(beta: float, delta: float) -> float:
    """δ guarantee of the adaptive mechanism, (1 − β)·δ + β"""
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must be in [0, 1), got {beta}")
    _check_delta(delta)
    return (1.0 - beta) * delta + beta


def noise_reduction_pct(c_dp: float, sigma2_B: float) -> float:
    """Share of the artificial noise saved, (C_DP − σ²_B)/C_DP·100"""
    if c_dp <= 0.0:
        raise ValueError(f"C_DP must be positive, got {c_dp}")
    return (c_dp - sigma2_B) / c_dp * 100.0


def check_small_epsilon(
    epsilon: float, q: float, T: int, c1: Optional[float] = None
) -> bool:
    """
    Warn when ε falls outside the small-ε regime ε < c₁·q²·T

    Returns:
        True if the condition holds or cannot be checked (no c₁)
    """
    if c1 is None:
        return True
    bound = c1 * q**2 * T
    if epsilon >= bound:
        logger.warning(
            f"epsilon={epsilon} is not below c1*q^2*T={bound:.6g}; "
            f"the calibration assumes the small-epsilon regime"
        )
        return False
    return True


def gaussian_input_std(sensitivity: float, epsilon: float, delta: float) -> float:
    """Gaussian-mechanism std Δ·√(2·ln(1.25/δ))/ε for input perturbation"""
    if sensitivity <= 0.0:
        raise ValueError(f"Input sensitivity must be positive, got {sensitivity}")
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    _check_delta(delta)
    if math.isinf(epsilon):
        return 0.0
    return sensitivity * math.sqrt(2.0 * math.log(1.25 / delta)) / epsilon

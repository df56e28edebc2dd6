"""
Differential-privacy calibration
"""

from shotdp.privacy.budget import NoiseCalibration, PrivacyBudget
from shotdp.privacy.calibration import (
    adaptive_sigma,
    batch_variance_estimator,
    calibrate_sigma,
    check_small_epsilon,
    depolarizing_floor,
    dp_constant,
    effective_delta,
    gaussian_input_std,
    noise_reduction_pct,
    per_iteration_epsilon,
    shot_credit,
    z_critical,
)

__all__ = [
    "NoiseCalibration",
    "PrivacyBudget",
    "adaptive_sigma",
    "batch_variance_estimator",
    "calibrate_sigma",
    "check_small_epsilon",
    "depolarizing_floor",
    "dp_constant",
    "effective_delta",
    "gaussian_input_std",
    "noise_reduction_pct",
    "per_iteration_epsilon",
    "shot_credit",
    "z_critical",
]

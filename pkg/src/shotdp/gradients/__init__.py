"""
Parameter-shift gradient estimation
"""

from shotdp.gradients.engine import GradientEngine
from shotdp.gradients.psr import (
    GradientEstimate,
    GradientMode,
    mse_bound,
    psr_gradient_analytic,
    psr_gradient_sampled,
    sensitivity_bound,
)
from shotdp.gradients.statistics import (
    MINUS,
    PLUS,
    ShotStatistics,
    moments_from_outcomes,
    sample_moments,
)

__all__ = [
    "GradientEngine",
    "GradientEstimate",
    "GradientMode",
    "mse_bound",
    "psr_gradient_analytic",
    "psr_gradient_sampled",
    "sensitivity_bound",
    "MINUS",
    "PLUS",
    "ShotStatistics",
    "moments_from_outcomes",
    "sample_moments",
]

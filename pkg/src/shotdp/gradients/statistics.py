"""
Shot statistics of the shifted circuits
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

PLUS = 0
"""Index of the positive shift along the shift axis"""

MINUS = 1
"""Index of the negative shift along the shift axis"""


def sample_moments(counts, outcomes) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Moments of outcome sets given as counts

    Args:
        counts: Integer counts of shape ``lead + (m,)``
        outcomes: The m outcome values

    Returns:
        (mean, sample variance with N−1 denominator,
        fourth central moment with N denominator), each of shape ``lead``
    """
    counts = np.asarray(counts, dtype=float)
    outcomes = np.asarray(outcomes, dtype=float)
    n_shots = counts.sum(axis=-1)
    if np.any(n_shots < 2):
        raise ValueError("Sample moments need at least 2 shots per group")

    mean = (counts @ outcomes) / n_shots
    deviation = outcomes - mean[..., None]
    squared = deviation**2
    variance = (counts * squared).sum(axis=-1) / (n_shots - 1.0)
    fourth = (counts * squared**2).sum(axis=-1) / n_shots

    constant = np.count_nonzero(counts, axis=-1) <= 1
    variance = np.where(constant, 0.0, variance)
    fourth = np.where(constant, 0.0, fourth)
    return mean, variance, fourth


def moments_from_outcomes(samples) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Same moments as ``sample_moments`` computed from raw outcomes (last axis)"""
    samples = np.asarray(samples, dtype=float)
    n_shots = samples.shape[-1]
    if n_shots < 2:
        raise ValueError("Sample moments need at least 2 shots per group")
    mean = samples.mean(axis=-1)
    deviation = samples - mean[..., None]
    variance = samples.var(axis=-1, ddof=1)
    fourth = np.mean(deviation**4, axis=-1)
    constant = np.all(samples == samples[..., :1], axis=-1)
    return mean, np.where(constant, 0.0, variance), np.where(constant, 0.0, fourth)


@dataclass(frozen=True, eq=False)
class ShotStatistics:
    """
    Per-group statistics of the shifted-circuit outcome sets

    Arrays are indexed ``[j, k, τ]`` with j the sample in the batch, k the
    parameter and τ the shift (``PLUS`` or ``MINUS``).
    """

    mean: np.ndarray
    """Sample mean of each outcome set"""

    variance: np.ndarray
    """Sample variance η̄² (N_s − 1 denominator)"""

    fourth_moment: np.ndarray
    """Sample fourth central moment μ̄₄ (N_s denominator)"""

    n_shots: int
    """Shots per outcome set N_s"""

    def __post_init__(self):
        shapes = {self.mean.shape, self.variance.shape, self.fourth_moment.shape}
        if len(shapes) != 1:
            raise ValueError(f"Statistics arrays must share one shape, got {shapes}")
        if self.n_shots < 2:
            raise ValueError(f"Shot statistics need N_s >= 2, got {self.n_shots}")

    @classmethod
    def from_counts(cls, counts, outcomes) -> "ShotStatistics":
        """Build statistics from outcome counts of shape ``lead + (m,)``"""
        counts = np.asarray(counts)
        mean, variance, fourth = sample_moments(counts, outcomes)
        return cls(mean, variance, fourth, int(counts[(0,) * (counts.ndim - 1)].sum()))

    @classmethod
    def from_outcomes(cls, samples) -> "ShotStatistics":
        """Build statistics from raw outcomes of shape ``lead + (N_s,)``"""
        samples = np.asarray(samples)
        mean, variance, fourth = moments_from_outcomes(samples)
        return cls(mean, variance, fourth, samples.shape[-1])

    @property
    def n_groups(self) -> int:
        """Number of outcome sets covered"""
        return int(self.mean.size)

    def for_sample(self, j: int) -> "ShotStatistics":
        """Statistics of one sample of the batch"""
        return ShotStatistics(
            self.mean[j], self.variance[j], self.fourth_moment[j], self.n_shots
        )

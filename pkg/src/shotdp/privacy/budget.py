"""
Privacy budget and calibrated noise levels
"""

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, List, Optional

import numpy as np

from shotdp.circuit.ansatz import AnsatzSpec
from shotdp.gradients.psr import sensitivity_bound
from shotdp.privacy.calibration import (
    calibrate_sigma,
    check_small_epsilon,
    depolarizing_floor,
    dp_constant,
    effective_delta,
    per_iteration_epsilon,
    z_critical,
)
from shotdp.sim.observables import Observable

logger = logging.getLogger(__name__)


@dataclass
class PrivacyBudget:
    """
    Target (ε, δ) guarantee of a training run

    Example:
    >>> from shotdp.privacy import PrivacyBudget

    >>> budget = PrivacyBudget(epsilon=1.0, delta=1e-3, beta=1e-5)
    >>> budget = budget.for_schedule(q=512 / 1000, T=30)
    >>> budget.dp_constant()
    """

    epsilon: float = 1.0
    """Target ε"""

    delta: float = 1e-3
    """Target δ"""

    beta: float = 0.0
    """Significance level of the adaptive variance estimate"""

    c2: float = 1.0
    """Accountant constant of the calibration"""

    q: float = 1.0
    """Sampling rate B/N"""

    T: int = 1
    """Number of training steps"""

    delta0: Optional[float] = None
    """Per-iteration δ for the ε₀ diagnostic (defaults to delta)"""

    c1: Optional[float] = None
    """Constant of the small-ε condition ε < c₁·q²·T (unchecked when None)"""

    def validate(self) -> List[str]:
        """
        Validate the budget

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []
        if not self.epsilon > 0.0:
            errors.append("epsilon must be positive")
        if not 0.0 < self.delta < 1.0:
            errors.append("delta must be in (0, 1)")
        if not 0.0 <= self.beta < 1.0:
            errors.append("beta must be in [0, 1)")
        if self.c2 <= 0.0:
            errors.append("c2 must be positive")
        if not 0.0 < self.q <= 1.0:
            errors.append("Sampling rate q must be in (0, 1]")
        if self.T < 1:
            errors.append("Number of steps T must be at least 1")
        if self.delta0 is not None and not 0.0 < self.delta0 < 1.0:
            errors.append("delta0 must be in (0, 1)")
        return errors

    def is_valid(self) -> bool:
        """Check if the budget is valid"""
        return len(self.validate()) == 0

    def for_schedule(self, q: float, T: int) -> "PrivacyBudget":
        """Copy of the budget with the sampling rate and step count filled in"""
        return replace(self, q=q, T=T)

    def dp_constant(self) -> float:
        """C_DP of this budget"""
        return dp_constant(self.q, self.T, self.delta, self.epsilon, self.c2)

    def effective_delta(self, adaptive: bool = False) -> float:
        """δ actually guaranteed: (1 − β)δ + β for adaptive runs, δ otherwise"""
        if not adaptive:
            return self.delta
        return effective_delta(self.beta, self.delta)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PrivacyBudget":
        """Create a PrivacyBudget from a dictionary, ignoring unknown keys"""
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary format"""
        return asdict(self)


@dataclass(frozen=True)
class NoiseCalibration:
    """
    Every noise quantity a private training run needs

    ``sigma2`` is the global multiplier used by the fixed calibration;
    ``sigma2_B`` holds the multiplier of the current batch on the adaptive
    path and stays None otherwise.
    """

    c_dp: float
    """Calibration constant C_DP"""

    delta_sens: float
    """Per-sample gradient sensitivity Δ"""

    sigma2: float
    """Global artificial noise multiplier σ²"""

    sigma2_shot_floor: float
    """Single-shot variance lower bound σ²_shot"""

    lambda_range: float
    """λ_max − λ_min of the cost observable"""

    omega: Optional[float]
    """Common generator frequency (None if frequencies differ)"""

    n_shots: float
    """Shots per shifted circuit"""

    batch_size: int
    """Batch size B"""

    epsilon0: float
    """Per-iteration ε₀ diagnostic (∞ without noise)"""

    delta_effective: float
    """Declared δ of the run"""

    z_beta: float = math.inf
    """Critical value of the adaptive variance estimate"""

    sigma2_B: Optional[float] = None
    """Per-batch noise multiplier of the adaptive path"""

    @classmethod
    def build(
        cls,
        budget: PrivacyBudget,
        ansatz: AnsatzSpec,
        observable: Observable,
        n_shots: float,
        batch_size: int,
        alpha: float = 0.0,
        adaptive: bool = False,
    ) -> "NoiseCalibration":
        """
        Calibrate noise for a budget, circuit and measurement setting

        Args:
            budget: Privacy budget with q and T filled in
            ansatz: Circuit template (provides the frequencies)
            observable: Cost observable
            n_shots: Shots per shifted circuit (∞ for analytic mode)
            batch_size: Batch size B
            alpha: Depolarizing strength giving the shot-variance floor
            adaptive: Whether the per-batch adaptive path is used

        Returns:
            NoiseCalibration
        """
        errors = budget.validate()
        if errors:
            raise ValueError(f"Invalid privacy budget: {'; '.join(errors)}")

        frequencies = ansatz.frequencies
        delta_sens = sensitivity_bound(
            observable.lambda_min, observable.lambda_max, frequencies
        )
        c_dp = budget.dp_constant()
        floor = depolarizing_floor(alpha, observable)
        lambda_range = observable.lambda_range
        sigma2 = calibrate_sigma(c_dp, batch_size, floor, n_shots, lambda_range)

        delta0 = budget.delta0 if budget.delta0 is not None else budget.delta
        try:
            epsilon0 = per_iteration_epsilon(
                sigma2, floor, batch_size, n_shots, lambda_range, delta0
            )
        except ValueError:
            epsilon0 = math.inf

        unique = np.unique(frequencies)
        omega = float(unique[0]) if len(unique) == 1 else None

        check_small_epsilon(budget.epsilon, budget.q, budget.T, budget.c1)
        logger.info(
            f"Calibrated noise: C_DP={c_dp:.6g}, Delta={delta_sens:.6g}, "
            f"sigma2={sigma2:.6g}, shot floor={floor:.6g}, epsilon0={epsilon0:.6g}"
        )
        return cls(
            c_dp=c_dp,
            delta_sens=delta_sens,
            sigma2=sigma2,
            sigma2_shot_floor=floor,
            lambda_range=lambda_range,
            omega=omega,
            n_shots=n_shots,
            batch_size=batch_size,
            epsilon0=epsilon0,
            delta_effective=budget.effective_delta(adaptive),
            z_beta=z_critical(budget.beta) if adaptive else math.inf,
        )

    def with_batch_sigma(self, sigma2_B: float) -> "NoiseCalibration":
        """Copy carrying the multiplier of the current batch"""
        return replace(self, sigma2_B=sigma2_B)

    @property
    def active_sigma2(self) -> float:
        """σ²_B when set, σ² otherwise"""
        return self.sigma2 if self.sigma2_B is None else self.sigma2_B

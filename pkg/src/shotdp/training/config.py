"""
Training configuration
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from shotdp.privacy.budget import PrivacyBudget


class TrainMode(Enum):
    """Training algorithms"""

    QSHIFTDP = "qshiftdp"
    ADAPTIVE = "adaptive"
    PIXELDP = "pixeldp"
    NON_PRIVATE = "non-private"

    @property
    def gradient_private(self) -> bool:
        """Whether noise is added to the gradients"""
        return self in (TrainMode.QSHIFTDP, TrainMode.ADAPTIVE)


def parse_shots(value: Any) -> float:
    """Parse a shot count; "inf", "infinity" and "analytic" mean N_s = ∞"""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "analytic"):
            return math.inf
        value = float(text)
    value = float(value)
    if math.isinf(value):
        return math.inf
    if not value.is_integer():
        raise ValueError(f"Shot count must be an integer or 'inf', got {value}")
    return value


def format_shots(n_shots: float) -> str:
    """Inverse of ``parse_shots``"""
    return "inf" if math.isinf(n_shots) else str(int(n_shots))


@dataclass
class TrainConfig:
    """
    Configuration of one training run

    Example:
    >>> from shotdp.training import TrainConfig, TrainMode
    >>> from shotdp.privacy import PrivacyBudget

    >>> config = TrainConfig(
    ...     mode=TrainMode.ADAPTIVE,
    ...     n_shots=1000,
    ...     budget=PrivacyBudget(epsilon=1.0, delta=1e-3, beta=1e-5),
    ... )
    """

    lr: float = 0.2
    """Learning rate"""

    steps: int = 30
    """Number of training steps T"""

    batch_size: int = 512
    """Batch size B"""

    n_shots: float = math.inf
    """Shots per shifted circuit (∞ for exact expectations)"""

    alpha: float = 0.0
    """Global depolarizing strength before measurement"""

    budget: PrivacyBudget = field(default_factory=PrivacyBudget)
    """Privacy budget (q and T are derived from the run)"""

    mode: TrainMode = TrainMode.QSHIFTDP
    """Training algorithm"""

    seed: int = 0
    """Root seed of every random stream of the run"""

    input_sensitivity: float = 1.0
    """Per-coordinate input range for input perturbation"""

    def validate(self, dataset_size: Optional[int] = None) -> List[str]:
        """
        Validate the configuration

        Args:
            dataset_size: Training-set size to check the batch size against

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []
        if not isinstance(self.mode, TrainMode):
            errors.append("Mode must be a TrainMode enum")
        if self.lr < 0.0:
            errors.append("Learning rate cannot be negative")
        if self.steps < 0:
            errors.append("Number of steps cannot be negative")
        if self.batch_size < 1:
            errors.append("Batch size must be positive")
        if dataset_size is not None and self.batch_size > dataset_size:
            errors.append(
                f"Batch size {self.batch_size} exceeds dataset size {dataset_size}"
            )
        if not math.isinf(self.n_shots) and self.n_shots < 2:
            errors.append("Shot count must be at least 2 or infinite")
        if not 0.0 <= self.alpha <= 1.0:
            errors.append("Depolarizing strength alpha must be in [0, 1]")
        if self.seed < 0:
            errors.append("Seed cannot be negative")
        if self.mode is TrainMode.ADAPTIVE and math.isinf(self.n_shots):
            errors.append("Adaptive mode needs a finite shot count")
        if self.mode is TrainMode.PIXELDP and self.input_sensitivity <= 0.0:
            errors.append("Input sensitivity must be positive")
        if self.mode in (TrainMode.QSHIFTDP, TrainMode.ADAPTIVE, TrainMode.PIXELDP):
            # q and T are filled in at run time
            budget_errors = self.budget.for_schedule(1.0, 1).validate()
            errors.extend(f"Budget: {e}" for e in budget_errors)
        return errors

    def is_valid(self, dataset_size: Optional[int] = None) -> bool:
        """Check if the configuration is valid"""
        return len(self.validate(dataset_size)) == 0

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        """
        Create a TrainConfig from a dictionary

        Args:
            data: Flat settings plus an optional nested ``budget`` mapping

        Returns:
            TrainConfig instance
        """
        config = cls()
        for key, value in data.items():
            if key == "budget" and isinstance(value, dict):
                value = PrivacyBudget.from_dict(value)
            elif key == "mode" and isinstance(value, str):
                value = TrainMode(value)
            elif key == "n_shots":
                value = parse_shots(value)
            if hasattr(config, key):
                setattr(config, key, value)
        return config

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary format"""
        return {
            "lr": self.lr,
            "steps": self.steps,
            "batch_size": self.batch_size,
            "n_shots": format_shots(self.n_shots),
            "alpha": self.alpha,
            "budget": self.budget.to_dict(),
            "mode": self.mode.value,
            "seed": self.seed,
            "input_sensitivity": self.input_sensitivity,
        }

"""
Per-step and per-run training metrics
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

METRICS_SCHEMA_VERSION = 1
"""Version of the per-step CSV schema"""

CSV_COLUMNS = (
    "step",
    "loss",
    "grad_norm",
    "sigma2",
    "eta_hat_B2",
    "noise_reduction_pct",
)


@dataclass(frozen=True)
class StepMetrics:
    """One training step"""

    step: int
    loss: float
    grad_norm: float
    sigma2: Optional[float] = None
    eta_hat_B2: Optional[float] = None
    noise_reduction_pct: Optional[float] = None

    def to_row(self) -> Dict[str, Any]:
        """Row keyed by ``CSV_COLUMNS``"""
        return {column: getattr(self, column) for column in CSV_COLUMNS}


@dataclass
class MetricsRecord:
    """
    Append-only log of a training run plus its final evaluation
    """

    steps: List[StepMetrics] = field(default_factory=list)
    """One entry per completed step"""

    final_accuracy: Optional[float] = None
    """Test accuracy of θ_T"""

    final_nll: Optional[float] = None
    """Test NLL of θ_T"""

    train_accuracy: Optional[float] = None
    """Training accuracy of θ_T"""

    epsilon: Optional[float] = None
    """Declared ε (∞ for non-private runs)"""

    delta_effective: Optional[float] = None
    """Declared δ, including the β term for adaptive runs"""

    wall_time_s: Optional[float] = None
    """Training wall time"""

    def append(self, row: StepMetrics) -> None:
        """
        Append the metrics of the next step

        Raises:
            ValueError: If the step number is out of sequence
        """
        expected = len(self.steps)
        if row.step != expected:
            raise ValueError(f"Expected metrics for step {expected}, got {row.step}")
        self.steps.append(row)

    def __len__(self) -> int:
        return len(self.steps)

    def to_rows(self) -> List[Dict[str, Any]]:
        """Per-step rows for CSV output"""
        return [row.to_row() for row in self.steps]

    def column(self, name: str) -> List[Any]:
        """Values of one column across steps"""
        if name not in CSV_COLUMNS:
            raise ValueError(f"Unknown metrics column '{name}'")
        return [getattr(row, name) for row in self.steps]

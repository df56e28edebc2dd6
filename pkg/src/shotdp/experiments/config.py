"""
Experiment configuration files
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from shotdp.circuit.ansatz import AnsatzSpec
from shotdp.privacy.budget import PrivacyBudget
from shotdp.training.config import TrainConfig, TrainMode, format_shots, parse_shots
from shotdp.utils.serialization import format_float, load_config_file

DatasetName = Literal["bars_stripes", "binary_blobs", "mnist"]


def _check_shots(value: Any) -> float:
    n_shots = parse_shots(value)
    if not math.isinf(n_shots) and n_shots < 2:
        raise ValueError("shot count must be at least 2 or 'inf'")
    return n_shots


def _label(value: float) -> str:
    """Compact number text for file names"""
    if math.isinf(value):
        return "inf"
    return format(value, "g")


class DatasetSection(BaseModel):
    """``[dataset]``: which data and how it is generated"""

    model_config = ConfigDict(extra="forbid")

    name: DatasetName = "bars_stripes"
    n_samples: int = Field(1000, ge=2)
    n_test: int = Field(500, ge=1)
    flip_prob: float = Field(0.05, ge=0.0, lt=1.0)
    n_classes: int = Field(2, ge=2, le=8)
    uniform_fraction: float = Field(0.1, ge=0.0, le=1.0)
    noise_std: float = Field(0.0, ge=0.0)
    path: Optional[str] = None
    test_fraction: float = Field(0.2, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_source(self) -> "DatasetSection":
        if self.name == "mnist" and not self.path:
            raise ValueError("the mnist dataset needs a path")
        if self.name == "mnist" and self.n_classes != 2:
            raise ValueError("the mnist dataset has two classes")
        if self.name == "bars_stripes" and self.n_classes != 2:
            raise ValueError("bars_stripes has two classes")
        return self


class ModelSection(BaseModel):
    """``[model]``: circuit size"""

    model_config = ConfigDict(extra="forbid")

    n_qubits: int = Field(4, ge=1, le=12)
    n_layers: int = Field(1, ge=1)


class TrainSection(BaseModel):
    """``[train]``: optimizer and measurement settings"""

    model_config = ConfigDict(extra="forbid")

    mode: TrainMode = TrainMode.QSHIFTDP
    lr: float = Field(0.2, ge=0.0)
    steps: int = Field(30, ge=0)
    batch_size: int = Field(512, ge=1)
    shots: float = math.inf
    alpha: float = Field(0.0, ge=0.0, le=1.0)
    seed: int = Field(0, ge=0)
    input_sensitivity: float = Field(1.0, gt=0.0)

    @field_validator("shots", mode="before")
    @classmethod
    def _parse_shots(cls, value: Any) -> float:
        return _check_shots(value)


class PrivacySection(BaseModel):
    """``[privacy]``: target guarantee and accountant constants"""

    model_config = ConfigDict(extra="forbid")

    epsilon: float = Field(1.0, gt=0.0)
    delta: float = Field(1e-3, gt=0.0, lt=1.0)
    beta: float = Field(1e-5, ge=0.0, lt=1.0)
    c2: float = Field(1.0, gt=0.0)
    c1: Optional[float] = Field(None, gt=0.0)
    delta0: Optional[float] = Field(None, gt=0.0, lt=1.0)


class GridSection(BaseModel):
    """``[grid]``: values swept over; an unset axis uses the single value"""

    model_config = ConfigDict(extra="forbid")

    modes: Optional[List[TrainMode]] = None
    epsilons: Optional[List[float]] = None
    shots: Optional[List[float]] = None
    alphas: Optional[List[float]] = None
    seeds: Optional[List[int]] = None

    @field_validator("shots", mode="before")
    @classmethod
    def _parse_shots(cls, value: Any) -> Any:
        if value is None:
            return None
        if not isinstance(value, (list, tuple)):
            value = [value]
        return [_check_shots(v) for v in value]

    @field_validator("epsilons")
    @classmethod
    def _check_epsilons(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and any(not e > 0.0 for e in value):
            raise ValueError("every epsilon must be positive")
        return value

    @field_validator("alphas")
    @classmethod
    def _check_alphas(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and any(not 0.0 <= a <= 1.0 for a in value):
            raise ValueError("every alpha must be in [0, 1]")
        return value

    @field_validator("seeds")
    @classmethod
    def _check_seeds(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and any(s < 0 for s in value):
            raise ValueError("seeds cannot be negative")
        return value

    @field_validator("modes", "epsilons", "shots", "alphas", "seeds")
    @classmethod
    def _nonempty(cls, value: Optional[list]) -> Optional[list]:
        if value is not None and len(value) == 0:
            raise ValueError("grid axes cannot be empty")
        return value


class OutputSection(BaseModel):
    """``[output]``: where results go"""

    model_config = ConfigDict(extra="forbid")

    path: str = "results"
    record_timing: bool = False


@dataclass(frozen=True)
class GridCell:
    """One (mode, ε, N_s, α, seed) combination of a grid"""

    mode: TrainMode
    epsilon: float
    n_shots: float
    alpha: float
    seed: int

    def stem(self, dataset: str) -> str:
        """File name stem of the cell's outputs"""
        return (
            f"{dataset}_{self.mode.value}_eps{_label(self.epsilon)}"
            f"_shots{format_shots(self.n_shots)}_alpha{_label(self.alpha)}"
            f"_seed{self.seed}"
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary format"""
        return {
            "mode": self.mode.value,
            "epsilon": self.epsilon,
            "shots": format_shots(self.n_shots),
            "alpha": self.alpha,
            "seed": self.seed,
        }


class ExperimentConfig(BaseModel):
    """
    A complete experiment: data, model, training, privacy, grid and output

    Files are TOML or YAML with one section per field. Invalid values raise
    ``pydantic.ValidationError`` with field-level messages before anything
    is computed.

    Example:
    >>> from shotdp.experiments import ExperimentConfig

    >>> config = ExperimentConfig.from_file("bars.toml", {"train.lr": 0.1})
    >>> for cell in config.cells():
    ...     print(cell.stem(config.dataset.name))
    """

    model_config = ConfigDict(extra="forbid")

    dataset: DatasetSection = Field(default_factory=DatasetSection)
    model: ModelSection = Field(default_factory=ModelSection)
    train: TrainSection = Field(default_factory=TrainSection)
    privacy: PrivacySection = Field(default_factory=PrivacySection)
    grid: GridSection = Field(default_factory=GridSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def _check_cells(self) -> "ExperimentConfig":
        if self.dataset.name != "mnist" and self.train.batch_size > self.dataset.n_samples:
            raise ValueError(
                f"batch_size {self.train.batch_size} exceeds dataset size "
                f"{self.dataset.n_samples}"
            )
        for cell in self.cells():
            if cell.mode is TrainMode.ADAPTIVE and math.isinf(cell.n_shots):
                raise ValueError("adaptive mode needs a finite shot count")
        return self

    @classmethod
    def from_file(
        cls,
        path: Union[str, Path],
        overrides: Optional[Mapping[str, Any]] = None,
    ) -> "ExperimentConfig":
        """
        Load a config file and apply overrides

        Args:
            path: ``.toml``, ``.yaml``/``.yml`` or ``.json`` file
            overrides: Dotted keys such as ``"train.lr"``; None values are skipped

        Returns:
            ExperimentConfig

        Raises:
            OSError: If the file cannot be read
            ValueError: If the file cannot be parsed
            pydantic.ValidationError: On invalid settings
        """
        data = load_config_file(path)
        return cls.from_dict(data, overrides)

    @classmethod
    def from_dict(
        cls,
        data: Mapping[str, Any],
        overrides: Optional[Mapping[str, Any]] = None,
    ) -> "ExperimentConfig":
        """
        Create a config from a sectioned mapping plus dotted overrides

        Args:
            data: Mapping of section name to settings
            overrides: Dotted keys such as ``"privacy.epsilon"``

        Returns:
            ExperimentConfig
        """
        merged: Dict[str, Any] = {
            k: dict(v) if isinstance(v, Mapping) else v for k, v in data.items()
        }
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            section, _, name = key.partition(".")
            if not name:
                raise ValueError(f"Override key must look like 'section.field', got '{key}'")
            target = merged.setdefault(section, {})
            if not isinstance(target, dict):
                raise ValueError(f"Section '{section}' is not a mapping")
            target[name] = value
        return cls.model_validate(merged)

    def to_dict(self) -> Dict[str, Any]:
        """Plain mapping of every setting (enums as values, ∞ as a float)"""
        data = self.model_dump()
        data["train"]["mode"] = self.train.mode.value
        if self.grid.modes is not None:
            data["grid"]["modes"] = [m.value for m in self.grid.modes]
        return data

    def cells(self) -> List[GridCell]:
        """
        Expand the grid into cells

        Non-private cells do not depend on ε, so they are collapsed to one
        cell with ε = ∞ per (N_s, α, seed).

        Returns:
            Cells in grid order: mode, ε, N_s, α, seed
        """
        modes = self.grid.modes or [self.train.mode]
        epsilons = self.grid.epsilons or [self.privacy.epsilon]
        shots = self.grid.shots or [self.train.shots]
        alphas = self.grid.alphas or [self.train.alpha]
        seeds = self.grid.seeds or [self.train.seed]

        cells: List[GridCell] = []
        seen = set()
        for mode in modes:
            for epsilon in epsilons:
                if mode is TrainMode.NON_PRIVATE:
                    epsilon = math.inf
                for n_shots in shots:
                    for alpha in alphas:
                        for seed in seeds:
                            cell = GridCell(mode, epsilon, n_shots, alpha, seed)
                            if cell not in seen:
                                seen.add(cell)
                                cells.append(cell)
        return cells

    def ansatz(self) -> AnsatzSpec:
        """Strongly entangling circuit of the configured size"""
        return AnsatzSpec(n_qubits=self.model.n_qubits, n_layers=self.model.n_layers)

    def budget(self, cell: Optional[GridCell] = None) -> PrivacyBudget:
        """Privacy budget of a cell (q and T are filled in at run time)"""
        epsilon = self.privacy.epsilon
        if cell is not None and not math.isinf(cell.epsilon):
            epsilon = cell.epsilon
        return PrivacyBudget(
            epsilon=epsilon,
            delta=self.privacy.delta,
            beta=self.privacy.beta,
            c2=self.privacy.c2,
            delta0=self.privacy.delta0,
            c1=self.privacy.c1,
        )

    def train_config(self, cell: GridCell) -> TrainConfig:
        """TrainConfig of one grid cell"""
        return TrainConfig(
            lr=self.train.lr,
            steps=self.train.steps,
            batch_size=self.train.batch_size,
            n_shots=cell.n_shots,
            alpha=cell.alpha,
            budget=self.budget(cell),
            mode=cell.mode,
            seed=cell.seed,
            input_sensitivity=self.train.input_sensitivity,
        )

    def describe(self) -> str:
        """One-line summary for logs"""
        return (
            f"{self.dataset.name}: {len(self.cells())} cells, "
            f"T={self.train.steps}, B={self.train.batch_size}, "
            f"lr={format_float(self.train.lr, 6)}"
        )

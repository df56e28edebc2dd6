"""
Benchmark datasets: Bars & Stripes, Binary Blobs and downscaled MNIST
"""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from shotdp.sim.rng import RngStream

logger = logging.getLogger(__name__)

BARS_PATTERNS = np.array([[1, 1, 0, 0], [0, 0, 1, 1]], dtype=float)
"""Non-trivial row-constant 2x2 grids (flattened row-major)"""

STRIPES_PATTERNS = np.array([[1, 0, 1, 0], [0, 1, 0, 1]], dtype=float)
"""Non-trivial column-constant 2x2 grids (flattened row-major)"""

BLOB_PROTOTYPES = np.array(
    [
        # 4x4 grids, row-major: halves then quadrants
        [1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1],
        [1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0],
        [0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1],
        [1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1],
    ],
    dtype=float,
)
"""Eight 16-bit blob prototypes, pairwise Hamming distance at least 4"""

MNIST_FEATURES = 16


@dataclass(eq=False)
class Dataset:
    """
    Labeled inputs

    Example:
    >>> from shotdp.data import gen_bars_stripes
    >>> from shotdp.sim import RngStream

    >>> data = gen_bars_stripes(1000, RngStream(0))
    >>> data.size, data.input_dim
    (1000, 4)
    """

    inputs: np.ndarray
    """Array of shape (N, input_dim)"""

    labels: np.ndarray
    """Integer class ids of length N"""

    name: str = "dataset"
    """Dataset name"""

    n_classes: int = 2
    """Number of classes"""

    metadata: Dict[str, Any] = field(default_factory=dict)
    """Provenance (generator, parameters, seed)"""

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        errors = self.validate()
        if errors:
            raise ValueError(f"Invalid dataset '{self.name}': {'; '.join(errors)}")

    def validate(self) -> List[str]:
        """
        Validate the dataset

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []
        if self.inputs.ndim != 2:
            errors.append(f"Inputs must be a 2-D array, got shape {self.inputs.shape}")
        elif len(self.inputs) == 0:
            errors.append("Dataset is empty")
        if self.labels.shape != (len(self.inputs),):
            errors.append("Need exactly one label per input")
        elif len(self.labels) and (
            self.labels.min() < 0 or self.labels.max() >= self.n_classes
        ):
            errors.append(f"Labels must be in [0, {self.n_classes})")
        if self.inputs.size and not np.all(np.isfinite(self.inputs)):
            errors.append("Inputs must be finite")
        return errors

    @property
    def size(self) -> int:
        """Number of samples N"""
        return len(self.inputs)

    @property
    def input_dim(self) -> int:
        """Length of each input"""
        return self.inputs.shape[1]

    def __len__(self) -> int:
        return self.size

    def subset(self, indices) -> "Dataset":
        """Dataset restricted to ``indices``"""
        indices = np.asarray(indices, dtype=int)
        return Dataset(
            self.inputs[indices],
            self.labels[indices],
            self.name,
            self.n_classes,
            dict(self.metadata),
        )

    def class_counts(self) -> np.ndarray:
        """Number of samples per class"""
        return np.bincount(self.labels, minlength=self.n_classes)

    def to_csv(self, path: Union[str, Path]) -> None:
        """
        Write features followed by the label, one sample per row

        Args:
            path: Destination file
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow([f"x{i}" for i in range(self.input_dim)] + ["label"])
            for x, y in zip(self.inputs, self.labels):
                writer.writerow([repr(float(v)) for v in x] + [int(y)])
        logger.info(f"Wrote {self.size} samples of '{self.name}' to {path}")


def _balanced_labels(n_samples: int, n_classes: int, rng: np.random.Generator) -> np.ndarray:
    """Labels with class counts equal up to one, in random order"""
    labels = np.arange(n_samples) % n_classes
    # leftover samples go to randomly chosen classes
    remainder = n_samples % n_classes
    if remainder:
        extra = rng.choice(n_classes, size=remainder, replace=False)
        labels[n_samples - remainder :] = extra
    return rng.permutation(labels)


def classify_grid(grid) -> Optional[int]:
    """
    Class of a 2x2 binary grid: 0 for bars, 1 for stripes

    Returns:
        0 or 1, or None when the grid fits both patterns or neither
    """
    grid = np.asarray(grid).reshape(2, 2)
    bars = bool(np.all(grid[:, 0] == grid[:, 1]))
    stripes = bool(np.all(grid[0, :] == grid[1, :]))
    if bars == stripes:
        return None
    return 0 if bars else 1


def gen_bars_stripes(
    n_samples: int,
    stream: RngStream,
    uniform_fraction: float = 0.1,
    noise_std: float = 0.0,
) -> Dataset:
    """
    2x2 Bars & Stripes

    Class 0 holds row-constant grids (bars), class 1 column-constant grids
    (stripes). With probability ``uniform_fraction`` a sample is an
    all-0 or all-1 grid instead; these fit both patterns and keep the
    label drawn for the sample.

    Args:
        n_samples: Number of samples, at least 2
        stream: Random stream
        uniform_fraction: Probability of emitting an all-0/all-1 grid
        noise_std: Std of Gaussian pixel noise, clipped to [0, 1]

    Returns:
        Dataset with 4-pixel inputs
    """
    if n_samples < 2:
        raise ValueError(f"Bars & Stripes needs at least 2 samples, got {n_samples}")
    if not 0.0 <= uniform_fraction <= 1.0:
        raise ValueError(f"uniform_fraction must be in [0, 1], got {uniform_fraction}")
    if noise_std < 0.0:
        raise ValueError(f"noise_std must be nonnegative, got {noise_std}")

    rng = stream.generator()
    labels = _balanced_labels(n_samples, 2, rng)
    patterns = np.stack([BARS_PATTERNS, STRIPES_PATTERNS])
    choice = rng.integers(0, 2, size=n_samples)
    inputs = patterns[labels, choice]

    trivial = rng.random(n_samples) < uniform_fraction
    fill = rng.integers(0, 2, size=n_samples).astype(float)
    inputs[trivial] = fill[trivial, None]

    if noise_std > 0.0:
        inputs = np.clip(inputs + rng.normal(0.0, noise_std, inputs.shape), 0.0, 1.0)

    return Dataset(
        inputs,
        labels,
        name="bars_stripes",
        metadata={
            "generator": "bars_stripes",
            "n_samples": n_samples,
            "uniform_fraction": uniform_fraction,
            "noise_std": noise_std,
            "seed": stream.seed,
            "stream_key": list(stream.key),
        },
    )


def gen_binary_blobs(
    n_samples: int,
    flip_prob: float,
    stream: RngStream,
    n_classes: int = 2,
) -> Dataset:
    """
    Binary Blobs: noisy copies of fixed 16-bit prototypes

    Each bit of the prototype is flipped independently with ``flip_prob``.
    Class y uses prototype y, so the binary task keeps prototypes 0 and 1.
    An all-zero sample cannot be amplitude encoded and is redrawn.

    Args:
        n_samples: Number of samples
        flip_prob: Bit-flip probability in [0, 1)
        stream: Random stream
        n_classes: Number of prototypes in use (2 .. 8)

    Returns:
        Dataset with 16-bit inputs
    """
    if not 0.0 <= flip_prob < 1.0:
        raise ValueError(f"flip_prob must be in [0, 1), got {flip_prob}")
    if not 2 <= n_classes <= len(BLOB_PROTOTYPES):
        raise ValueError(
            f"n_classes must be in [2, {len(BLOB_PROTOTYPES)}], got {n_classes}"
        )
    if n_samples < 1:
        raise ValueError(f"Number of samples must be positive, got {n_samples}")

    rng = stream.generator()
    labels = _balanced_labels(n_samples, n_classes, rng)
    prototypes = BLOB_PROTOTYPES[labels]
    flips = rng.random(prototypes.shape) < flip_prob
    inputs = np.where(flips, 1.0 - prototypes, prototypes)

    empty = ~inputs.any(axis=1)
    while np.any(empty):
        redraw = rng.random((int(empty.sum()), inputs.shape[1])) < flip_prob
        inputs[empty] = np.where(redraw, 1.0 - prototypes[empty], prototypes[empty])
        empty = ~inputs.any(axis=1)

    return Dataset(
        inputs,
        labels,
        name="binary_blobs",
        n_classes=n_classes,
        metadata={
            "generator": "binary_blobs",
            "n_samples": n_samples,
            "flip_prob": flip_prob,
            "n_classes": n_classes,
            "seed": stream.seed,
            "stream_key": list(stream.key),
        },
    )


def _is_header(row: List[str]) -> bool:
    try:
        [float(v) for v in row]
    except ValueError:
        return True
    return False


def load_downscaled_mnist(path: Union[str, Path]) -> Dataset:
    """
    Load a two-class downscaled MNIST CSV

    Each row holds 16 features in [0, 1] followed by an integer label. An
    optional header row is skipped. The two labels found are mapped to
    classes 0 and 1 in ascending order.

    Args:
        path: CSV file

    Returns:
        Dataset with 16-dim inputs

    Raises:
        OSError: If the file cannot be read
        ValueError: On malformed rows (naming the line), out-of-range values,
            an empty file or a label count other than two
    """
    path = Path(path)
    features: List[List[float]] = []
    raw_labels: List[int] = []

    with open(path, "r", newline="", encoding="utf-8") as f:
        for line_no, row in enumerate(csv.reader(f), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if line_no == 1 and _is_header(row):
                continue
            if len(row) != MNIST_FEATURES + 1:
                raise ValueError(
                    f"{path}:{line_no}: expected {MNIST_FEATURES} features and a "
                    f"label, got {len(row)} columns"
                )
            try:
                values = [float(v) for v in row[:MNIST_FEATURES]]
                label_value = float(row[MNIST_FEATURES])
            except ValueError as e:
                raise ValueError(f"{path}:{line_no}: malformed row ({e})") from e
            if not label_value.is_integer():
                raise ValueError(f"{path}:{line_no}: label must be an integer")
            if any(not 0.0 <= v <= 1.0 for v in values):
                raise ValueError(f"{path}:{line_no}: feature values must be in [0, 1]")
            if not any(values):
                raise ValueError(f"{path}:{line_no}: all-zero features cannot be encoded")
            features.append(values)
            raw_labels.append(int(label_value))

    if not features:
        raise ValueError(f"{path}: no samples found")

    classes = sorted(set(raw_labels))
    if len(classes) != 2:
        raise ValueError(f"{path}: expected two classes, found labels {classes}")
    mapping = {label: i for i, label in enumerate(classes)}

    logger.info(f"Loaded {len(features)} downscaled MNIST samples from {path}")
    return Dataset(
        np.array(features),
        np.array([mapping[label] for label in raw_labels]),
        name="mnist",
        metadata={"generator": "mnist", "path": str(path), "label_map": classes},
    )


def train_test_split(
    dataset: Dataset, test_fraction: float, stream: RngStream
) -> Tuple[Dataset, Dataset]:
    """
    Random split into train and test parts

    Args:
        dataset: Dataset to split
        test_fraction: Share of samples held out, in (0, 1)
        stream: Random stream

    Returns:
        (train set, test set), both nonempty
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n_test = int(round(dataset.size * test_fraction))
    n_test = min(max(n_test, 1), dataset.size - 1)
    if n_test < 1:
        raise ValueError("Dataset is too small to split")
    order = stream.generator().permutation(dataset.size)
    return dataset.subset(order[n_test:]), dataset.subset(order[:n_test])

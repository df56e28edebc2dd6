"""
Datasets for the classification benchmarks
"""

from shotdp.data.datasets import (
    BLOB_PROTOTYPES,
    Dataset,
    classify_grid,
    gen_bars_stripes,
    gen_binary_blobs,
    load_downscaled_mnist,
    train_test_split,
)

__all__ = [
    "BLOB_PROTOTYPES",
    "Dataset",
    "classify_grid",
    "gen_bars_stripes",
    "gen_binary_blobs",
    "load_downscaled_mnist",
    "train_test_split",
]

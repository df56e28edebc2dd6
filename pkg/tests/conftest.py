"""Test configuration and shared fixtures for all tests."""

import numpy as np
import pytest

from shotdp.circuit import AnsatzSpec, LabelObservables
from shotdp.data import gen_bars_stripes, gen_binary_blobs
from shotdp.privacy import PrivacyBudget
from shotdp.sim import RngStream


@pytest.fixture
def ansatz():
    """One strongly entangling layer on four qubits (K = 12)."""
    return AnsatzSpec(n_qubits=4, n_layers=1)


@pytest.fixture
def labels():
    """Binary label observables on four qubits."""
    return LabelObservables.for_classes(4, 2)


@pytest.fixture
def stream():
    """Root random stream with seed 0."""
    return RngStream(0)


@pytest.fixture
def theta(ansatz):
    """Fixed random parameter vector."""
    return RngStream(123).generator().uniform(0.0, 2.0 * np.pi, size=ansatz.n_params)


@pytest.fixture
def bars_data():
    """Small Bars & Stripes training set."""
    return gen_bars_stripes(64, RngStream(11))


@pytest.fixture
def bars_test():
    """Small Bars & Stripes test set."""
    return gen_bars_stripes(32, RngStream(12))


@pytest.fixture
def blobs_data():
    """Small Binary Blobs set (16-dim, amplitude encoded)."""
    return gen_binary_blobs(32, 0.05, RngStream(13))


@pytest.fixture
def budget():
    """Default privacy budget with an adaptive failure probability."""
    return PrivacyBudget(epsilon=1.0, delta=1e-3, beta=1e-5)


@pytest.fixture
def tiny_config_data(tmp_path):
    """Sectioned settings of a fast experiment writing into tmp_path."""
    return {
        "dataset": {"name": "bars_stripes", "n_samples": 40, "n_test": 20},
        "model": {"n_qubits": 4, "n_layers": 1},
        "train": {"lr": 0.2, "steps": 2, "batch_size": 8, "shots": 50},
        "privacy": {"epsilon": 1.0, "delta": 1e-3, "beta": 1e-5},
        "output": {"path": str(tmp_path / "results")},
    }

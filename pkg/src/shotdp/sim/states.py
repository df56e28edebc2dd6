"""
Pure and mixed register states
"""

from dataclasses import dataclass

import numpy as np

STRUCTURE_TOL = 1e-10
"""Tolerance for structural invariants of freshly built states"""

CHAIN_TOL = 1e-9
"""Tolerance for states produced by long gate chains"""


def _check_qubits(n_qubits: int) -> int:
    n_qubits = int(n_qubits)
    if n_qubits < 1:
        raise ValueError(f"Number of qubits must be positive, got {n_qubits}")
    return n_qubits


@dataclass(frozen=True, eq=False)
class PureState:
    """
    Statevector of an n-qubit register

    Qubit 0 is the most significant bit of the basis index, so ``|10⟩`` on
    two qubits is basis index 2.

    Example:
    >>> from shotdp.sim import PureState
    >>> import numpy as np

    >>> plus = PureState(1, np.array([1, 1]) / np.sqrt(2))
    >>> plus.probabilities()
    array([0.5, 0.5])
    """

    n_qubits: int
    """Number of qubits"""

    amplitudes: np.ndarray
    """Complex amplitudes of length 2**n_qubits"""

    def __post_init__(self):
        n_qubits = _check_qubits(self.n_qubits)
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != 2**n_qubits:
            raise ValueError(
                f"Statevector length {amplitudes.shape[0]} does not match "
                f"{n_qubits} qubits (expected {2 ** n_qubits})"
            )
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > CHAIN_TOL:
            raise ValueError(f"Statevector norm must be 1, got {norm}")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension"""
        return 2**self.n_qubits

    def probabilities(self) -> np.ndarray:
        """Computational-basis probabilities"""
        return np.abs(self.amplitudes) ** 2

    def to_density(self) -> "MixedState":
        """Return the density matrix |ψ⟩⟨ψ|"""
        return MixedState.from_pure(self)


@dataclass(frozen=True, eq=False)
class MixedState:
    """
    Density matrix of an n-qubit register
    """

    n_qubits: int
    """Number of qubits"""

    rho: np.ndarray
    """Complex 2**n x 2**n density matrix"""

    def __post_init__(self):
        n_qubits = _check_qubits(self.n_qubits)
        rho = np.array(self.rho, dtype=complex)
        dim = 2**n_qubits
        if rho.shape != (dim, dim):
            raise ValueError(
                f"Density matrix shape {rho.shape} does not match "
                f"{n_qubits} qubits (expected {(dim, dim)})"
            )
        if not np.allclose(rho, rho.conj().T, atol=STRUCTURE_TOL, rtol=0.0):
            raise ValueError("Density matrix must be Hermitian")
        trace = float(np.trace(rho).real)
        if abs(trace - 1.0) > CHAIN_TOL:
            raise ValueError(f"Density matrix trace must be 1, got {trace}")
        min_eig = float(np.linalg.eigvalsh(rho).min())
        if min_eig < -STRUCTURE_TOL:
            raise ValueError(
                f"Density matrix must be positive semidefinite, "
                f"smallest eigenvalue {min_eig}"
            )
        rho.setflags(write=False)
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension"""
        return 2**self.n_qubits

    def probabilities(self) -> np.ndarray:
        """Computational-basis probabilities (diagonal of rho)"""
        return np.clip(np.diag(self.rho).real, 0.0, None)

    @classmethod
    def from_pure(cls, state: PureState) -> "MixedState":
        """Build |ψ⟩⟨ψ| from a statevector"""
        amps = state.amplitudes
        return cls(state.n_qubits, np.outer(amps, amps.conj()))

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "MixedState":
        """Return I/d"""
        dim = 2 ** _check_qubits(n_qubits)
        return cls(n_qubits, np.eye(dim, dtype=complex) / dim)


def basis_state(n_qubits: int, index: int) -> PureState:
    """
    Computational basis state |index⟩

    Args:
        n_qubits: Number of qubits
        index: Basis index, qubit 0 being the most significant bit

    Returns:
        Basis statevector
    """
    dim = 2 ** _check_qubits(n_qubits)
    if not 0 <= int(index) < dim:
        raise ValueError(f"Basis index {index} out of range for {n_qubits} qubits")
    amplitudes = np.zeros(dim, dtype=complex)
    amplitudes[int(index)] = 1.0
    return PureState(n_qubits, amplitudes)

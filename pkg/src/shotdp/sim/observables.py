"""
Observables in spectral form
"""

from enum import Enum
from typing import Optional, Tuple

import numpy as np

from shotdp.sim.states import STRUCTURE_TOL


class EigenBasis(Enum):
    """How an observable's eigenbasis is stored"""

    COMPUTATIONAL = "computational-diagonal"
    EXPLICIT = "explicit"


def _group_values(values: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Merge values closer than ``tol``; return distinct values and group index"""
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    group_of_sorted = np.zeros(len(values), dtype=int)
    for i in range(1, len(values)):
        gap = sorted_values[i] - sorted_values[i - 1]
        group_of_sorted[i] = group_of_sorted[i - 1] + (1 if gap > tol else 0)
    n_groups = int(group_of_sorted[-1]) + 1
    distinct = np.array(
        [sorted_values[group_of_sorted == g].mean() for g in range(n_groups)]
    )
    index = np.empty(len(values), dtype=int)
    index[order] = group_of_sorted
    return distinct, index


def _n_qubits_for(dim: int) -> int:
    n_qubits = int(dim).bit_length() - 1
    if dim < 2 or 2**n_qubits != dim:
        raise ValueError(f"Observable dimension must be a power of two >= 2, got {dim}")
    return n_qubits


class Observable:
    """
    Hermitian observable O = Σ λ_i P_i

    Identical eigenvalues are merged into a single outcome, so ``outcomes``
    lists the distinct measurement results in ascending order and
    ``eigenvalues`` keeps the full spectrum with multiplicity. Observables
    diagonal in the computational basis skip the projector matrices and map
    basis states straight to outcomes.

    Example:
    >>> from shotdp.sim import Observable

    >>> z = Observable.pauli_z(1, wire=0)
    >>> z.outcomes
    array([-1.,  1.])
    >>> cost = Observable.projector(4, index=0).complement()
    >>> cost.lambda_range
    1.0
    """

    def __init__(
        self,
        eigenvalues: np.ndarray,
        outcomes: np.ndarray,
        basis: EigenBasis,
        membership: Optional[np.ndarray] = None,
        projectors: Optional[np.ndarray] = None,
    ):
        """
        Initialize an observable from already grouped spectral data

        Prefer the ``diagonal``/``from_matrix``/``projector`` constructors.

        Args:
            eigenvalues: Full spectrum with multiplicity (length d)
            outcomes: Distinct eigenvalues in ascending order (length m)
            basis: Storage of the eigenbasis
            membership: d x m one-hot map from basis index to outcome
                (computational basis only)
            projectors: m x d x d spectral projectors (explicit basis only)
        """
        self._eigenvalues = np.asarray(eigenvalues, dtype=float)
        self._outcomes = np.asarray(outcomes, dtype=float)
        self._basis = basis
        self._dim = len(self._eigenvalues)
        self._n_qubits = _n_qubits_for(self._dim)

        if basis is EigenBasis.COMPUTATIONAL:
            if membership is None:
                raise ValueError("Diagonal observables need a membership map")
            self._membership = np.asarray(membership, dtype=float)
            self._projectors = None
            self._multiplicities = self._membership.sum(axis=0)
        else:
            if projectors is None:
                raise ValueError("Explicit observables need projectors")
            self._projectors = np.asarray(projectors, dtype=complex)
            self._membership = None
            self._check_projectors()
            self._multiplicities = np.rint(
                np.einsum("gii->g", self._projectors).real
            )

        for array in (self._eigenvalues, self._outcomes):
            array.setflags(write=False)

        self._lambda_min = float(self._outcomes[0])
        self._lambda_max = float(self._outcomes[-1])

    def _check_projectors(self) -> None:
        projectors = self._projectors
        identity = np.eye(self._dim)
        if not np.allclose(projectors.sum(axis=0), identity, atol=STRUCTURE_TOL):
            raise ValueError("Spectral projectors must sum to the identity")
        for i in range(len(projectors)):
            for j in range(i + 1, len(projectors)):
                if not np.allclose(
                    projectors[i] @ projectors[j], 0.0, atol=STRUCTURE_TOL
                ):
                    raise ValueError(
                        f"Spectral projectors {i} and {j} are not orthogonal"
                    )

    # ---- constructors -------------------------------------------------

    @classmethod
    def diagonal(cls, eigenvalues, tol: float = STRUCTURE_TOL) -> "Observable":
        """
        Observable diagonal in the computational basis

        Args:
            eigenvalues: Eigenvalue of each basis state, in basis order
            tol: Eigenvalues closer than this are merged into one outcome

        Returns:
            Observable
        """
        spectrum = np.asarray(eigenvalues, dtype=float).reshape(-1)
        if not np.all(np.isfinite(spectrum)):
            raise ValueError("Observable eigenvalues must be finite")
        _n_qubits_for(len(spectrum))
        outcomes, index = _group_values(spectrum, tol)
        membership = np.zeros((len(spectrum), len(outcomes)))
        membership[np.arange(len(spectrum)), index] = 1.0
        return cls(spectrum, outcomes, EigenBasis.COMPUTATIONAL, membership=membership)

    @classmethod
    def from_matrix(cls, matrix, tol: float = STRUCTURE_TOL) -> "Observable":
        """
        Diagonalize a Hermitian matrix once and keep its spectral form

        Args:
            matrix: d x d Hermitian matrix
            tol: Eigenvalue merge tolerance

        Returns:
            Observable (computational fast path when the matrix is diagonal)
        """
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Observable matrix must be square, got {matrix.shape}")
        if not np.allclose(matrix, matrix.conj().T, atol=tol, rtol=0.0):
            raise ValueError("Observable matrix must be Hermitian")

        off_diagonal = matrix - np.diag(np.diag(matrix))
        if np.allclose(off_diagonal, 0.0, atol=tol, rtol=0.0):
            return cls.diagonal(np.diag(matrix).real, tol=tol)

        values, vectors = np.linalg.eigh(matrix)
        outcomes, index = _group_values(values, tol)
        projectors = np.zeros((len(outcomes),) + matrix.shape, dtype=complex)
        for g in range(len(outcomes)):
            columns = vectors[:, index == g]
            projectors[g] = columns @ columns.conj().T
        return cls(values, outcomes, EigenBasis.EXPLICIT, projectors=projectors)

    @classmethod
    def projector(cls, n_qubits: int, index: int) -> "Observable":
        """Projector onto computational basis state |index⟩"""
        dim = 2**n_qubits
        if not 0 <= index < dim:
            raise ValueError(f"Basis index {index} out of range for {n_qubits} qubits")
        spectrum = np.zeros(dim)
        spectrum[index] = 1.0
        return cls.diagonal(spectrum)

    @classmethod
    def pauli_z(cls, n_qubits: int, wire: int = 0) -> "Observable":
        """Pauli Z on one wire"""
        if not 0 <= wire < n_qubits:
            raise ValueError(f"Wire {wire} out of range for {n_qubits} qubits")
        bits = (np.arange(2**n_qubits) >> (n_qubits - 1 - wire)) & 1
        return cls.diagonal(1.0 - 2.0 * bits)

    @classmethod
    def non_degenerate(cls, n_qubits: int) -> "Observable":
        """Eigenvalue i on basis state i (2**n distinct outcomes)"""
        return cls.diagonal(np.arange(2**n_qubits, dtype=float))

    @classmethod
    def identity(cls, n_qubits: int, scale: float = 1.0) -> "Observable":
        """Constant observable c·I"""
        return cls.diagonal(np.full(2**n_qubits, float(scale)))

    def complement(self) -> "Observable":
        """
        Return I − O for a projector observable

        Raises:
            ValueError: If the eigenvalues are not contained in {0, 1}
        """
        if not np.all(np.isin(self._outcomes, (0.0, 1.0))):
            raise ValueError("Complement is defined for projector observables only")
        if self._basis is EigenBasis.COMPUTATIONAL:
            return Observable.diagonal(1.0 - self._eigenvalues)
        return Observable(
            1.0 - self._eigenvalues,
            (1.0 - self._outcomes)[::-1].copy(),
            EigenBasis.EXPLICIT,
            projectors=self._projectors[::-1].copy(),
        )

    # ---- properties ---------------------------------------------------

    @property
    def dim(self) -> int:
        """Hilbert-space dimension d"""
        return self._dim

    @property
    def n_qubits(self) -> int:
        """Number of qubits"""
        return self._n_qubits

    @property
    def basis(self) -> EigenBasis:
        """Eigenbasis storage"""
        return self._basis

    @property
    def eigenvalues(self) -> np.ndarray:
        """Full spectrum with multiplicity"""
        return self._eigenvalues

    @property
    def outcomes(self) -> np.ndarray:
        """Distinct eigenvalues, ascending"""
        return self._outcomes

    @property
    def n_outcomes(self) -> int:
        """Number of distinct eigenvalues"""
        return len(self._outcomes)

    @property
    def multiplicities(self) -> np.ndarray:
        """Rank of each outcome's projector"""
        return self._multiplicities

    @property
    def membership(self) -> Optional[np.ndarray]:
        """Basis-index to outcome map (computational basis only)"""
        return self._membership

    @property
    def projectors(self) -> np.ndarray:
        """Spectral projectors, one per distinct outcome"""
        if self._projectors is not None:
            return self._projectors
        return np.stack([np.diag(column) for column in self._membership.T]).astype(
            complex
        )

    @property
    def lambda_min(self) -> float:
        """Smallest eigenvalue"""
        return self._lambda_min

    @property
    def lambda_max(self) -> float:
        """Largest eigenvalue"""
        return self._lambda_max

    @property
    def lambda_range(self) -> float:
        """λ_max − λ_min"""
        return self._lambda_max - self._lambda_min

    def matrix(self) -> np.ndarray:
        """Dense matrix representation"""
        if self._basis is EigenBasis.COMPUTATIONAL:
            return np.diag(self._eigenvalues).astype(complex)
        return np.einsum("g,gij->ij", self._outcomes, self._projectors)

    def same_outcomes(self, other: "Observable") -> bool:
        """Whether both observables produce the same outcome alphabet"""
        return self._dim == other._dim and np.array_equal(
            self._outcomes, other._outcomes
        )

    def __repr__(self) -> str:
        return (
            f"Observable(dim={self._dim}, basis={self._basis.value}, "
            f"outcomes={self._outcomes.tolist()})"
        )

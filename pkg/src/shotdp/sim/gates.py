"""
Gate definitions and statevector kernels
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Tuple

import numpy as np

from shotdp.sim.states import PureState


class GateKind(Enum):
    """Supported gate kinds"""

    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    ROT = "ROT"
    CNOT = "CNOT"


PAULI_ROTATIONS = (GateKind.RX, GateKind.RY, GateKind.RZ)

PAULI_ROTATION_FREQUENCY = 1.0
"""Eigenvalue gap of a Pauli rotation generator (eigenvalues ±1/2)"""


def rotation_matrices(kind: GateKind, angles) -> np.ndarray:
    """
    Matrices of a Pauli rotation for an array of angles

    Args:
        kind: RX, RY or RZ
        angles: Angle array of any shape

    Returns:
        Complex array of shape ``angles.shape + (2, 2)``
    """
    angles = np.asarray(angles, dtype=float)
    c = np.cos(angles / 2.0)
    s = np.sin(angles / 2.0)
    out = np.zeros(angles.shape + (2, 2), dtype=complex)
    if kind is GateKind.RX:
        out[..., 0, 0] = c
        out[..., 0, 1] = -1j * s
        out[..., 1, 0] = -1j * s
        out[..., 1, 1] = c
    elif kind is GateKind.RY:
        out[..., 0, 0] = c
        out[..., 0, 1] = -s
        out[..., 1, 0] = s
        out[..., 1, 1] = c
    elif kind is GateKind.RZ:
        out[..., 0, 0] = np.exp(-0.5j * angles)
        out[..., 1, 1] = np.exp(0.5j * angles)
    else:
        raise ValueError(f"{kind.value} is not a Pauli rotation")
    return out


def rot_matrix(phi: float, theta: float, omega: float) -> np.ndarray:
    """ROT(φ, θ, ω) = RZ(ω)·RY(θ)·RZ(φ)"""
    return (
        rotation_matrices(GateKind.RZ, omega)
        @ rotation_matrices(GateKind.RY, theta)
        @ rotation_matrices(GateKind.RZ, phi)
    )


@dataclass(frozen=True)
class GateSpec:
    """
    One gate of a circuit

    Example:
    >>> from shotdp.sim import GateSpec, GateKind

    >>> GateSpec(GateKind.RY, (0,), (np.pi,))
    >>> GateSpec(GateKind.CNOT, (0, 1))
    """

    kind: GateKind
    """Gate kind"""

    wires: Tuple[int, ...]
    """Qubits acted on (control first for CNOT)"""

    angles: Tuple[float, ...] = ()
    """Rotation angle(s) in radians"""

    @property
    def n_wires(self) -> int:
        """Number of wires the gate kind acts on"""
        return 2 if self.kind is GateKind.CNOT else 1

    @property
    def n_angles(self) -> int:
        """Number of angles the gate kind takes"""
        if self.kind is GateKind.CNOT:
            return 0
        return 3 if self.kind is GateKind.ROT else 1

    @property
    def frequency(self) -> float:
        """Generator eigenvalue gap Ω of each rotation angle (0 for CNOT)"""
        return 0.0 if self.kind is GateKind.CNOT else PAULI_ROTATION_FREQUENCY

    def validate(self, n_qubits: int) -> list:
        """
        Validate the gate against a register size

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []
        if len(self.wires) != self.n_wires:
            errors.append(
                f"{self.kind.value} acts on {self.n_wires} wire(s), got {len(self.wires)}"
            )
        if len(set(self.wires)) != len(self.wires):
            errors.append(f"Wire indices must be distinct, got {self.wires}")
        for wire in self.wires:
            if not 0 <= wire < n_qubits:
                errors.append(f"Wire {wire} out of range for {n_qubits} qubits")
        if len(self.angles) != self.n_angles:
            errors.append(
                f"{self.kind.value} takes {self.n_angles} angle(s), got {len(self.angles)}"
            )
        if not all(np.isfinite(a) for a in self.angles):
            errors.append(f"Angles must be finite, got {self.angles}")
        return errors

    def matrix(self) -> np.ndarray:
        """Unitary of the gate (2x2, or 4x4 for CNOT)"""
        if self.kind is GateKind.CNOT:
            return np.array(
                [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
            )
        if self.kind is GateKind.ROT:
            return rot_matrix(*self.angles)
        return rotation_matrices(self.kind, self.angles[0])


def apply_single_qubit(
    states: np.ndarray, matrices: np.ndarray, wire: int, n_qubits: int
) -> np.ndarray:
    """
    Apply a one-qubit unitary to a batch of statevectors

    ``matrices`` is either one 2x2 matrix or an array of shape
    ``batch + (2, 2)`` that broadcasts against the leading dimensions of
    ``states``, so a different angle can be used per circuit.

    Args:
        states: Array of shape ``lead + (2**n_qubits,)``
        matrices: Gate matrix or matrix batch
        wire: Target qubit
        n_qubits: Register size

    Returns:
        New array of statevectors
    """
    lead = states.shape[:-1]
    psi = states.reshape(lead + (2,) * n_qubits)
    axis = len(lead) + wire
    psi = np.moveaxis(psi, axis, -1)

    matrices = np.asarray(matrices)
    transposed = np.swapaxes(matrices, -1, -2)
    if matrices.ndim > 2:
        transposed = transposed.reshape(
            matrices.shape[:-2] + (1,) * (n_qubits - 1) + (2, 2)
        )
    psi = (psi[..., None, :] @ transposed)[..., 0, :]

    # broadcasting may have added leading batch dimensions
    out_lead = psi.ndim - n_qubits
    psi = np.moveaxis(psi, -1, out_lead + wire)
    return psi.reshape(psi.shape[:out_lead] + (2**n_qubits,))


@lru_cache(maxsize=None)
def cnot_permutation(control: int, target: int, n_qubits: int) -> np.ndarray:
    """Basis-index permutation implementing CNOT(control, target)"""
    indices = np.arange(2**n_qubits)
    control_bit = 1 << (n_qubits - 1 - control)
    target_bit = 1 << (n_qubits - 1 - target)
    perm = np.where(indices & control_bit, indices ^ target_bit, indices)
    perm.setflags(write=False)
    return perm


def apply_gate(state: PureState, gate: GateSpec) -> PureState:
    """
    Apply a gate to a statevector

    Args:
        state: Input state
        gate: Gate to apply

    Returns:
        Output state

    Raises:
        ValueError: If the gate does not fit the register
    """
    errors = gate.validate(state.n_qubits)
    if errors:
        raise ValueError(f"Invalid gate {gate.kind.value}: {'; '.join(errors)}")

    amplitudes = np.asarray(state.amplitudes)
    if gate.kind is GateKind.CNOT:
        perm = cnot_permutation(gate.wires[0], gate.wires[1], state.n_qubits)
        out = amplitudes[perm]
    else:
        out = apply_single_qubit(
            amplitudes, gate.matrix(), gate.wires[0], state.n_qubits
        )
    return PureState(state.n_qubits, out)

"""
Classical data encoders
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List

import numpy as np

from shotdp.sim.states import PureState


class EncodingScheme(Enum):
    """Data encoding schemes"""

    ANGLE = "angle"
    AMPLITUDE = "amplitude"


@dataclass(frozen=True)
class EncoderSpec:
    """
    Map from classical inputs to input states

    ``angle`` applies RY(π·x_i) to qubit i, so binary pixels map to basis
    states. ``amplitude`` uses the normalized 2**n-dim input vector as the
    amplitudes.

    Example:
    >>> from shotdp.circuit import EncoderSpec, EncodingScheme, encode

    >>> enc = EncoderSpec(EncodingScheme.ANGLE, n_qubits=4)
    >>> encode([1, 0, 0, 0], enc)   # |1000⟩
    """

    scheme: EncodingScheme = EncodingScheme.ANGLE
    """Encoding scheme"""

    n_qubits: int = 4
    """Register size"""

    @property
    def input_dim(self) -> int:
        """Expected input length"""
        if self.scheme is EncodingScheme.ANGLE:
            return self.n_qubits
        return 2**self.n_qubits

    @classmethod
    def for_input_dim(cls, input_dim: int, n_qubits: int) -> "EncoderSpec":
        """Pick angle encoding for n-dim inputs and amplitude for 2**n-dim ones"""
        if input_dim == n_qubits:
            return cls(EncodingScheme.ANGLE, n_qubits)
        if input_dim == 2**n_qubits:
            return cls(EncodingScheme.AMPLITUDE, n_qubits)
        raise ValueError(
            f"No encoding maps {input_dim}-dim inputs onto {n_qubits} qubits"
        )

    def validate(self) -> List[str]:
        """
        Validate the encoder

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []
        if not isinstance(self.scheme, EncodingScheme):
            errors.append("Encoding scheme must be an EncodingScheme enum")
        if self.n_qubits < 1:
            errors.append("Number of qubits must be positive")
        return errors

    def is_valid(self) -> bool:
        """Check if the encoder is valid"""
        return len(self.validate()) == 0

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EncoderSpec":
        """Create an EncoderSpec from a dictionary"""
        return cls(
            scheme=EncodingScheme(data.get("scheme", "angle")),
            n_qubits=int(data.get("n_qubits", 4)),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary format"""
        return {"scheme": self.scheme.value, "n_qubits": self.n_qubits}


def encode_batch(inputs, enc: EncoderSpec) -> np.ndarray:
    """
    Encode a batch of inputs

    Args:
        inputs: Array of shape (N, input_dim)
        enc: Encoder

    Returns:
        Complex array of shape (N, 2**n_qubits)

    Raises:
        ValueError: On wrong input length or a zero-norm amplitude input
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != enc.input_dim:
        raise ValueError(
            f"{enc.scheme.value} encoding on {enc.n_qubits} qubits expects inputs "
            f"of length {enc.input_dim}, got shape {inputs.shape}"
        )

    if enc.scheme is EncodingScheme.AMPLITUDE:
        norms = np.linalg.norm(inputs, axis=1)
        if np.any(norms == 0.0):
            bad = int(np.flatnonzero(norms == 0.0)[0])
            raise ValueError(f"Amplitude encoding of a zero-norm input (row {bad})")
        return (inputs / norms[:, None]).astype(complex)

    # product state of RY(π x_i)|0⟩, qubit 0 most significant
    half = np.pi * inputs / 2.0
    qubits = np.stack([np.cos(half), np.sin(half)], axis=-1)
    states = qubits[:, 0, :]
    for i in range(1, enc.n_qubits):
        states = (states[:, :, None] * qubits[:, i, None, :]).reshape(len(inputs), -1)
    return states.astype(complex)


def encode(x, enc: EncoderSpec) -> PureState:
    """
    Encode a single input vector

    Args:
        x: Input vector
        enc: Encoder

    Returns:
        Encoded input state
    """
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return PureState(enc.n_qubits, encode_batch(x, enc)[0])

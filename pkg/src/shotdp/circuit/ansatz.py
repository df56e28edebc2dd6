"""
Parametrized circuit templates and batched circuit evaluation
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from shotdp.circuit.encoding import EncoderSpec, encode_batch
from shotdp.sim.gates import (
    PAULI_ROTATION_FREQUENCY,
    PAULI_ROTATIONS,
    GateKind,
    GateSpec,
    apply_single_qubit,
    cnot_permutation,
    rotation_matrices,
)
from shotdp.sim.measurement import expectation
from shotdp.sim.observables import Observable
from shotdp.sim.states import PureState


@dataclass(frozen=True)
class TemplateOp:
    """One gate slot of a template; rotations name the parameter they read"""

    kind: GateKind
    wires: Tuple[int, ...]
    param: Optional[int] = None


def strongly_entangling_template(n_qubits: int, n_layers: int) -> Tuple[TemplateOp, ...]:
    """
    Gate slots of a strongly entangling layer stack

    Each layer applies ROT = RZ·RY·RZ to every qubit and then a ring of
    CNOTs with stride 1. Parameter ``((l * n_qubits) + q) * 3 + r`` is the
    r-th Euler angle of qubit q in layer l.
    """
    ops: List[TemplateOp] = []
    for layer in range(n_layers):
        for qubit in range(n_qubits):
            base = (layer * n_qubits + qubit) * 3
            ops.append(TemplateOp(GateKind.RZ, (qubit,), base))
            ops.append(TemplateOp(GateKind.RY, (qubit,), base + 1))
            ops.append(TemplateOp(GateKind.RZ, (qubit,), base + 2))
        if n_qubits > 1:
            for qubit in range(n_qubits):
                ops.append(TemplateOp(GateKind.CNOT, (qubit, (qubit + 1) % n_qubits)))
    return tuple(ops)


@dataclass(frozen=True)
class AnsatzSpec:
    """
    Trainable circuit U(θ)

    Every trainable angle drives its own Pauli rotation, so each parameter
    has frequency Ω_k = 1. Without explicit ``operations`` the template is
    the strongly entangling stack with K = 3·n_qubits·n_layers parameters.

    Example:
    >>> from shotdp.circuit import AnsatzSpec

    >>> ansatz = AnsatzSpec(n_qubits=4, n_layers=1)
    >>> ansatz.n_params
    12
    """

    n_qubits: int = 4
    """Register size"""

    n_layers: int = 1
    """Number of strongly entangling layers"""

    operations: Tuple[TemplateOp, ...] = field(default=None)
    """Gate slots; built from n_layers when omitted"""

    def __post_init__(self):
        if self.operations is None:
            object.__setattr__(
                self,
                "operations",
                strongly_entangling_template(self.n_qubits, self.n_layers),
            )
        else:
            object.__setattr__(self, "operations", tuple(self.operations))

    @classmethod
    def from_operations(
        cls, n_qubits: int, operations: Sequence[TemplateOp]
    ) -> "AnsatzSpec":
        """Custom template (n_layers is reported as 0)"""
        return cls(n_qubits=n_qubits, n_layers=0, operations=tuple(operations))

    @property
    def n_params(self) -> int:
        """Number of trainable angles K"""
        return sum(1 for op in self.operations if op.param is not None)

    @property
    def frequencies(self) -> np.ndarray:
        """Generator frequency Ω_k of each parameter"""
        return np.full(self.n_params, PAULI_ROTATION_FREQUENCY)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension"""
        return 2**self.n_qubits

    def validate(self) -> List[str]:
        """
        Validate the template

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []
        if self.n_qubits < 1:
            errors.append("Number of qubits must be positive")
        if self.n_layers < 0:
            errors.append("Number of layers cannot be negative")

        params = []
        for position, op in enumerate(self.operations):
            if op.kind is GateKind.ROT:
                errors.append(
                    f"Slot {position}: ROT must be split into its three rotations"
                )
            gate = GateSpec(op.kind, op.wires, () if op.kind is GateKind.CNOT else (0.0,))
            errors.extend(f"Slot {position}: {e}" for e in gate.validate(self.n_qubits))
            if op.param is not None:
                if op.kind not in PAULI_ROTATIONS:
                    errors.append(f"Slot {position}: only rotations take parameters")
                params.append(op.param)
            elif op.kind in PAULI_ROTATIONS:
                errors.append(f"Slot {position}: rotation without a parameter")

        if sorted(params) != list(range(len(params))):
            errors.append("Parameter indices must cover 0..K-1 exactly once")
        return errors

    def is_valid(self) -> bool:
        """Check if the template is valid"""
        return len(self.validate()) == 0

    def gates(self, theta) -> List[GateSpec]:
        """Concrete gate list for a parameter vector"""
        theta = check_theta(theta, self)
        return [
            GateSpec(op.kind, op.wires)
            if op.param is None
            else GateSpec(op.kind, op.wires, (float(theta[op.param]),))
            for op in self.operations
        ]

    def evolve(self, states: np.ndarray, thetas: np.ndarray) -> np.ndarray:
        """
        Run the circuit on a batch of states with a batch of parameter vectors

        Leading dimensions of ``states`` (``... x d``) and ``thetas``
        (``... x K``) broadcast against each other.

        Args:
            states: Input statevectors
            thetas: Parameter vectors

        Returns:
            Output statevectors of the broadcast shape
        """
        thetas = np.asarray(thetas, dtype=float)
        states = np.asarray(states, dtype=complex)
        lead = np.broadcast_shapes(states.shape[:-1], thetas.shape[:-1])
        psi = np.array(np.broadcast_to(states, lead + (self.dim,)))
        for op in self.operations:
            if op.kind is GateKind.CNOT:
                psi = psi[..., cnot_permutation(op.wires[0], op.wires[1], self.n_qubits)]
            else:
                matrices = rotation_matrices(op.kind, thetas[..., op.param])
                psi = apply_single_qubit(psi, matrices, op.wires[0], self.n_qubits)
        return psi

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AnsatzSpec":
        """Create a strongly entangling AnsatzSpec from a dictionary"""
        return cls(
            n_qubits=int(data.get("n_qubits", 4)), n_layers=int(data.get("n_layers", 1))
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary format"""
        return {
            "n_qubits": self.n_qubits,
            "n_layers": self.n_layers,
            "n_params": self.n_params,
        }


@dataclass(frozen=True, eq=False)
class ParamVector:
    """Trainable angles θ in radians"""

    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).reshape(-1)
        if not np.all(np.isfinite(theta)):
            raise ValueError("Parameters must be finite")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    def __len__(self) -> int:
        return len(self.theta)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.theta, dtype=dtype)


ThetaLike = Union[ParamVector, np.ndarray, Sequence[float]]


def check_theta(theta: ThetaLike, ansatz: AnsatzSpec) -> np.ndarray:
    """Return θ as a float array after checking its length against the ansatz"""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if len(theta) != ansatz.n_params:
        raise ValueError(
            f"Parameter vector has length {len(theta)}, ansatz expects {ansatz.n_params}"
        )
    if not np.all(np.isfinite(theta)):
        raise ValueError("Parameters must be finite")
    return theta


def psr_shifts(ansatz: AnsatzSpec) -> np.ndarray:
    """Parameter-shift s_k = π/(2Ω_k) of each parameter"""
    return np.pi / (2.0 * ansatz.frequencies)


def shifted_thetas(theta: np.ndarray, shifts) -> np.ndarray:
    """
    Parameter vectors with one coordinate shifted up or down

    Args:
        theta: Parameter vector of length K
        shifts: Scalar or length-K shift sizes

    Returns:
        Array of shape (K, 2, K); ``[k, 0]`` is θ + s_k·e_k, ``[k, 1]`` is θ − s_k·e_k
    """
    k = len(theta)
    offsets = np.eye(k) * np.broadcast_to(np.asarray(shifts, dtype=float), (k,))
    return np.stack([theta + offsets, theta - offsets], axis=1)


def _input_states(inputs, ansatz: AnsatzSpec, enc: Optional[EncoderSpec]) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim == 1:
        inputs = inputs[None, :]
    if enc is None:
        enc = EncoderSpec.for_input_dim(inputs.shape[1], ansatz.n_qubits)
    if enc.n_qubits != ansatz.n_qubits:
        raise ValueError(
            f"Encoder uses {enc.n_qubits} qubits, ansatz uses {ansatz.n_qubits}"
        )
    return encode_batch(inputs, enc)


def output_states(
    inputs, theta: ThetaLike, ansatz: AnsatzSpec, enc: Optional[EncoderSpec] = None
) -> np.ndarray:
    """Output statevectors U(θ)|ψ₀(x)⟩ for a batch of inputs, shape (N, d)"""
    theta = check_theta(theta, ansatz)
    return ansatz.evolve(_input_states(inputs, ansatz, enc), theta)


def shifted_output_states(
    inputs,
    theta: ThetaLike,
    ansatz: AnsatzSpec,
    enc: Optional[EncoderSpec] = None,
    shifts=None,
) -> np.ndarray:
    """
    Output states of every shifted circuit for a batch of inputs

    Args:
        inputs: Array of shape (N, input_dim)
        theta: Parameter vector
        ansatz: Circuit template
        enc: Encoder (inferred from the input length when omitted)
        shifts: Shift sizes, defaults to π/(2Ω_k)

    Returns:
        Complex array of shape (N, K, 2, d)
    """
    theta = check_theta(theta, ansatz)
    if shifts is None:
        shifts = psr_shifts(ansatz)
    states = _input_states(inputs, ansatz, enc)
    return ansatz.evolve(states[:, None, None, :], shifted_thetas(theta, shifts)[None])


def prepare_input(x, ansatz: AnsatzSpec, enc: Optional[EncoderSpec] = None) -> np.ndarray:
    """Input statevector for a vector input or an already prepared PureState"""
    if isinstance(x, PureState):
        if x.n_qubits != ansatz.n_qubits:
            raise ValueError(
                f"Input state has {x.n_qubits} qubits, ansatz uses {ansatz.n_qubits}"
            )
        return np.asarray(x.amplitudes)
    return _input_states(x, ansatz, enc)[0]


def run_circuit(
    x, theta: ThetaLike, ansatz: AnsatzSpec, enc: Optional[EncoderSpec] = None
) -> PureState:
    """
    Output state for one input

    Args:
        x: Input vector, or an already prepared input state
        theta: Parameter vector
        ansatz: Circuit template
        enc: Encoder for vector inputs

    Returns:
        Output state
    """
    theta = check_theta(theta, ansatz)
    return PureState(ansatz.n_qubits, ansatz.evolve(prepare_input(x, ansatz, enc), theta))


def forward(
    x,
    theta: ThetaLike,
    ansatz: AnsatzSpec,
    observable: Observable,
    enc: Optional[EncoderSpec] = None,
) -> float:
    """Expectation of ``observable`` on U(θ)|ψ₀(x)⟩"""
    return expectation(run_circuit(x, theta, ansatz, enc), observable)


def shifted_states(
    x,
    theta: ThetaLike,
    k: int,
    s: float,
    ansatz: AnsatzSpec,
    enc: Optional[EncoderSpec] = None,
) -> Tuple[PureState, PureState]:
    """
    Output states with parameter k shifted by +s and −s

    Args:
        x: Input vector or prepared input state
        theta: Parameter vector
        k: Zero-based parameter index
        s: Shift size in radians
        ansatz: Circuit template
        enc: Encoder for vector inputs

    Returns:
        (positive-shift state, negative-shift state)
    """
    theta = check_theta(theta, ansatz)
    if not 0 <= k < ansatz.n_params:
        raise ValueError(
            f"Parameter index {k} out of range for {ansatz.n_params} parameters"
        )
    offset = np.zeros_like(theta)
    offset[k] = s
    psi0 = prepare_input(x, ansatz, enc)
    plus, minus = ansatz.evolve(psi0, np.stack([theta + offset, theta - offset]))
    return PureState(ansatz.n_qubits, plus), PureState(ansatz.n_qubits, minus)

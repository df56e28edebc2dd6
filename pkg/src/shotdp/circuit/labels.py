"""
Per-class label observables and prediction
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from shotdp.circuit.ansatz import (
    AnsatzSpec,
    ThetaLike,
    check_theta,
    output_states,
    run_circuit,
)
from shotdp.circuit.encoding import EncoderSpec
from shotdp.sim.observables import Observable

LABEL_MASS_TOL = 1e-12
"""Total label mass at or below this counts as none"""


@dataclass(frozen=True, eq=False)
class LabelObservables:
    """
    Class readout: class y is read from the probability of basis state |y⟩

    ``observables[y]`` is the projector O_y and ``costs[y]`` the training
    cost observable I − O_y, both with eigenvalues {0, 1}.
    """

    n_qubits: int
    n_classes: int
    observables: Tuple[Observable, ...]
    costs: Tuple[Observable, ...]

    @classmethod
    def for_classes(cls, n_qubits: int = 4, n_classes: int = 2) -> "LabelObservables":
        """
        Label projectors onto the first ``n_classes`` basis states

        Args:
            n_qubits: Register size
            n_classes: Number of classes (2 .. 2**n_qubits)

        Returns:
            LabelObservables
        """
        if not 2 <= n_classes <= 2**n_qubits:
            raise ValueError(
                f"Number of classes must be in [2, {2 ** n_qubits}], got {n_classes}"
            )
        observables = tuple(Observable.projector(n_qubits, y) for y in range(n_classes))
        costs = tuple(o.complement() for o in observables)
        return cls(n_qubits, n_classes, observables, costs)

    def cost(self, label: int) -> Observable:
        """Cost observable I − O_y"""
        if not 0 <= label < self.n_classes:
            raise ValueError(f"Label {label} out of range for {self.n_classes} classes")
        return self.costs[label]

    def class_probabilities(self, states: np.ndarray) -> np.ndarray:
        """
        Renormalized label probabilities for a batch of output states

        Args:
            states: Complex array of shape (N, d)

        Returns:
            Array of shape (N, n_classes); rows whose label mass does not
            exceed ``LABEL_MASS_TOL`` are uniform
        """
        mass = np.abs(np.asarray(states)[..., : self.n_classes]) ** 2
        total = mass.sum(axis=-1, keepdims=True)
        uniform = np.full_like(mass, 1.0 / self.n_classes)
        with np.errstate(invalid="ignore", divide="ignore"):
            probs = np.where(total > LABEL_MASS_TOL, mass / total, uniform)
        return probs


def predict_batch(
    inputs,
    theta: ThetaLike,
    ansatz: AnsatzSpec,
    labels: LabelObservables,
    enc: Optional[EncoderSpec] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Predicted classes and renormalized class probabilities for a batch

    Ties go to the lowest class index.

    Returns:
        (classes of shape (N,), probabilities of shape (N, n_classes))
    """
    states = output_states(inputs, theta, ansatz, enc)
    probs = labels.class_probabilities(states)
    return np.argmax(probs, axis=1), probs


def predict(
    x,
    theta: ThetaLike,
    ansatz: AnsatzSpec,
    labels: LabelObservables,
    enc: Optional[EncoderSpec] = None,
) -> Tuple[int, np.ndarray]:
    """
    Predict the class of one input

    Args:
        x: Input vector or prepared input state
        theta: Parameter vector
        ansatz: Circuit template
        labels: Label observables
        enc: Encoder for vector inputs

    Returns:
        (class index, renormalized class probabilities)
    """
    check_theta(theta, ansatz)
    state = run_circuit(x, theta, ansatz, enc)
    probs = labels.class_probabilities(np.asarray(state.amplitudes)[None, :])[0]
    return int(np.argmax(probs)), probs

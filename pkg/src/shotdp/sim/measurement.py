"""
Measurement statistics, finite-shot sampling and global depolarizing noise
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from shotdp.sim.observables import EigenBasis, Observable
from shotdp.sim.rng import RngStream
from shotdp.sim.states import MixedState, PureState

State = Union[PureState, MixedState]


def _check_dims(state: State, observable: Observable) -> None:
    if state.dim != observable.dim:
        raise ValueError(
            f"State dimension {state.dim} does not match observable "
            f"dimension {observable.dim}"
        )


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"Depolarizing strength alpha must be in [0, 1], got {alpha}")
    return alpha


def outcome_probabilities(states: np.ndarray, observable: Observable) -> np.ndarray:
    """
    Outcome distributions for a batch of statevectors

    Args:
        states: Complex array of shape ``lead + (d,)``
        observable: Observable with m distinct outcomes

    Returns:
        Array of shape ``lead + (m,)``, clipped at zero
    """
    states = np.asarray(states)
    if states.shape[-1] != observable.dim:
        raise ValueError(
            f"State dimension {states.shape[-1]} does not match observable "
            f"dimension {observable.dim}"
        )
    if observable.basis is EigenBasis.COMPUTATIONAL:
        probs = (states.real**2 + states.imag**2) @ observable.membership
    else:
        probs = np.einsum(
            "...i,gij,...j->...g", states.conj(), observable.projectors, states
        ).real
    return np.clip(probs, 0.0, None)


def outcome_distribution(state: State, observable: Observable) -> np.ndarray:
    """
    Probability of each distinct eigenvalue of ``observable``

    Args:
        state: Pure or mixed state
        observable: Observable to measure

    Returns:
        Probability vector aligned with ``observable.outcomes``
    """
    _check_dims(state, observable)
    if isinstance(state, PureState):
        return outcome_probabilities(state.amplitudes, observable)
    if observable.basis is EigenBasis.COMPUTATIONAL:
        return np.clip(state.probabilities() @ observable.membership, 0.0, None)
    probs = np.einsum("gij,ji->g", observable.projectors, state.rho).real
    return np.clip(probs, 0.0, None)


def expectation(state: State, observable: Observable) -> float:
    """
    Expectation value ⟨O⟩, kept inside [λ_min, λ_max]

    Args:
        state: Pure or mixed state
        observable: Observable to measure

    Returns:
        Expectation value
    """
    value = float(outcome_distribution(state, observable) @ observable.outcomes)
    return float(np.clip(value, observable.lambda_min, observable.lambda_max))


def single_shot_variance(state: State, observable: Observable) -> float:
    """Variance Σλ²p − (Σλp)² of one measurement shot"""
    probs = outcome_distribution(state, observable)
    outcomes = observable.outcomes
    mean = float(probs @ outcomes)
    return max(0.0, float(probs @ outcomes**2) - mean**2)


def uniform_variance(observable: Observable) -> float:
    """Single-shot variance of ``observable`` on the maximally mixed state"""
    return float(np.var(observable.eigenvalues))


def apply_depolarizing(state: State, alpha: float) -> MixedState:
    """
    Global depolarizing channel ρ → (1−α)ρ + α·I/d

    Args:
        state: Input state (pure states are converted to density matrices)
        alpha: Depolarizing strength in [0, 1]

    Returns:
        Depolarized state
    """
    alpha = _check_alpha(alpha)
    if isinstance(state, PureState):
        state = state.to_density()
    rho = (1.0 - alpha) * np.asarray(state.rho) + alpha * np.eye(state.dim) / state.dim
    return MixedState(state.n_qubits, rho)


def depolarize_probabilities(
    probabilities: np.ndarray, observable: Observable, alpha: float
) -> np.ndarray:
    """
    Outcome distribution after global depolarizing, in closed form

    Equal to ``outcome_distribution(apply_depolarizing(ρ, α), O)`` given the
    undepolarized distribution of ρ.

    Args:
        probabilities: Outcome probabilities of shape ``lead + (m,)``
        observable: Observable the probabilities refer to
        alpha: Depolarizing strength in [0, 1]

    Returns:
        Depolarized outcome probabilities
    """
    alpha = _check_alpha(alpha)
    if alpha == 0.0:
        return np.asarray(probabilities)
    uniform = observable.multiplicities / observable.dim
    return (1.0 - alpha) * np.asarray(probabilities) + alpha * uniform


@dataclass(frozen=True, eq=False)
class ShotOutcomeSet:
    """Outcomes of N_s independent shots"""

    outcomes: np.ndarray
    """Measured eigenvalue of each shot"""

    @property
    def n_shots(self) -> int:
        """Number of shots N_s"""
        return len(self.outcomes)

    def mean(self) -> float:
        """Empirical mean of the outcomes"""
        return float(np.mean(self.outcomes))


def _normalized(probabilities: np.ndarray) -> np.ndarray:
    probs = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    return probs / probs.sum(axis=-1, keepdims=True)


def _check_shots(n_shots: int) -> int:
    if isinstance(n_shots, float) and not float(n_shots).is_integer():
        raise ValueError(f"Shot count must be an integer, got {n_shots}")
    n_shots = int(n_shots)
    if n_shots < 1:
        raise ValueError(f"Shot count must be at least 1, got {n_shots}")
    return n_shots


def sample_shots(
    state: State, observable: Observable, n_shots: int, stream: RngStream
) -> ShotOutcomeSet:
    """
    Draw i.i.d. measurement outcomes

    Args:
        state: State to measure
        observable: Observable to measure
        n_shots: Number of shots N_s >= 1
        stream: Random stream; the same stream yields the same outcomes

    Returns:
        Outcome set
    """
    n_shots = _check_shots(n_shots)
    probs = _normalized(outcome_distribution(state, observable))
    rng = stream.generator()
    indices = rng.choice(len(probs), size=n_shots, p=probs)
    return ShotOutcomeSet(observable.outcomes[indices])


def sample_counts(
    probabilities: np.ndarray, n_shots: int, stream: RngStream
) -> np.ndarray:
    """
    Multinomial outcome counts for a batch of outcome distributions

    Counts are a sufficient statistic of an i.i.d. outcome set, so every
    moment used downstream is computed from them.

    Args:
        probabilities: Array of shape ``lead + (m,)``
        n_shots: Shots per distribution
        stream: Random stream

    Returns:
        Integer array of shape ``lead + (m,)`` whose last axis sums to n_shots
    """
    n_shots = _check_shots(n_shots)
    probs = _normalized(probabilities)
    return stream.generator().multinomial(n_shots, probs)

"""
Few-qubit statevector and density-matrix simulator
"""

from shotdp.sim.gates import (
    GateKind,
    GateSpec,
    PAULI_ROTATION_FREQUENCY,
    apply_gate,
    apply_single_qubit,
    cnot_permutation,
    rotation_matrices,
)
from shotdp.sim.measurement import (
    ShotOutcomeSet,
    apply_depolarizing,
    depolarize_probabilities,
    expectation,
    outcome_distribution,
    outcome_probabilities,
    sample_counts,
    sample_shots,
    single_shot_variance,
    uniform_variance,
)
from shotdp.sim.observables import EigenBasis, Observable
from shotdp.sim.rng import RngStream
from shotdp.sim.states import MixedState, PureState, basis_state

__all__ = [
    "GateKind",
    "GateSpec",
    "PAULI_ROTATION_FREQUENCY",
    "apply_gate",
    "apply_single_qubit",
    "cnot_permutation",
    "rotation_matrices",
    "ShotOutcomeSet",
    "apply_depolarizing",
    "depolarize_probabilities",
    "expectation",
    "outcome_distribution",
    "outcome_probabilities",
    "sample_counts",
    "sample_shots",
    "single_shot_variance",
    "uniform_variance",
    "EigenBasis",
    "Observable",
    "RngStream",
    "MixedState",
    "PureState",
    "basis_state",
]

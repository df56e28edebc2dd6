"""Tests for circuit module - Encodings, Strongly Entangling Ansatz and Label Readout.

Use Case Description:
This test file validates how classical data becomes circuit input, how the trainable circuit is built and how classes are read out. Key functionalities tested include:

1. **Encoding**: Angle and amplitude encoders
   - Binary pixels map to computational basis states
   - Amplitude inputs are normalized, zero vectors rejected

2. **Ansatz**: Strongly entangling layer stacks
   - Parameter counting and index layout
   - Batched evolution agrees with gate-by-gate simulation
   - Shifted parameter vectors for the parameter-shift rule

3. **Labels**: Per-class projectors and prediction
   - Renormalized class probabilities
   - Ties resolved toward the lowest class
"""

import numpy as np
import pytest

from shotdp.circuit import (
    AnsatzSpec,
    EncoderSpec,
    EncodingScheme,
    LabelObservables,
    TemplateOp,
    check_theta,
    encode,
    encode_batch,
    forward,
    output_states,
    predict,
    predict_batch,
    psr_shifts,
    run_circuit,
    shifted_output_states,
    shifted_states,
    shifted_thetas,
    strongly_entangling_template,
)
from shotdp.circuit.labels import LABEL_MASS_TOL
from shotdp.sim import GateKind, Observable, PureState, RngStream, apply_gate, basis_state


class TestEncoding:
    """Tests for data encoders."""

    def test_angle_encoding_binary(self):
        """Test that binary pixels give basis states, qubit 0 most significant."""
        enc = EncoderSpec(EncodingScheme.ANGLE, n_qubits=4)

        state = encode([1, 0, 0, 0], enc)

        assert np.allclose(state.probabilities()[8], 1.0)

    def test_angle_encoding_half(self):
        """Test that x = 0.5 gives an equal superposition on one qubit."""
        state = encode([0.5], EncoderSpec(EncodingScheme.ANGLE, n_qubits=1))

        assert np.allclose(state.probabilities(), [0.5, 0.5])

    def test_amplitude_encoding(self):
        """Test normalization of amplitude inputs."""
        enc = EncoderSpec(EncodingScheme.AMPLITUDE, n_qubits=2)

        states = encode_batch([[3.0, 0.0, 4.0, 0.0], [1.0, 1.0, 1.0, 1.0]], enc)

        assert np.allclose(states[0], [0.6, 0.0, 0.8, 0.0])
        assert np.allclose(np.abs(states[1]) ** 2, 0.25)

    def test_amplitude_zero_norm_rejected(self):
        """Test that an all-zero amplitude input is rejected."""
        enc = EncoderSpec(EncodingScheme.AMPLITUDE, n_qubits=2)

        with pytest.raises(ValueError):
            encode_batch([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]], enc)

    def test_wrong_input_length(self):
        """Test that inputs of the wrong length are rejected."""
        with pytest.raises(ValueError):
            encode([1, 0, 0], EncoderSpec(EncodingScheme.ANGLE, n_qubits=4))

    def test_for_input_dim(self):
        """Test scheme selection from the input length."""
        assert EncoderSpec.for_input_dim(4, 4).scheme is EncodingScheme.ANGLE
        assert EncoderSpec.for_input_dim(16, 4).scheme is EncodingScheme.AMPLITUDE
        with pytest.raises(ValueError):
            EncoderSpec.for_input_dim(5, 4)

    def test_dict_round_trip(self):
        """Test dictionary conversion of the encoder."""
        enc = EncoderSpec(EncodingScheme.AMPLITUDE, n_qubits=3)

        assert EncoderSpec.from_dict(enc.to_dict()) == enc
        assert enc.input_dim == 8


class TestAnsatz:
    """Tests for the strongly entangling ansatz."""

    def test_parameter_count(self):
        """Test K = 3·n·L."""
        assert AnsatzSpec(4, 1).n_params == 12
        assert AnsatzSpec(4, 2).n_params == 24
        assert AnsatzSpec(3, 1).is_valid()
        assert np.all(AnsatzSpec(4, 1).frequencies == 1.0)

    def test_template_layout(self):
        """Test Euler-angle indices and the CNOT ring."""
        ops = strongly_entangling_template(4, 1)
        rotations = [op for op in ops if op.param is not None]
        cnots = [op for op in ops if op.kind is GateKind.CNOT]

        assert len(ops) == 16
        assert [op.param for op in rotations] == list(range(12))
        assert [op.kind for op in rotations[3:6]] == [
            GateKind.RZ,
            GateKind.RY,
            GateKind.RZ,
        ]
        assert rotations[3].wires == (1,)
        assert [op.wires for op in cnots] == [(0, 1), (1, 2), (2, 3), (3, 0)]

    def test_invalid_template(self):
        """Test validation of custom templates."""
        ansatz = AnsatzSpec.from_operations(
            2,
            [
                TemplateOp(GateKind.RY, (0,), 0),
                TemplateOp(GateKind.RY, (1,), 2),
                TemplateOp(GateKind.CNOT, (0, 1), 1),
            ],
        )

        errors = ansatz.validate()

        assert not ansatz.is_valid()
        assert any("only rotations take parameters" in e for e in errors)

    def test_evolve_matches_gates(self, ansatz, theta):
        """Test the batched evolution against gate-by-gate simulation."""
        x = [1, 0, 1, 1]
        state = encode(x, EncoderSpec(EncodingScheme.ANGLE, 4))
        for gate in ansatz.gates(theta):
            state = apply_gate(state, gate)

        out = run_circuit(x, theta, ansatz)

        assert np.allclose(out.amplitudes, state.amplitudes)

    def test_prepared_input_state(self, ansatz, theta):
        """Test running the circuit on an already prepared state."""
        out_state = run_circuit(basis_state(4, 8), theta, ansatz)
        out_vector = run_circuit([1, 0, 0, 0], theta, ansatz)

        assert np.allclose(out_state.amplitudes, out_vector.amplitudes)
        with pytest.raises(ValueError):
            run_circuit(basis_state(3, 0), theta, ansatz)

    def test_check_theta(self, ansatz):
        """Test parameter vector validation."""
        with pytest.raises(ValueError):
            check_theta(np.zeros(11), ansatz)
        with pytest.raises(ValueError):
            check_theta(np.full(12, np.nan), ansatz)

    def test_shifted_thetas(self, ansatz, theta):
        """Test the (K, 2, K) stack of shifted parameter vectors."""
        shifted = shifted_thetas(theta, psr_shifts(ansatz))

        assert shifted.shape == (12, 2, 12)
        assert np.allclose(shifted[5, 0] - theta, np.eye(12)[5] * np.pi / 2)
        assert np.allclose(shifted[5, 1] - theta, -np.eye(12)[5] * np.pi / 2)

    def test_shifted_states_consistent(self, ansatz, theta):
        """Test single and batched shifted states against each other."""
        x = np.array([0.0, 1.0, 1.0, 0.0])
        batched = shifted_output_states(x[None, :], theta, ansatz)

        plus, minus = shifted_states(x, theta, 7, np.pi / 2, ansatz)

        assert batched.shape == (1, 12, 2, 16)
        assert np.allclose(batched[0, 7, 0], plus.amplitudes)
        assert np.allclose(batched[0, 7, 1], minus.amplitudes)
        with pytest.raises(ValueError):
            shifted_states(x, theta, 12, np.pi / 2, ansatz)

    @pytest.mark.parametrize("n_layers", [1, 2])
    def test_forward_periodic_in_each_parameter(self, labels, n_layers):
        """Test f(θ_k + 2π/Ω_k) = f(θ_k) for every trainable gate."""
        ansatz = AnsatzSpec(4, n_layers)
        rng = RngStream(n_layers).generator()
        observables = [labels.cost(1), Observable.pauli_z(4, 2)]

        for _ in range(5):
            x = rng.random(4)
            theta = rng.uniform(0.0, 2.0 * np.pi, size=ansatz.n_params)
            for observable in observables:
                base = forward(x, theta, ansatz, observable)
                for k, omega in enumerate(ansatz.frequencies):
                    shifted = theta.copy()
                    shifted[k] += 2.0 * np.pi / omega
                    assert forward(x, shifted, ansatz, observable) == pytest.approx(
                        base, abs=1e-9
                    )

    def test_forward_single_frequency(self, ansatz, labels, theta):
        """Test that each θ_k enters as a + b·cos θ_k + c·sin θ_k."""
        x = [0.3, 0.7, 0.1, 0.9]
        cost = labels.cost(0)

        for k in range(ansatz.n_params):
            e = np.eye(ansatz.n_params)[k]
            opposite = forward(x, theta, ansatz, cost) + forward(
                x, theta + np.pi * e, ansatz, cost
            )
            quarter = forward(x, theta + np.pi / 2 * e, ansatz, cost) + forward(
                x, theta - np.pi / 2 * e, ansatz, cost
            )
            assert opposite == pytest.approx(quarter, abs=1e-9)

    def test_output_states_shape(self, ansatz, theta, blobs_data):
        """Test amplitude-encoded batches through the circuit."""
        states = output_states(blobs_data.inputs, theta, ansatz)

        assert states.shape == (blobs_data.size, 16)
        assert np.allclose(np.linalg.norm(states, axis=1), 1.0)


class TestLabels:
    """Tests for label observables and prediction."""

    def test_for_classes(self):
        """Test projectors and costs of each class."""
        labels = LabelObservables.for_classes(4, 3)

        assert len(labels.observables) == 3
        assert labels.observables[2].eigenvalues[2] == 1.0
        assert labels.cost(1).eigenvalues[1] == 0.0
        with pytest.raises(ValueError):
            labels.cost(3)
        with pytest.raises(ValueError):
            LabelObservables.for_classes(2, 5)

    def test_class_probabilities(self, labels):
        """Test renormalization and the uniform fallback."""
        states = np.zeros((2, 16), dtype=complex)
        states[0, 0] = np.sqrt(0.1)
        states[0, 1] = np.sqrt(0.3)
        states[0, 5] = np.sqrt(0.6)
        states[1, 9] = 1.0

        probs = labels.class_probabilities(states)

        assert np.allclose(probs[0], [0.25, 0.75])
        assert np.allclose(probs[1], [0.5, 0.5])

    def test_rounding_residue_is_no_mass(self, labels):
        """Test that label mass at rounding level falls back to the uniform tie."""
        states = np.zeros((2, 16), dtype=complex)
        states[0, 0] = np.sqrt(3.7e-33)
        states[0, 9] = 1.0
        states[1, 1] = 1e-5
        states[1, 9] = 1.0

        probs = labels.class_probabilities(states)

        assert np.allclose(probs[0], [0.5, 0.5])
        assert np.allclose(probs[1], [0.0, 1.0])
        assert LABEL_MASS_TOL < 1e-10

    def test_predict_known_circuits(self, ansatz, labels):
        """Test prediction with all angles zero, where U is the CNOT ring."""
        theta = np.zeros(ansatz.n_params)

        cls0, probs0 = predict([0, 0, 0, 0], theta, ansatz, labels)
        cls1, probs1 = predict([1, 1, 0, 1], theta, ansatz, labels)
        tie, probs_tie = predict([0, 0, 0, 1], theta, ansatz, labels)

        assert cls0 == 0 and np.allclose(probs0, [1.0, 0.0])
        assert cls1 == 1 and np.allclose(probs1, [0.0, 1.0])
        assert tie == 0 and np.allclose(probs_tie, [0.5, 0.5])

    def test_predict_batch_matches_predict(self, ansatz, labels, theta, bars_data):
        """Test batched prediction against single prediction."""
        classes, probs = predict_batch(bars_data.inputs[:5], theta, ansatz, labels)

        for i in range(5):
            cls, p = predict(bars_data.inputs[i], theta, ansatz, labels)
            assert classes[i] == cls
            assert np.allclose(probs[i], p)

    def test_forward_cost(self, ansatz, labels):
        """Test the cost expectation of a correctly classified input."""
        theta = np.zeros(ansatz.n_params)

        assert forward([0, 0, 0, 0], theta, ansatz, labels.cost(0)) == pytest.approx(0.0)
        assert forward([0, 0, 0, 0], theta, ansatz, labels.cost(1)) == pytest.approx(1.0)

    def test_pure_state_probabilities_sum(self, ansatz, theta):
        """Test that run_circuit returns a normalized PureState."""
        out = run_circuit([0.3, 0.2, 0.9, 0.5], theta, ansatz)

        assert isinstance(out, PureState)
        assert out.probabilities().sum() == pytest.approx(1.0)

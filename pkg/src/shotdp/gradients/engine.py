"""
Batched parameter-shift gradient engine
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from shotdp.circuit.ansatz import AnsatzSpec, check_theta, psr_shifts, shifted_thetas
from shotdp.circuit.encoding import EncoderSpec, encode_batch
from shotdp.circuit.labels import LabelObservables
from shotdp.gradients.statistics import MINUS, PLUS, ShotStatistics, sample_moments
from shotdp.sim.measurement import (
    depolarize_probabilities,
    outcome_probabilities,
    sample_counts,
)
from shotdp.sim.observables import Observable
from shotdp.sim.rng import RngStream

logger = logging.getLogger(__name__)

Observables = Union[Observable, Sequence[Observable]]


class GradientEngine:
    """
    Parameter-shift gradients for a whole batch at once

    All 2·K shifted circuits of every sample are simulated in one vectorized
    pass. In sampled mode the positive and negative shifts draw their
    outcome counts from the independent child streams ``stream.child(0)``
    and ``stream.child(1)``; reductions run in (j, k, τ) array order.

    Example:
    >>> from shotdp.circuit import AnsatzSpec, LabelObservables
    >>> from shotdp.gradients import GradientEngine
    >>> from shotdp.sim import RngStream

    >>> engine = GradientEngine(AnsatzSpec(4, 1), alpha=0.1)
    >>> labels = LabelObservables.for_classes(4)
    >>> costs = engine.label_costs(y, labels)
    >>> grads, stats = engine.sampled(engine.encode(X), theta, costs, 1000, RngStream(0))
    """

    def __init__(
        self,
        ansatz: AnsatzSpec,
        enc: Optional[EncoderSpec] = None,
        alpha: float = 0.0,
        chunk_size: int = 256,
    ):
        """
        Initialize the engine

        Args:
            ansatz: Circuit template
            enc: Encoder (inferred from input length when omitted)
            alpha: Global depolarizing strength applied before measurement
            chunk_size: Samples simulated together in full-dataset passes
        """
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"Depolarizing strength alpha must be in [0, 1], got {alpha}")
        if chunk_size < 1:
            raise ValueError(f"Chunk size must be positive, got {chunk_size}")
        self.ansatz = ansatz
        self.enc = enc
        self.alpha = float(alpha)
        self.chunk_size = chunk_size
        self._shifts = psr_shifts(ansatz)
        self._half_omega = ansatz.frequencies / 2.0

    def encode(self, inputs) -> np.ndarray:
        """Encode a batch of inputs to states of shape (B, d)"""
        inputs = np.asarray(inputs, dtype=float)
        enc = self.enc or EncoderSpec.for_input_dim(inputs.shape[1], self.ansatz.n_qubits)
        return encode_batch(inputs, enc)

    @staticmethod
    def label_costs(labels_y, label_obs: LabelObservables) -> List[Observable]:
        """Cost observable I − O_y of every sample"""
        return [label_obs.cost(int(y)) for y in np.asarray(labels_y)]

    def _groups(
        self, observables: Observables, batch_size: int
    ) -> List[Tuple[Observable, np.ndarray]]:
        if isinstance(observables, Observable):
            return [(observables, np.arange(batch_size))]
        if len(observables) != batch_size:
            raise ValueError(
                f"Got {len(observables)} observables for a batch of {batch_size}"
            )
        groups = {}
        for j, observable in enumerate(observables):
            groups.setdefault(id(observable), (observable, []))[1].append(j)
        grouped = [(obs, np.array(idx)) for obs, idx in groups.values()]
        reference = grouped[0][0]
        for observable, _ in grouped[1:]:
            if not observable.same_outcomes(reference):
                raise ValueError("All observables of a batch must share one outcome set")
        return grouped

    def _probabilities(
        self, states: np.ndarray, thetas: np.ndarray, observables: Observables
    ) -> Tuple[np.ndarray, np.ndarray]:
        states = np.asarray(states)
        if states.ndim != 2 or states.shape[1] != self.ansatz.dim:
            raise ValueError(
                f"Expected input states of shape (B, {self.ansatz.dim}), got {states.shape}"
            )
        groups = self._groups(observables, len(states))
        lead = (len(states),) + (1,) * (thetas.ndim - 1)
        outputs = self.ansatz.evolve(states.reshape(lead + (-1,)), thetas[None])

        outcomes = groups[0][0].outcomes
        probs = np.empty(outputs.shape[:-1] + (len(outcomes),))
        for observable, idx in groups:
            p = outcome_probabilities(outputs[idx], observable)
            probs[idx] = depolarize_probabilities(p, observable, self.alpha)
        return probs, outcomes

    def shifted_probabilities(
        self, states: np.ndarray, theta, observables: Observables
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Outcome distributions of every shifted circuit

        Args:
            states: Input states of shape (B, d)
            theta: Parameter vector
            observables: One observable, or one per sample

        Returns:
            (probabilities of shape (B, K, 2, m), outcome values of length m)
        """
        theta = check_theta(theta, self.ansatz)
        return self._probabilities(states, shifted_thetas(theta, self._shifts), observables)

    def expected_values(
        self, states: np.ndarray, theta, observables: Observables
    ) -> np.ndarray:
        """Exact (depolarized) expectation of each sample's observable, shape (B,)"""
        theta = check_theta(theta, self.ansatz)
        probs, outcomes = self._probabilities(states, theta, observables)
        return probs @ outcomes

    def analytic(
        self, states: np.ndarray, theta, observables: Observables
    ) -> np.ndarray:
        """
        Exact per-sample gradients g_k = (Ω_k/2)(f(θ_k + s_k) − f(θ_k − s_k))

        Returns:
            Array of shape (B, K)
        """
        probs, outcomes = self.shifted_probabilities(states, theta, observables)
        values = probs @ outcomes
        return self._half_omega * (values[..., PLUS] - values[..., MINUS])

    def sampled(
        self,
        states: np.ndarray,
        theta,
        observables: Observables,
        n_shots: int,
        stream: RngStream,
    ) -> Tuple[np.ndarray, ShotStatistics]:
        """
        Finite-shot per-sample gradients and their shot statistics

        Args:
            states: Input states of shape (B, d)
            theta: Parameter vector
            observables: One observable, or one per sample
            n_shots: Shots per shifted circuit, at least 2
            stream: Random stream of this evaluation

        Returns:
            (gradients of shape (B, K), statistics over (B, K, 2))
        """
        if not np.isfinite(n_shots) or int(n_shots) < 2:
            raise ValueError(f"Sampled gradients need a finite N_s >= 2, got {n_shots}")
        n_shots = int(n_shots)
        probs, outcomes = self.shifted_probabilities(states, theta, observables)

        counts = np.stack(
            [
                sample_counts(probs[..., PLUS, :], n_shots, stream.child(PLUS)),
                sample_counts(probs[..., MINUS, :], n_shots, stream.child(MINUS)),
            ],
            axis=-2,
        )
        mean, variance, fourth = sample_moments(counts, outcomes)
        grads = self._half_omega * (mean[..., PLUS] - mean[..., MINUS])
        return grads, ShotStatistics(mean, variance, fourth, n_shots)

    def gradients(
        self,
        states: np.ndarray,
        theta,
        observables: Observables,
        n_shots: float,
        stream: RngStream,
    ) -> Tuple[np.ndarray, Optional[ShotStatistics]]:
        """Analytic gradients for N_s = ∞, sampled ones otherwise"""
        if np.isinf(n_shots):
            return self.analytic(states, theta, observables), None
        return self.sampled(states, theta, observables, n_shots, stream)

    def full_gradient(
        self, inputs, labels_y, theta, label_obs: LabelObservables
    ) -> np.ndarray:
        """
        Exact gradient of the mean cost over a whole dataset

        Args:
            inputs: Dataset inputs of shape (N, input_dim)
            labels_y: Integer labels of length N
            theta: Parameter vector
            label_obs: Label observables

        Returns:
            Gradient vector of length K
        """
        inputs = np.asarray(inputs, dtype=float)
        labels_y = np.asarray(labels_y)
        total = np.zeros(self.ansatz.n_params)
        for start in range(0, len(inputs), self.chunk_size):
            stop = start + self.chunk_size
            states = self.encode(inputs[start:stop])
            costs = self.label_costs(labels_y[start:stop], label_obs)
            total += self.analytic(states, theta, costs).sum(axis=0)
        logger.debug(f"Computed exact gradient over {len(inputs)} samples")
        return total / len(inputs)

"""Tests for gradients module - Parameter-Shift Gradients and Shot Statistics.

Use Case Description:
This test file validates the per-sample gradients that private training perturbs. Key functionalities tested include:

1. **Parameter-Shift Rule**: Exact gradients of circuit expectations
   - Agreement with finite differences
   - Scaling under global depolarizing noise

2. **Sensitivity**: Analytic bound on every per-sample gradient
   - Per-coordinate bound (λ_max − λ_min)·Ω/2
   - ℓ2 bound Δ, for exact and finite-shot gradients

3. **Finite Shots**: Sampled gradients and their statistics
   - Reproducibility from keyed streams
   - Unbiasedness at few shots and convergence to the exact gradient
   - Sample moments and the batch variance estimate's coverage

4. **Error Bound**: MSE of the noisy batch gradient over batch sizes, shots and noise levels
"""

import math

import numpy as np
import pytest

from shotdp.circuit import AnsatzSpec, LabelObservables, forward, psr_shifts
from shotdp.gradients import (
    GradientEngine,
    GradientMode,
    ShotStatistics,
    moments_from_outcomes,
    mse_bound,
    psr_gradient_analytic,
    psr_gradient_sampled,
    sample_moments,
    sensitivity_bound,
)
from shotdp.data import gen_bars_stripes
from shotdp.privacy import (
    NoiseCalibration,
    PrivacyBudget,
    batch_variance_estimator,
    z_critical,
)
from shotdp.sim import Observable, RngStream
from shotdp.training import privatize_gradient, sample_batch


def random_thetas(n, n_params, seed=0):
    return RngStream(seed).generator().uniform(0.0, 2.0 * np.pi, size=(n, n_params))


class TestParameterShift:
    """Tests for exact parameter-shift gradients."""

    @pytest.mark.parametrize("n_layers, n_points", [(1, 50), (2, 10)])
    def test_matches_finite_differences(self, labels, n_layers, n_points):
        """Test PSR gradients against central finite differences at random (x, θ)."""
        ansatz = AnsatzSpec(n_qubits=4, n_layers=n_layers)
        rng = RngStream(1).generator()
        cost = labels.cost(1)
        h = 1e-5

        for theta in random_thetas(n_points, ansatz.n_params, seed=n_layers):
            x = rng.random(4)
            g = psr_gradient_analytic(x, theta, ansatz, cost).g
            fd = np.zeros(ansatz.n_params)
            for k in range(ansatz.n_params):
                e = np.zeros(ansatz.n_params)
                e[k] = h
                fd[k] = (
                    forward(x, theta + e, ansatz, cost) - forward(x, theta - e, ansatz, cost)
                ) / (2 * h)
            assert np.max(np.abs(g - fd)) < 1e-6

    def test_non_diagonal_observable(self, theta, ansatz):
        """Test PSR on an observable measured in a rotated basis."""
        x_matrix = np.array([[0.0, 1.0], [1.0, 0.0]])
        obs = Observable.from_matrix(np.kron(x_matrix, np.eye(8)))
        x = [0.2, 0.4, 0.6, 0.8]
        h = 1e-5

        g = psr_gradient_analytic(x, theta, ansatz, obs).g
        e = np.zeros(ansatz.n_params)
        e[4] = h
        fd = (forward(x, theta + e, ansatz, obs) - forward(x, theta - e, ansatz, obs)) / (
            2 * h
        )

        assert g[4] == pytest.approx(fd, abs=1e-6)

    def test_depolarizing_scales_gradient(self, ansatz, labels, theta):
        """Test that global depolarizing scales the exact gradient by 1 − α."""
        x = [1, 0, 0, 1]
        clean = psr_gradient_analytic(x, theta, ansatz, labels.cost(0)).g
        noisy = psr_gradient_analytic(x, theta, ansatz, labels.cost(0), alpha=0.2).g

        assert np.allclose(noisy, 0.8 * clean)

    def test_estimate_fields(self, ansatz, labels, theta):
        """Test the analytic GradientEstimate."""
        estimate = psr_gradient_analytic([0, 1, 0, 1], theta, ansatz, labels.cost(0))

        assert estimate.mode is GradientMode.ANALYTIC
        assert math.isinf(estimate.n_shots)
        assert estimate.norm == pytest.approx(np.linalg.norm(estimate.g))
        assert len(estimate.g) == 12

    def test_engine_matches_single(self, ansatz, labels, theta, bars_data):
        """Test batched engine gradients against per-sample gradients."""
        engine = GradientEngine(ansatz, alpha=0.1)
        batch = bars_data.subset(range(6))
        costs = engine.label_costs(batch.labels, labels)

        grads = engine.analytic(engine.encode(batch.inputs), theta, costs)

        for j in range(6):
            single = psr_gradient_analytic(
                batch.inputs[j], theta, ansatz, costs[j], alpha=0.1
            ).g
            assert np.allclose(grads[j], single)

    def test_full_gradient(self, ansatz, labels, theta, bars_data):
        """Test the exact dataset gradient against the mean of per-sample gradients."""
        engine = GradientEngine(ansatz, chunk_size=10)
        costs = engine.label_costs(bars_data.labels, labels)
        per_sample = engine.analytic(engine.encode(bars_data.inputs), theta, costs)

        full = engine.full_gradient(bars_data.inputs, bars_data.labels, theta, labels)

        assert np.allclose(full, per_sample.mean(axis=0))

    def test_mixed_outcome_sets_rejected(self, ansatz, theta, bars_data):
        """Test that one batch cannot mix outcome alphabets."""
        engine = GradientEngine(ansatz)
        states = engine.encode(bars_data.inputs[:2])
        observables = [Observable.pauli_z(4, 0), Observable.projector(4, 0)]

        with pytest.raises(ValueError):
            engine.analytic(states, theta, observables)


class TestSensitivity:
    """Tests for the analytic sensitivity bound."""

    def test_bound_value(self):
        """Test Δ = (range/2)·√(ΣΩ²)."""
        assert sensitivity_bound(0.0, 1.0, np.ones(12)) == pytest.approx(0.5 * np.sqrt(12))
        assert sensitivity_bound(-1.0, 1.0, [1.0, 2.0]) == pytest.approx(np.sqrt(5))

    def test_bound_invalid(self):
        """Test rejected inputs."""
        with pytest.raises(ValueError):
            sensitivity_bound(1.0, 0.0, [1.0])
        with pytest.raises(ValueError):
            sensitivity_bound(0.0, 1.0, [])
        with pytest.raises(ValueError):
            sensitivity_bound(0.0, 1.0, [1.0, 0.0])

    def test_gradients_within_bound(self, ansatz, labels):
        """Test value range, |g_k| ≤ range·Ω/2 and ‖g‖ ≤ Δ over 500 random circuits."""
        rng = RngStream(4).generator()
        engine = GradientEngine(ansatz)
        observables = [labels.cost(0), Observable.pauli_z(4, 2)]

        for observable in observables:
            delta = sensitivity_bound(
                observable.lambda_min, observable.lambda_max, ansatz.frequencies
            )
            per_coordinate = observable.lambda_range / 2.0
            for theta in random_thetas(50, ansatz.n_params, seed=5):
                states = engine.encode(rng.random((10, 4)))
                values = engine.expected_values(states, theta, observable)
                g = engine.analytic(states, theta, observable)
                assert np.all(values >= observable.lambda_min - 1e-12)
                assert np.all(values <= observable.lambda_max + 1e-12)
                assert np.all(np.abs(g) <= per_coordinate + 1e-12)
                assert np.all(np.linalg.norm(g, axis=1) <= delta + 1e-12)

    def test_sampled_gradients_within_bound(self, ansatz, labels):
        """Test that two-shot gradients obey the same bound over 500 random circuits."""
        rng = RngStream(9).generator()
        engine = GradientEngine(ansatz, alpha=0.1)
        delta = sensitivity_bound(0.0, 1.0, ansatz.frequencies)
        root = RngStream(8)

        for t, theta in enumerate(random_thetas(50, ansatz.n_params, seed=6)):
            states = engine.encode(rng.random((10, 4)))
            costs = engine.label_costs(rng.integers(0, 2, size=10), labels)
            grads, stats = engine.sampled(states, theta, costs, 2, root.child(t))
            assert stats.n_shots == 2
            assert np.all(np.abs(grads) <= 0.5 + 1e-12)
            assert np.all(np.linalg.norm(grads, axis=1) <= delta + 1e-12)

class TestSampledGradients:
    """Tests for finite-shot gradients."""

    def test_reproducible(self, ansatz, labels, theta):
        """Test that the same stream gives the same sampled gradient."""
        x = [0, 1, 1, 0]
        first, stats = psr_gradient_sampled(
            x, theta, ansatz, labels.cost(0), 100, 0.1, RngStream(2)
        )
        second, _ = psr_gradient_sampled(
            x, theta, ansatz, labels.cost(0), 100, 0.1, RngStream(2)
        )
        other, _ = psr_gradient_sampled(
            x, theta, ansatz, labels.cost(0), 100, 0.1, RngStream(3)
        )

        assert first.mode is GradientMode.SAMPLED
        assert first.n_shots == 100
        assert np.array_equal(first.g, second.g)
        assert not np.array_equal(first.g, other.g)
        assert stats.mean.shape == (12, 2)

    def test_converges_to_analytic(self, ansatz, labels, theta):
        """Test that many shots approach the exact gradient."""
        x = [1, 1, 0, 0]
        exact = psr_gradient_analytic(x, theta, ansatz, labels.cost(1), alpha=0.1).g

        sampled, _ = psr_gradient_sampled(
            x, theta, ansatz, labels.cost(1), 100000, 0.1, RngStream(6)
        )

        assert np.max(np.abs(sampled.g - exact)) < 0.01

    @pytest.mark.slow
    def test_unbiased_at_few_shots(self, ansatz, labels, theta):
        """Test E[sampled gradient] = exact gradient with a z-test over 10⁴ four-shot repeats."""
        engine = GradientEngine(ansatz, alpha=0.1)
        cost = labels.cost(1)
        state = engine.encode([[0.2, 0.9, 0.4, 0.6]])
        exact = engine.analytic(state, theta, cost)[0]
        repeats = 10000

        grads, _ = engine.sampled(
            np.repeat(state, repeats, axis=0), theta, cost, 4, RngStream(13)
        )
        standard_error = grads.std(axis=0, ddof=1) / math.sqrt(repeats)

        assert np.all(standard_error > 0.0)
        z = (grads.mean(axis=0) - exact) / standard_error
        assert np.all(np.abs(z) < 4.0)

    def test_needs_finite_shots(self, ansatz, labels, theta):
        """Test that sampled gradients reject N_s < 2 and N_s = ∞."""
        for n_shots in (1, math.inf):
            with pytest.raises(ValueError):
                psr_gradient_sampled(
                    [0, 0, 0, 0], theta, ansatz, labels.cost(0), n_shots, 0.0, RngStream(0)
                )

    def test_engine_dispatch(self, ansatz, labels, theta, bars_data):
        """Test analytic dispatch for N_s = ∞ and sampled statistics otherwise."""
        engine = GradientEngine(ansatz)
        batch = bars_data.subset(range(4))
        states = engine.encode(batch.inputs)
        costs = engine.label_costs(batch.labels, labels)

        exact, none = engine.gradients(states, theta, costs, math.inf, RngStream(0))
        sampled, stats = engine.gradients(states, theta, costs, 50, RngStream(0))

        assert none is None
        assert exact.shape == sampled.shape == (4, 12)
        assert stats.variance.shape == (4, 12, 2)
        assert stats.n_shots == 50
        assert stats.n_groups == 96


class TestShotStatistics:
    """Tests for sample moments of outcome sets."""

    def test_sample_moments_values(self):
        """Test moments of the outcome set {0, 0, 0, 1}."""
        mean, variance, fourth = sample_moments(np.array([[3, 1]]), np.array([0.0, 1.0]))

        assert mean[0] == pytest.approx(0.25)
        assert variance[0] == pytest.approx(0.25)
        assert fourth[0] == pytest.approx(0.08203125)

    def test_counts_match_outcomes(self):
        """Test that counts and raw outcomes give identical moments."""
        rng = RngStream(7).generator()
        outcomes = np.array([0.0, 1.0, 3.0])
        samples = rng.choice(outcomes, size=(4, 25))
        counts = np.stack([(samples == o).sum(axis=-1) for o in outcomes], axis=-1)

        from_counts = sample_moments(counts, outcomes)
        from_samples = moments_from_outcomes(samples)

        for a, b in zip(from_counts, from_samples):
            assert np.allclose(a, b)

    def test_constant_group(self):
        """Test that a constant outcome set has zero variance."""
        stats = ShotStatistics.from_outcomes(np.ones((2, 10)))

        assert np.all(stats.variance == 0.0)
        assert np.all(stats.fourth_moment == 0.0)
        assert stats.n_shots == 10

    def test_invalid_statistics(self):
        """Test rejected statistics."""
        with pytest.raises(ValueError):
            sample_moments(np.array([[1, 0]]), np.array([0.0, 1.0]))
        with pytest.raises(ValueError):
            ShotStatistics(np.zeros(2), np.zeros(3), np.zeros(2), 10)

    @pytest.mark.slow
    def test_variance_estimate_coverage(self, ansatz, labels, bars_data, theta):
        """Test that η̂²_B stays below the true total variance with rate about 1 − β."""
        beta = 0.05
        n_shots = 100
        engine = GradientEngine(ansatz, alpha=0.1)
        batch = bars_data.subset(range(4))
        states = engine.encode(batch.inputs)
        costs = engine.label_costs(batch.labels, labels)
        probs, outcomes = engine.shifted_probabilities(states, theta, costs)
        true_total = float(np.sum(probs @ outcomes**2 - (probs @ outcomes) ** 2))
        z_beta = z_critical(beta)

        trials = 300
        covered = 0
        for t in range(trials):
            _, stats = engine.sampled(states, theta, costs, n_shots, RngStream(t))
            if batch_variance_estimator(stats, z_beta) <= true_total:
                covered += 1

        assert covered / trials >= 1.0 - beta - 0.05


class TestMseBound:
    """Tests for the MSE bound of the noisy batch gradient."""

    def test_formula(self):
        """Test the bound's closed form."""
        bound = mse_bound(delta=2.0, B=4, n_shots=10, K=3, sigma2=0.5)

        assert bound == pytest.approx(1.0 * (1 + 1 / 20) + 3 * 0.5 * 4.0 / 16)
        assert mse_bound(2.0, 4, math.inf, 3, 0.0) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            mse_bound(2.0, 0, 10, 3, 0.5)

    @pytest.mark.slow
    @pytest.mark.parametrize("calibrated", [False, True])
    @pytest.mark.parametrize("n_shots", [100, 10000, math.inf])
    @pytest.mark.parametrize("B", [64, 512])
    def test_empirical_mse_below_bound(self, ansatz, labels, theta, B, n_shots, calibrated):
        """Test the bound against the empirical MSE of 1000 noisy mini-batch gradients."""
        data = gen_bars_stripes(1000, RngStream(20))
        engine = GradientEngine(ansatz)
        delta = sensitivity_bound(0.0, 1.0, ansatz.frequencies)
        sigma2 = 0.0
        if calibrated:
            budget = PrivacyBudget(epsilon=1.0, delta=1e-3).for_schedule(
                q=B / data.size, T=30
            )
            sigma2 = NoiseCalibration.build(
                budget, ansatz, labels.costs[0], n_shots, B
            ).sigma2
        full = engine.full_gradient(data.inputs, data.labels, theta, labels)
        root = RngStream(21)

        repeats = 1000
        errors = np.empty(repeats)
        for t in range(repeats):
            batch = data.subset(sample_batch(data.size, B, root.child(t, 0)))
            states = engine.encode(batch.inputs)
            costs = engine.label_costs(batch.labels, labels)
            grads, _ = engine.gradients(states, theta, costs, n_shots, root.child(t, 1))
            g_tilde, _ = privatize_gradient(grads, sigma2, delta, root.child(t, 2))
            errors[t] = np.sum((g_tilde - full) ** 2)

        standard_error = errors.std(ddof=1) / math.sqrt(repeats)
        bound = mse_bound(delta, B, n_shots, ansatz.n_params, sigma2)
        assert errors.mean() <= bound + 3.0 * standard_error

    def test_psr_shift_is_quarter_period(self, ansatz):
        """Test the shift π/(2Ω) for unit frequencies."""
        assert np.allclose(psr_shifts(ansatz), np.pi / 2)


def test_label_costs_share_objects():
    """Test that label costs reuse one observable per class."""
    labels = LabelObservables.for_classes(4, 2)
    costs = GradientEngine.label_costs([0, 1, 0], labels)

    assert costs[0] is costs[2]
    assert costs[0] is not costs[1]

import numpy as np
import pytest

from swarm_spsa.objective import Bounds, Objective, make_objective
from swarm_spsa.spsa import (
    SpsaParams,
    estimate_gradient,
    estimate_gradient_many,
    gains,
    run_spsa,
    sample_perturbation,
    spsa_step,
    validate_params,
)
from swarm_spsa.swarm import Termination


def quadratic_1d(a=1.0, b=0.0, c=0.0, bounds=Bounds(-1e6, 1e6)):
    """Noiseless 1-D objective a*t^2 + b*t + c."""
    return Objective(lambda x: a * x[..., 0] ** 2 + b * x[..., 0] + c, 1, bounds)


class _ForcedDelta:
    """Stand-in rng whose integers() yields a fixed +-1 pattern."""

    def __init__(self, signs):
        self.signs = np.asarray(signs)

    def integers(self, low, high, size):
        return ((self.signs.reshape(size) + 1) // 2).astype(int)


class TestGains:
    def test_first_step_size(self):
        params = SpsaParams(a=1.0, c=1.0, A=200.0, alpha=0.602)
        a0, c0 = gains(0, params)
        # 1 / 201^0.602, frozen by direct evaluation
        assert a0 == pytest.approx(0.04106539205511063, abs=1e-12)
        assert c0 == 1.0

    def test_monotone_decay(self):
        params = SpsaParams(a=2.0, c=3.0)
        a0, c0 = gains(0, params)
        a6, c6 = gains(10**6, params)
        assert 0 < a6 < a0
        assert 0 < c6 < c0

    def test_decay_toward_zero(self):
        params = SpsaParams(a=1.0, c=1.0)
        a0, c0 = gains(0, params)
        ak, ck = gains(10**9, params)
        assert ak < 1e-2 * a0
        # c decays much more slowly: 1e9^0.101 ~= 8.1
        assert ck < 0.13 * c0


class TestValidateParams:
    def test_recommended_defaults_ok(self):
        assert validate_params(SpsaParams(a=1.0, c=1.0)) == []

    def test_alpha_versus_gamma(self):
        violations = validate_params(SpsaParams(a=1.0, c=1.0, alpha=0.2, gamma=0.101))
        assert any("2*gamma" in v for v in violations)

    def test_zero_c(self):
        violations = validate_params(SpsaParams(a=1.0, c=0.0))
        assert any("c must be positive" in v for v in violations)

    def test_collects_all_violations(self):
        violations = validate_params(SpsaParams(a=0.0, c=0.0, alpha=1.5, gamma=0.9))
        assert len(violations) >= 3


class TestPerturbation:
    def test_support(self):
        rng = np.random.default_rng(0)
        delta = sample_perturbation(50, rng)
        assert set(np.unique(delta)) <= {-1.0, 1.0}

    def test_zero_mean(self):
        rng = np.random.default_rng(1)
        draws = sample_perturbation(1, rng, count=100_000)
        assert abs(draws.mean()) < 0.02

    def test_deterministic(self):
        a = sample_perturbation(10, np.random.default_rng(4))
        b = sample_perturbation(10, np.random.default_rng(4))
        assert np.array_equal(a, b)


class TestGradientEstimate:
    def test_exact_on_quadratic(self):
        obj = quadratic_1d()
        g = estimate_gradient(obj, np.array([1.0]), 0.1, np.array([1.0]))
        assert g[0] == pytest.approx(2.0, abs=1e-12)

    def test_zero_at_symmetric_point(self):
        obj = make_objective("sphere", 4)
        g = estimate_gradient(obj, np.zeros(4), 0.5, np.array([1.0, -1.0, 1.0, -1.0]))
        assert np.array_equal(g, np.zeros(4))

    def test_linear_function_negative_delta(self):
        obj = Objective(lambda x: 3.0 * x[..., 0], 1, Bounds(-10, 10))
        g = estimate_gradient(obj, np.array([0.0]), 0.5, np.array([-1.0]))
        assert g[0] == pytest.approx(3.0, abs=1e-12)

    def test_two_measurements_any_dimension(self):
        for d in (1, 5, 40):
            obj = make_objective("sphere", d)
            estimate_gradient(obj, np.zeros(d), 0.1, sample_perturbation(d, np.random.default_rng(0)))
            assert obj.eval_count == 2

    def test_zero_ck_rejected(self):
        obj = make_objective("sphere", 2)
        with pytest.raises(ValueError):
            estimate_gradient(obj, np.zeros(2), 0.0, np.ones(2))

    def test_exactness_property_random_quadratics(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            a, b, c = rng.uniform(0.1, 5.0), rng.uniform(-3, 3), rng.uniform(-3, 3)
            obj = quadratic_1d(a, b, c)
            theta = rng.uniform(-10, 10, size=1)
            ck = rng.uniform(0.01, 1.0)
            delta = np.array([1.0 if rng.uniform() < 0.5 else -1.0])
            g = estimate_gradient(obj, theta, ck, delta)
            assert g[0] == pytest.approx(2 * a * theta[0] + b, abs=1e-9)

    def test_unbiased_on_sphere(self):
        # average of 10^4 estimates at (1,...,1) vs analytic gradient (2,...,2)
        obj = make_objective("sphere", 5)
        rng = np.random.default_rng(7)
        n = 10_000
        thetas = np.tile(np.ones(5), (n, 1))
        deltas = sample_perturbation(5, rng, count=n)
        estimates = estimate_gradient_many(obj, thetas, 0.01, deltas)
        assert np.all(np.abs(estimates.mean(axis=0) - 2.0) < 0.1)
        assert obj.eval_count == 2 * n

    def test_batch_matches_scalar(self):
        obj_a = make_objective("rastrigin", 3)
        obj_b = make_objective("rastrigin", 3)
        thetas = np.array([[0.3, -0.7, 1.1], [2.0, 0.0, -1.0]])
        deltas = np.array([[1.0, -1.0, 1.0], [-1.0, -1.0, 1.0]])
        batch = estimate_gradient_many(obj_a, thetas, 0.2, deltas)
        scalar = np.vstack([estimate_gradient(obj_b, t, 0.2, d) for t, d in zip(thetas, deltas)])
        assert np.allclose(batch, scalar, rtol=0, atol=0)


class TestStep:
    def test_zero_gradient_keeps_theta(self):
        obj = make_objective("sphere", 2)
        params = SpsaParams(a=1.0, c=1.0)
        theta = spsa_step(np.zeros(2), 0, params, obj, np.random.default_rng(0))
        assert np.array_equal(theta, np.zeros(2))

    def test_composed_example(self):
        # 1-D t^2 at theta=1 with a_0=0.25, c_0=0.1, delta=+1: ghat=2, step to 0.5
        obj = quadratic_1d()
        params = SpsaParams(a=0.25, c=0.1, A=0.0)
        theta = spsa_step(np.array([1.0]), 0, params, obj, _ForcedDelta([1.0]))
        assert theta[0] == pytest.approx(0.5, abs=1e-12)

    def test_clamped_to_bounds(self):
        obj = Objective(lambda x: 1000.0 * x[..., 0], 1, Bounds(-1.0, 1.0))
        params = SpsaParams(a=100.0, c=0.1, A=0.0)
        theta = spsa_step(np.array([0.9]), 0, params, obj, _ForcedDelta([1.0]))
        assert -1.0 <= theta[0] <= 1.0


class TestRun:
    def test_zero_steps_returns_start(self):
        obj = make_objective("sphere", 3)
        params = SpsaParams(a=1.0, c=1.0, steps=0)
        theta0 = np.array([1.0, 2.0, 3.0])
        record = run_spsa(theta0, params, obj, np.random.default_rng(0))
        assert np.array_equal(record.final_position, theta0)
        assert record.trace == []
        assert record.terminated_by is Termination.MAX_ITER

    def test_eval_accounting(self):
        obj = make_objective("sphere", 3)
        params = SpsaParams(a=0.001, c=1.0, steps=25)
        run_spsa(np.full(3, 100.0), params, obj, np.random.default_rng(0), cutoff_error=0.0)
        assert obj.eval_count == 2 * 25

    def test_deterministic(self):
        records = []
        for _ in range(2):
            obj = make_objective("sphere", 4)
            params = SpsaParams(a=0.5, c=1.0, steps=50)
            records.append(run_spsa(np.full(4, 10.0), params, obj, np.random.default_rng(11)))
        assert records[0].trace == records[1].trace
        assert np.array_equal(records[0].final_position, records[1].final_position)

    def test_start_outside_bounds_rejected(self):
        obj = make_objective("rosenbrock", 2)
        params = SpsaParams(a=1.0, c=1.0, steps=5)
        with pytest.raises(ValueError):
            run_spsa(np.array([100.0, 0.0]), params, obj, np.random.default_rng(0))

    def test_invalid_params_rejected(self):
        obj = make_objective("sphere", 2)
        with pytest.raises(ValueError, match="invalid SPSA parameters"):
            run_spsa(np.zeros(2), SpsaParams(a=-1.0, c=1.0), obj, np.random.default_rng(0))

    def test_sphere_convergence_20_seeds(self):
        # frozen by calibration runs: every seed reaches 1e-2 within 5000 steps
        hits = 0
        for i in range(20):
            alg, noise = np.random.SeedSequence(42 + i).spawn(2)
            obj = make_objective("sphere", 10, noise_rng=np.random.default_rng(noise))
            params = SpsaParams(a=10.0, c=1.0, A=200.0, steps=5000)
            record = run_spsa(np.full(10, 50.0), params, obj,
                              np.random.default_rng(alg), cutoff_error=1e-2)
            hits += record.final_true_fitness <= 1e-2
        assert hits >= 18

    def test_best_so_far_trace_non_increasing(self):
        obj = make_objective("rastrigin", 5)
        params = SpsaParams(a=2.4, c=1.0, steps=300)
        record = run_spsa(np.full(5, 80.0), params, obj, np.random.default_rng(3), cutoff_error=0.0)
        best = [row[1] for row in record.trace]
        assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))

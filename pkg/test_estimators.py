"""
Tests for the gradient providers
"""
import numpy as np
import pytest

from models.constraint import Constraint, ConstraintKind
from models.formula import HybridFormula, WeightedConstraint, WeightRule
from models.ising import Relaxation, SpinState
from models.run_config import GradientKind, GradientProvider, MoreauParams
from modules.estimators import DivergenceError, batch_gradient, gradient, moreau_gradient, two_point_gradient
from modules.hamiltonian import objective_gradient, objective_values, relaxed_gradient
from modules.model_builder import to_model


def xor_pair_model():
    c = Constraint.from_dimacs(ConstraintKind.XOR, [1, 2])
    return to_model(HybridFormula(n=2, constraints=[WeightedConstraint(constraint=c)]), WeightRule.UNIT)


def quadratic(points):
    return 0.5 * (np.asarray(points) ** 2).sum(axis=-1)


class TestTwoPoint:
    def test_bilinear_objective_is_exact(self):
        m = xor_pair_model()
        a = np.array([0.3, -0.7])
        estimate = two_point_gradient(lambda x: objective_values(m, x, Relaxation.TYPE_I), a, 1e-3)
        np.testing.assert_allclose(estimate, [-0.7, 0.3], atol=1e-9)

    def test_single_batched_call_with_n_plus_one_points(self):
        shapes = []

        def recording(points):
            shapes.append(np.shape(points))
            return quadratic(points)

        two_point_gradient(recording, np.zeros(5), 1e-3)
        assert shapes == [(6, 5)]

    def test_error_halves_with_the_step(self):
        m = xor_pair_model()
        a = np.array([0.3, -0.7])
        exact = objective_gradient(m, a, Relaxation.TYPE_II)

        def error(delta):
            estimate = two_point_gradient(lambda x: objective_values(m, x, Relaxation.TYPE_II), a, delta)
            return np.abs(estimate - exact)

        ratio = error(1e-3) / error(5e-4)
        assert np.all((ratio >= 1.8) & (ratio <= 2.2))

    def test_rows_are_independent_points(self):
        rows = np.array([[0.3, -0.7], [0.0, 0.5], [-0.2, 0.1]])
        batched = two_point_gradient(quadratic, rows, 1e-4)
        assert batched.shape == (3, 2)
        for row, g in zip(rows, batched):
            np.testing.assert_array_equal(g, two_point_gradient(quadratic, row, 1e-4))

    def test_non_finite_objective(self):
        with pytest.raises(DivergenceError):
            two_point_gradient(lambda x: np.full(np.shape(x)[:-1], np.inf), np.zeros(3), 1e-3)


class TestMoreau:
    def test_quadratic_envelope_gradient(self):
        # prox of |b|^2/2 with parameter t is a/(1+t), so the envelope gradient is a/(1+t)
        params = MoreauParams(t=1.0, alpha=1.0, delta=1.0, samples=20000)
        a = np.array([0.5, -0.3])
        estimate = moreau_gradient(quadratic, a, params, np.random.default_rng(0))
        np.testing.assert_allclose(estimate, a / 2.0, atol=0.05)

    def test_shift_invariance(self):
        params = MoreauParams(samples=500)
        a = np.array([0.2, 0.4, -0.1])
        base = moreau_gradient(quadratic, a, params, np.random.default_rng(9))
        shifted = moreau_gradient(lambda x: quadratic(x) + 1e3, a, params, np.random.default_rng(9))
        np.testing.assert_allclose(base, shifted, atol=1e-9)

    def test_same_seed_same_estimate(self):
        params = MoreauParams(samples=200)
        a = np.array([0.1, -0.6])
        first = moreau_gradient(quadratic, a, params, np.random.default_rng(3))
        second = moreau_gradient(quadratic, a, params, np.random.default_rng(3))
        np.testing.assert_array_equal(first, second)

    def test_variance(self):
        assert MoreauParams(t=2.0, alpha=4.0, delta=0.5).variance == pytest.approx(0.25)

    def test_rows_use_their_own_streams(self):
        params = MoreauParams(samples=300)
        rows = np.array([[0.2, -0.4], [0.7, 0.1]])
        batched = moreau_gradient(quadratic, rows, params, [np.random.default_rng(4), np.random.default_rng(5)])
        second = moreau_gradient(quadratic, rows[1], params, np.random.default_rng(5))
        np.testing.assert_allclose(batched[1], second, atol=1e-12)
        with pytest.raises(ValueError):
            moreau_gradient(quadratic, rows, params, [np.random.default_rng(4)])

    def test_non_finite_samples(self):
        with pytest.raises(DivergenceError):
            moreau_gradient(lambda x: np.full(np.shape(x)[:-1], np.nan), np.zeros(2), MoreauParams(samples=10),
                            np.random.default_rng(0))


class TestGradientDispatch:
    def test_exact(self):
        m = xor_pair_model()
        s = SpinState(a=[0.3, -0.7], relaxation=Relaxation.TYPE_II)
        np.testing.assert_allclose(gradient(GradientProvider(), m, s), relaxed_gradient(m, s), rtol=1e-15, atol=0)

    @pytest.mark.parametrize("relaxation", list(Relaxation))
    def test_two_point_tracks_exact(self, relaxation):
        m = xor_pair_model()
        s = SpinState(a=[0.3, -0.7], relaxation=relaxation)
        gp = GradientProvider(kind=GradientKind.TWO_POINT, two_point_delta=1e-6)
        np.testing.assert_allclose(gradient(gp, m, s), relaxed_gradient(m, s), atol=1e-4)

    def test_moreau_needs_a_random_stream(self):
        m = xor_pair_model()
        s = SpinState(a=[0.3, -0.7], relaxation=Relaxation.TYPE_I)
        with pytest.raises(ValueError):
            gradient(GradientProvider(kind=GradientKind.MOREAU), m, s)
        g = gradient(GradientProvider(kind=GradientKind.MOREAU), m, s, np.random.default_rng(1))
        assert g.shape == (2,)

    def test_state_size_must_match(self):
        s = SpinState(a=[0.1, 0.2, 0.3], relaxation=Relaxation.TYPE_I)
        with pytest.raises(ValueError):
            gradient(GradientProvider(), xor_pair_model(), s)

    def test_batch_of_states(self):
        m = xor_pair_model()
        rows = np.array([[0.3, -0.7], [0.9, 0.2]])
        np.testing.assert_allclose(
            batch_gradient(GradientProvider(), m, rows, Relaxation.TYPE_I), [[-0.7, 0.3], [0.2, 0.9]], atol=1e-15
        )
        gp = GradientProvider(kind=GradientKind.TWO_POINT, two_point_delta=1e-6)
        np.testing.assert_allclose(
            batch_gradient(gp, m, rows, Relaxation.TYPE_III), objective_gradient(m, rows, Relaxation.TYPE_III),
            atol=1e-4,
        )
        with pytest.raises(ValueError):
            batch_gradient(GradientProvider(), m, rows[0], Relaxation.TYPE_I)
        with pytest.raises(ValueError):
            batch_gradient(GradientProvider(kind=GradientKind.MOREAU), m, rows, Relaxation.TYPE_I)

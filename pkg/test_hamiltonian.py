"""
Tests for the Hamiltonian, its relaxations and the reduction from formulas
"""
import numpy as np
import pytest
from pydantic import ValidationError

from models.constraint import Constraint, ConstraintKind
from models.formula import HybridFormula, WeightedConstraint, WeightRule
from models.ising import Relaxation, SpinState
from modules.fourier import all_points, truth_values
from modules.hamiltonian import (
    discrete_energy,
    edge_truths,
    ground_energy,
    hamiltonian,
    hamiltonian_gradient,
    is_satisfying,
    objective_gradient,
    objective_values,
    relaxation_target,
    relaxed_gradient,
    relaxed_objective,
    round_rows,
    round_to_assignment,
    satisfied_rows,
    weak_convexity_bound,
    weak_convexity_report,
)
from modules.model_builder import to_model

KINDS = [ConstraintKind.XOR, ConstraintKind.CARD_GE, ConstraintKind.CLAUSE]


def random_formula(rng: np.random.Generator, n: int, num_constraints: int, max_arity: int) -> HybridFormula:
    constraints = []
    for _ in range(num_constraints):
        d = int(rng.integers(1, min(max_arity, n) + 1))
        kind = KINDS[rng.integers(3)]
        variables = rng.permutation(np.arange(1, n + 1))[:d]
        literals = [int(v) * int(rng.choice([-1, 1])) for v in variables]
        threshold = int(rng.integers(0, d + 1)) if kind == ConstraintKind.CARD_GE else None
        weight = float(rng.integers(1, 4)) if rng.random() < 0.5 else None
        constraints.append(WeightedConstraint(
            constraint=Constraint.from_dimacs(kind, literals, threshold=threshold),
            weight=weight,
        ))
    return HybridFormula(n=n, constraints=constraints)


def satisfied_corners(m, corners: np.ndarray) -> np.ndarray:
    """Mask of the corners that satisfy every edge"""
    ok = np.ones(len(corners), dtype=bool)
    for edge in m.edges:
        ok &= truth_values(edge.constraint, corners[:, edge.index]) == -1
    return ok


def xor_pair_model():
    c = Constraint.from_dimacs(ConstraintKind.XOR, [1, 2])
    return to_model(HybridFormula(n=2, constraints=[WeightedConstraint(constraint=c)]), WeightRule.UNIT)


class TestReduction:
    def test_ground_energy_iff_satisfiable(self):
        rng = np.random.default_rng(100)
        for _ in range(100):
            n = int(rng.integers(2, 11))
            f = random_formula(rng, n, int(rng.integers(1, 8)), max_arity=6)
            m = to_model(f)
            corners = all_points(n)
            energies = hamiltonian(m, corners)
            satisfiable = bool(satisfied_corners(m, corners).any())
            at_ground = np.isclose(energies.min(), ground_energy(m), atol=1e-9)
            assert satisfiable == at_ground

    def test_energy_identity_at_corners(self):
        rng = np.random.default_rng(101)
        f = random_formula(rng, 6, 5, max_arity=5)
        m = to_model(f)
        for x in all_points(6):
            assert hamiltonian(m, x) == pytest.approx(discrete_energy(m, x), abs=1e-10)

    def test_type_two_and_three_minima(self):
        rng = np.random.default_rng(102)
        for _ in range(30):
            n = int(rng.integers(2, 9))
            m = to_model(random_formula(rng, n, 4, max_arity=4))
            corners = all_points(n)
            for x in corners[satisfied_corners(m, corners)]:
                assert is_satisfying(m, x)
                target = -m.total_weight - n
                assert objective_values(m, x, Relaxation.TYPE_II) == pytest.approx(target, abs=1e-9)
                encoded = np.where(x < 0, -np.pi / 2, np.pi / 2)
                assert objective_values(m, encoded, Relaxation.TYPE_III) == pytest.approx(target, abs=1e-9)

    def test_weights_default_to_arity(self):
        c = Constraint.from_dimacs(ConstraintKind.CARD_GE, [1, 2, 3], threshold=2)
        f = HybridFormula(n=3, constraints=[WeightedConstraint(constraint=c)])
        assert to_model(f).edges[0].weight == 3.0
        assert to_model(f, WeightRule.UNIT).edges[0].weight == 1.0


class TestTargets:
    def test_targets_per_relaxation(self):
        m = xor_pair_model()
        assert relaxation_target(m, Relaxation.TYPE_I) == -1.0
        assert relaxation_target(m, Relaxation.TYPE_II) == -3.0
        assert relaxation_target(m, Relaxation.TYPE_III) == -3.0
        assert relaxation_target(m, Relaxation.TYPE_II, p=4.0) == -1.0 - 2 * 16.0

    def test_locking_term_minimum_per_spin(self):
        # a^4 - 2p a^2 is smallest at a^2 = p with value -p^2
        empty = to_model(HybridFormula(n=1, constraints=[]))
        for p in (0.5, 1.0, 3.0):
            a = np.array([np.sqrt(p)])
            assert objective_values(empty, a, Relaxation.TYPE_II, p) == pytest.approx(-p * p)


class TestGradients:
    @pytest.mark.parametrize("relaxation", list(Relaxation))
    def test_exact_gradient_matches_central_differences(self, relaxation):
        rng = np.random.default_rng(200)
        h = 1e-5
        for _ in range(60):
            n = int(rng.integers(2, 13))
            m = to_model(random_formula(rng, n, int(rng.integers(1, 12)), max_arity=8))
            bound = np.pi if relaxation == Relaxation.TYPE_III else 0.999
            a = rng.uniform(-bound, bound, size=n)
            numeric = np.array([
                (objective_values(m, a + h * e, relaxation) - objective_values(m, a - h * e, relaxation)) / (2 * h)
                for e in np.eye(n)
            ])
            exact = objective_gradient(m, a, relaxation)
            np.testing.assert_allclose(exact, numeric, rtol=1e-6, atol=1e-6)

    def test_type_one_is_affine_in_each_spin(self):
        rng = np.random.default_rng(202)
        for _ in range(30):
            n = int(rng.integers(2, 10))
            m = to_model(random_formula(rng, n, int(rng.integers(1, 8)), max_arity=6))
            a = rng.uniform(-1, 1, size=n)
            for i in range(n):
                line = np.tile(a, (3, 1))
                line[:, i] = [-0.5, 0.1, 0.7]
                low, mid, high = objective_values(m, line, Relaxation.TYPE_I)
                assert high - mid == pytest.approx(mid - low, abs=1e-12)

    def test_state_gradient_wraps_objective_gradient(self):
        m = xor_pair_model()
        s = SpinState(a=[0.3, -0.7], relaxation=Relaxation.TYPE_I)
        np.testing.assert_allclose(relaxed_gradient(m, s), [-0.7, 0.3], atol=1e-15)
        assert relaxed_objective(m, s) == pytest.approx(-0.21)

    def test_batched_hamiltonian(self):
        rng = np.random.default_rng(201)
        m = to_model(random_formula(rng, 5, 4, max_arity=4))
        a = rng.uniform(-1, 1, size=(3, 4, 5))
        values = hamiltonian(m, a)
        grads = hamiltonian_gradient(m, a)
        assert values.shape == (3, 4)
        assert grads.shape == (3, 4, 5)
        assert values[1, 2] == pytest.approx(hamiltonian(m, a[1, 2]), abs=1e-14)
        np.testing.assert_allclose(grads[2, 0], hamiltonian_gradient(m, a[2, 0]), atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            hamiltonian(xor_pair_model(), np.zeros(3))


class TestStates:
    def test_rounding_ties_to_false(self):
        s = SpinState(a=[-0.2, 0.0, 0.4], relaxation=Relaxation.TYPE_I)
        np.testing.assert_array_equal(round_to_assignment(s), [-1, 1, 1])

    def test_type_three_rounds_through_sine(self):
        s = SpinState(a=[-np.pi / 2, 2.0, 4.0], relaxation=Relaxation.TYPE_III)
        np.testing.assert_array_equal(round_to_assignment(s), [-1, 1, -1])

    def test_rows_are_rounded_and_checked_together(self):
        m = xor_pair_model()
        rows = np.array([[0.5, -0.1], [-0.3, -0.9], [0.0, -2.0]])
        np.testing.assert_array_equal(round_rows(rows, Relaxation.TYPE_I), [[1, -1], [-1, -1], [1, -1]])
        np.testing.assert_array_equal(round_rows(rows, Relaxation.TYPE_III), [[1, -1], [-1, -1], [1, -1]])
        assignments = round_rows(rows, Relaxation.TYPE_I)
        np.testing.assert_array_equal(satisfied_rows(m, assignments), [True, False, True])
        for x, ok in zip(assignments, satisfied_rows(m, assignments)):
            assert is_satisfying(m, x) == ok

    def test_domain_is_enforced(self):
        with pytest.raises(ValidationError):
            SpinState(a=[1.5, 0.0], relaxation=Relaxation.TYPE_I)
        with pytest.raises(ValidationError):
            SpinState(a=[1.5, 0.0], relaxation=Relaxation.TYPE_II, p=2.0 ** -1)
        SpinState(a=[1.4, 0.0], relaxation=Relaxation.TYPE_II, p=2.0)
        SpinState(a=[10.0, -10.0], relaxation=Relaxation.TYPE_III)

    def test_assignment_entries_must_be_spins(self):
        with pytest.raises(ValueError):
            edge_truths(xor_pair_model(), [1, 0])


class TestWeakConvexity:
    def test_xor_pair_bounds(self):
        m = xor_pair_model()
        assert weak_convexity_bound(m, Relaxation.TYPE_I) == pytest.approx(1.0)
        assert weak_convexity_bound(m, Relaxation.TYPE_II, p=1.0) == pytest.approx(9.0)
        assert weak_convexity_bound(m, Relaxation.TYPE_III) == pytest.approx(6.0)

    def test_report_has_every_relaxation(self):
        report = weak_convexity_report(xor_pair_model(), p=0.5)
        assert set(report) == {r.value for r in Relaxation}
        assert report['type2'] == pytest.approx(5.0)

"""
Weighted higher-order Ising Hamiltonian, its three relaxations and gradients
"""
import logging
from typing import Dict

import numpy as np

from models.ising import HyperIsingModel, Relaxation, SpinState
from modules.convolution import edge_gradient, evaluate_edge
from modules.fourier import spectral_mass, truth_values

logger = logging.getLogger(__name__)

# Relative tolerance (per edge) for the energy identity at a Boolean assignment
ENERGY_IDENTITY_TOLERANCE = 1e-6


def _check_dimension(m: HyperIsingModel, x: np.ndarray):
    if x.shape[-1:] != (m.n,):
        raise ValueError(f"Expected {m.n} spins (received shape {x.shape})")


def _as_result(values: np.ndarray):
    return float(values) if np.ndim(values) == 0 else values


def hamiltonian(m: HyperIsingModel, x):
    """
    H(x) = sum_e w_e f_e(sign-folded slice of x)

    Args:
        m: HyperIsingModel
        x: Spins of shape (n,) or a batch of shape (..., n)

    Returns:
        float for a single point, array of shape (...) for a batch
    """
    x = np.asarray(x, dtype=float)
    _check_dimension(m, x)
    total = np.zeros(x.shape[:-1])
    for edge in m.edges:
        total = total + edge.weight * evaluate_edge(edge.table, x[..., edge.index] * edge.sign_vector)
    return _as_result(total)


def hamiltonian_gradient(m: HyperIsingModel, x) -> np.ndarray:
    """
    Exact gradient of H, edges scattered in index order

    Args:
        m: HyperIsingModel
        x: Spins of shape (..., n)

    Returns:
        Array of shape (..., n)
    """
    x = np.asarray(x, dtype=float)
    _check_dimension(m, x)
    grad = np.zeros(x.shape)
    for edge in m.edges:
        local = edge_gradient(edge.table, x[..., edge.index] * edge.sign_vector)
        # edge variables are distinct, so fancy-index accumulation is safe
        grad[..., edge.index] += edge.weight * edge.sign_vector * local
    return grad


def ground_energy(m: HyperIsingModel) -> float:
    """-sum_e w_e: the energy of any satisfying assignment"""
    return -m.total_weight


def relaxation_target(m: HyperIsingModel, relaxation: Relaxation, p: float = 1.0) -> float:
    """
    Minimum relaxed objective reached exactly when the formula is satisfiable

    Type II uses -sum w - n p^2 (each locked spin contributes -p^2),
    which is -sum w - n at p = 1.
    """
    base = ground_energy(m)
    if relaxation == Relaxation.TYPE_I:
        return base
    if relaxation == Relaxation.TYPE_II:
        return base - m.n * p * p
    return base - m.n


def objective_values(m: HyperIsingModel, a, relaxation: Relaxation, p: float = 1.0):
    """
    Relaxed objective without domain checks (shifted and sampled points may leave the box)

    Args:
        m: HyperIsingModel
        a: Array of shape (..., n)
        relaxation: Relaxation type
        p: Type II domain parameter

    Returns:
        float or array of shape (...)
    """
    a = np.asarray(a, dtype=float)
    if relaxation == Relaxation.TYPE_I:
        return hamiltonian(m, a)
    if relaxation == Relaxation.TYPE_II:
        locking = (a ** 4 - 2.0 * p * a ** 2).sum(axis=-1)
        return _as_result(hamiltonian(m, a) + locking)
    locking = np.cos(2.0 * a).sum(axis=-1)
    return _as_result(hamiltonian(m, np.sin(a)) + locking)


def objective_gradient(m: HyperIsingModel, a, relaxation: Relaxation, p: float = 1.0) -> np.ndarray:
    """Gradient of objective_values, shape (..., n)"""
    a = np.asarray(a, dtype=float)
    if relaxation == Relaxation.TYPE_I:
        return hamiltonian_gradient(m, a)
    if relaxation == Relaxation.TYPE_II:
        return hamiltonian_gradient(m, a) + 4.0 * a ** 3 - 4.0 * p * a
    return np.cos(a) * hamiltonian_gradient(m, np.sin(a)) - 2.0 * np.sin(2.0 * a)


def _check_state(m: HyperIsingModel, s: SpinState):
    if s.n != m.n:
        raise ValueError(f"State has {s.n} spins but the model has {m.n}")


def relaxed_objective(m: HyperIsingModel, s: SpinState) -> float:
    """
    Type I: H(a); Type II: H(a) + sum(a^4 - 2p a^2); Type III: H(sin a) + sum cos(2a)
    """
    _check_state(m, s)
    return float(objective_values(m, s.a, s.relaxation, s.p))


def relaxed_gradient(m: HyperIsingModel, s: SpinState) -> np.ndarray:
    """Exact gradient of relaxed_objective at the state"""
    _check_state(m, s)
    return objective_gradient(m, s.a, s.relaxation, s.p)


def round_rows(a, relaxation: Relaxation) -> np.ndarray:
    """sign(a) for Type I/II, sign(sin a) for Type III, ties to +1; shape (..., n)"""
    a = np.asarray(a, dtype=float)
    values = np.sin(a) if relaxation == Relaxation.TYPE_III else a
    return np.where(values < 0, -1, 1).astype(np.int64)


def round_to_assignment(s: SpinState) -> np.ndarray:
    """
    Read a +/-1 assignment out of a continuous state

    Args:
        s: SpinState

    Returns:
        Integer vector; sign(a) for Type I/II, sign(sin a) for Type III, ties to +1
    """
    return round_rows(s.a, s.relaxation)


def satisfied_rows(m: HyperIsingModel, assignments) -> np.ndarray:
    """Boolean array of shape (...): every edge true under each +/-1 assignment"""
    x = np.asarray(assignments)
    _check_dimension(m, x)
    ok = np.ones(x.shape[:-1], dtype=bool)
    for edge in m.edges:
        ok &= truth_values(edge.constraint, x[..., edge.index]) == -1
    return ok


def edge_truths(m: HyperIsingModel, assignment) -> np.ndarray:
    """Exact truth value (-1 satisfied) of every edge under a +/-1 assignment"""
    x = np.asarray(assignment)
    _check_dimension(m, x)
    if not np.all((x == 1) | (x == -1)):
        raise ValueError("Assignment entries must be +1 or -1")
    return np.array(
        [int(truth_values(edge.constraint, x[edge.index])) for edge in m.edges],
        dtype=np.int64,
    )


def discrete_energy(m: HyperIsingModel, assignment) -> float:
    """H at a Boolean assignment, from exact truth values"""
    truths = edge_truths(m, assignment)
    return float(sum(edge.weight * t for edge, t in zip(m.edges, truths)))


def is_satisfying(m: HyperIsingModel, assignment) -> bool:
    """
    True iff every edge is satisfied.

    The polynomial energy is checked against the ground energy as well;
    a disagreement beyond round-off is logged since high-arity edges lose
    precision at the cube corners.
    """
    satisfied = bool(np.all(edge_truths(m, assignment) == -1))
    energy = hamiltonian(m, np.asarray(assignment, dtype=float))
    at_ground = abs(energy - ground_energy(m)) <= ENERGY_IDENTITY_TOLERANCE * max(1, len(m.edges))
    if satisfied != at_ground:
        logger.warning(
            f"Energy identity disagrees with truth check: satisfied={satisfied}, "
            f"H={energy:.9g}, ground={ground_energy(m):.9g}"
        )
    return satisfied


def weak_convexity_bound(m: HyperIsingModel, relaxation: Relaxation, p: float = 1.0) -> float:
    """
    Conservative weak-convexity diagnostic.

    rho_1 = max_i sum_{e containing i} w_e * sum_S |f_e(S)|
    rho_2 = rho_1 + 8p
    rho_3 = 2 * rho_1 + 4 (both spin-adjacency sums bounded by the same mass)

    Args:
        m: HyperIsingModel
        relaxation: Relaxation type
        p: Type II domain parameter

    Returns:
        The bound for the requested relaxation
    """
    mass = np.zeros(m.n)
    for edge in m.edges:
        mass[edge.index] += edge.weight * spectral_mass(edge.table)
    rho_1 = float(mass.max()) if m.n else 0.0
    if relaxation == Relaxation.TYPE_I:
        return rho_1
    if relaxation == Relaxation.TYPE_II:
        return rho_1 + 8.0 * p
    return 2.0 * rho_1 + 4.0


def weak_convexity_report(m: HyperIsingModel, p: float = 1.0) -> Dict[str, float]:
    """All three diagnostics, keyed by relaxation value"""
    return {relaxation.value: weak_convexity_bound(m, relaxation, p) for relaxation in Relaxation}

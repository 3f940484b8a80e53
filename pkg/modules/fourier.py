"""
Truth semantics and Walsh-Fourier compilation of hybrid constraints
"""
import logging
from fractions import Fraction
from math import comb
from typing import Iterable, List

import numpy as np

from models.constraint import Constraint, ConstraintKind, FourierTable, TableVariant
from utils.constants import SPIN_TRUE, TRUTH_TABLE_MAX_ARITY

logger = logging.getLogger(__name__)


def _satisfied_by_count(c: Constraint, trues):
    """Satisfaction of a symmetric constraint given the number of true literals"""
    if c.kind == ConstraintKind.XOR:
        return trues % 2 == 1
    if c.kind == ConstraintKind.CARD_GE:
        return trues >= c.threshold
    if c.kind == ConstraintKind.CLAUSE:
        return trues >= 1
    raise ValueError(f"Constraint kind {c.kind.value} is not symmetric")


def truth_values(c: Constraint, points: np.ndarray) -> np.ndarray:
    """
    Vectorized truth evaluation

    Args:
        c: Constraint
        points: Array of shape (..., d) with +/-1 entries

    Returns:
        Integer array of shape (...) with -1 where the constraint is satisfied
    """
    folded = np.asarray(points) * np.asarray(c.signs)
    is_true = folded == SPIN_TRUE
    if c.kind == ConstraintKind.TRUTH_TABLE:
        index = (is_true * (1 << np.arange(c.arity))).sum(axis=-1)
        return np.asarray(c.table, dtype=np.int64)[index]
    satisfied = _satisfied_by_count(c, is_true.sum(axis=-1))
    return np.where(satisfied, -1, 1).astype(np.int64)


def evaluate_truth(c: Constraint, x) -> int:
    """
    Evaluate a constraint on one +/-1 assignment of its literals

    Args:
        c: Constraint
        x: Vector of d entries in {-1, +1}, one per literal position

    Returns:
        -1 when satisfied (true), +1 otherwise
    """
    x = np.asarray(x)
    if x.shape != (c.arity,):
        raise ValueError(f"Expected {c.arity} inputs (received shape {x.shape})")
    if not np.all((x == 1) | (x == -1)):
        raise ValueError(f"Inputs must be +1 or -1 (received {x.tolist()})")
    return int(truth_values(c, x))


def all_points(d: int) -> np.ndarray:
    """Every x in {-1,+1}^d; row r has x_i = -1 exactly when bit i of r is set"""
    rows = np.arange(1 << d)[:, None]
    bits = (rows >> np.arange(d)) & 1
    return 1 - 2 * bits


def _check_arity(c: Constraint):
    if c.arity > TRUTH_TABLE_MAX_ARITY:
        raise ValueError(f"Arity {c.arity} exceeds the enumeration cap {TRUTH_TABLE_MAX_ARITY}")


def fourier_coefficient(c: Constraint, subset: Iterable[int]) -> float:
    """
    Walsh-Fourier coefficient by direct summation over all 2^d assignments

    Args:
        c: Constraint (literal signs included)
        subset: 1-based literal positions forming S

    Returns:
        (1/2^d) * sum_x f(x) * prod_{i in S} x_i
    """
    _check_arity(c)
    positions = sorted(set(subset))
    if any(not 1 <= i <= c.arity for i in positions):
        raise ValueError(f"Subset {positions} is not within 1..{c.arity}")
    points = all_points(c.arity)
    character = points[:, [i - 1 for i in positions]].prod(axis=1)
    total = int((truth_values(c, points) * character).sum())
    return total / (1 << c.arity)


def symmetric_coefficients_exact(c: Constraint) -> List[Fraction]:
    """
    Degree-indexed coefficients of a symmetric constraint as exact fractions.

    Literal signs are ignored (the constraint is folded). For |S| = k,
    grouping the 2^d assignments by their number t of trues gives
    coeff_k = 2^-d * sum_t g(t) K_t(k), where K_t(k) is the coefficient of
    z^t in (1-z)^k (1+z)^(d-k). K_t(k) follows the three-term recurrence
    (t+1) K_{t+1} = (d-2k) K_t - (d-t+1) K_{t-1}, so the table costs O(d^2)
    integer operations.
    """
    if not c.is_symmetric:
        raise ValueError(f"Constraint kind {c.kind.value} is not symmetric")
    d = c.arity
    g = [-1 if _satisfied_by_count(c, t) else 1 for t in range(d + 1)]
    coeffs = []
    for k in range(d + 1):
        previous, current = 0, 1
        total = g[0]
        for t in range(d):
            # exact: K_{t+1} is an integer
            previous, current = current, ((d - 2 * k) * current - (d - t + 1) * previous) // (t + 1)
            total += g[t + 1] * current
        coeffs.append(Fraction(total, 1 << d))
    return coeffs


def compile_symmetric(c: Constraint) -> FourierTable:
    """
    Compile XOR / cardinality / clause constraints to a degree-indexed table

    Args:
        c: Symmetric constraint; signs are applied separately at evaluation time

    Returns:
        SYMMETRIC FourierTable with d+1 coefficients
    """
    coeffs = symmetric_coefficients_exact(c)
    return FourierTable(
        variant=TableVariant.SYMMETRIC,
        arity=c.arity,
        degree_coeffs=np.array([float(v) for v in coeffs]),
    )


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform along the last axis (length 2^d)"""
    out = np.array(values, dtype=np.int64)
    size = out.shape[-1]
    h = 1
    while h < size:
        blocks = out.reshape(out.shape[:-1] + (size // (2 * h), 2, h))
        left = blocks[..., 0, :].copy()
        right = blocks[..., 1, :]
        blocks[..., 0, :] = left + right
        blocks[..., 1, :] = left - right
        out = blocks.reshape(out.shape)
        h *= 2
    return out


def compile_general(c: Constraint) -> FourierTable:
    """
    Full subset-indexed Walsh-Fourier table of any constraint

    Args:
        c: Constraint with d <= cap; literal signs are included

    Returns:
        GENERAL FourierTable with zero coefficients dropped
    """
    _check_arity(c)
    d = c.arity
    truth = truth_values(c, all_points(d))
    spectrum = walsh_hadamard(truth)
    scale = float(1 << d)
    terms = {int(mask): float(spectrum[mask]) / scale for mask in np.flatnonzero(spectrum)}
    return FourierTable(variant=TableVariant.GENERAL, arity=d, subset_coeffs=terms)


def compile_constraint(c: Constraint) -> FourierTable:
    """
    Compile the folded constraint, symmetric path when possible

    Args:
        c: Constraint; its signs are carried by the hyperedge, not the table

    Returns:
        FourierTable of the all-positive version of c
    """
    folded = c.folded()
    if folded.is_symmetric:
        return compile_symmetric(folded)
    logger.debug(f"Compiling {c.kind.value} constraint of arity {c.arity} with the general path")
    return compile_general(folded)


def multilinear_value(table: FourierTable, x: np.ndarray) -> np.ndarray:
    """
    Evaluate a GENERAL table's polynomial at real points

    Args:
        table: GENERAL FourierTable
        x: Array of shape (..., d)

    Returns:
        Array of shape (...)
    """
    x = np.asarray(x, dtype=float)
    return _fold(table.dense, x, table.arity)


def multilinear_partials(table: FourierTable, x: np.ndarray) -> np.ndarray:
    """All partial derivatives of a GENERAL table's polynomial, shape (..., d)"""
    x = np.asarray(x, dtype=float)
    return np.stack(
        [_fold(table.dense_partials[j], x, table.arity) for j in range(table.arity)],
        axis=-1,
    )


def _fold(dense: np.ndarray, x: np.ndarray, d: int) -> np.ndarray:
    # Eliminate the highest remaining position each pass: c_low + c_high * x_i
    values = np.broadcast_to(dense, x.shape[:-1] + dense.shape)
    for i in range(d - 1, -1, -1):
        half = 1 << i
        values = values[..., :half] + values[..., half:] * x[..., i:i + 1]
    return values[..., 0]


def spectral_mass(table: FourierTable) -> float:
    """Sum of |coefficient| over all subsets"""
    if table.is_symmetric:
        d = table.arity
        return float(sum(comb(d, k) * abs(v) for k, v in enumerate(table.degree_coeffs)))
    return float(sum(abs(v) for v in table.subset_coeffs.values()))


def parseval_sum(table: FourierTable) -> float:
    """Sum of squared coefficients over all subsets (1 for +/-1 valued functions)"""
    if table.is_symmetric:
        d = table.arity
        return float(sum(comb(d, k) * v * v for k, v in enumerate(table.degree_coeffs)))
    return float(sum(v * v for v in table.subset_coeffs.values()))

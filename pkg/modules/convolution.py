"""
Convolution kernels for symmetric hyperedge evaluation and gradients.

A profile of inputs a_1..a_d is the vector of elementary symmetric
polynomials [E_0(a), E_1(a), ..., E_d(a)], obtained by convolving the
length-2 factors [1, a_j]. Every function accepts leading batch axes;
the sequence axis is always the last one.
"""
import logging
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from models.constraint import FourierTable
from modules.fourier import multilinear_partials, multilinear_value

logger = logging.getLogger(__name__)


class CumulativePair(BaseModel):
    """
    Prefix and suffix profiles of one input vector.

    seq[j] is the profile of the first j inputs, rev[k] the profile of the
    last k inputs (folded from a_d backwards). seq[0] = rev[0] = [1].
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    seq: List[np.ndarray]
    rev: List[np.ndarray]

    @model_validator(mode='after')
    def validate_lengths(self):
        if len(self.seq) != len(self.rev):
            raise ValueError("Prefix and suffix lists must have the same length")
        return self

    @property
    def arity(self) -> int:
        return len(self.seq) - 1


def convolve(g, h) -> np.ndarray:
    """
    Linear convolution along the last axis: (g*h)_i = sum_j g_{i-j} h_j

    Args:
        g: Array of shape (..., n)
        h: Array of shape (..., m)

    Returns:
        Array of shape (..., n+m-1), accumulated over the shorter operand in
        ascending index
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    if g.shape[-1:] in ((), (0,)) or h.shape[-1:] in ((), (0,)):
        raise ValueError("Convolution needs two nonempty sequences")
    if h.shape[-1] > g.shape[-1]:
        g, h = h, g
    n, m = g.shape[-1], h.shape[-1]
    lead = np.broadcast_shapes(g.shape[:-1], h.shape[:-1])
    out = np.zeros(lead + (n + m - 1,))
    for j in range(m):
        out[..., j:j + n] += g * h[..., j:j + 1]
    return out


def _factor(a_j: np.ndarray) -> np.ndarray:
    return np.stack([np.ones_like(a_j), a_j], axis=-1)


def _identity(lead) -> np.ndarray:
    return np.ones(tuple(lead) + (1,))


def symmetric_profile(a) -> np.ndarray:
    """
    Elementary symmetric polynomials of a, shape (..., d+1), index k = degree k

    Args:
        a: Array of shape (..., d)

    Returns:
        Profile with profile[..., 0] = 1
    """
    a = np.asarray(a, dtype=float)
    profile = _identity(a.shape[:-1])
    for j in range(a.shape[-1]):
        profile = convolve(profile, _factor(a[..., j]))
    return profile


def cumulative_pair(a) -> CumulativePair:
    """
    Bidirectional cumulative convolution of the factors [1, a_j]

    Args:
        a: Array of shape (..., d)

    Returns:
        CumulativePair with d+1 prefix and d+1 suffix profiles
    """
    a = np.asarray(a, dtype=float)
    d = a.shape[-1]
    seq = [_identity(a.shape[:-1])]
    rev = [_identity(a.shape[:-1])]
    for j in range(d):
        seq.append(convolve(seq[-1], _factor(a[..., j])))
        rev.append(convolve(rev[-1], _factor(a[..., d - 1 - j])))
    return CumulativePair(seq=seq, rev=rev)


def _degree_sum(profile: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    return (profile * coeffs).sum(axis=-1)


def _check_arity(t: FourierTable, a: np.ndarray):
    if a.shape[-1:] != (t.arity,):
        raise ValueError(f"Table arity {t.arity} does not match input shape {a.shape}")


def evaluate_edge(t: FourierTable, a) -> np.ndarray:
    """
    Value of a hyperedge polynomial at real inputs

    Args:
        t: FourierTable (symmetric tables use the profile, general ones the monomials)
        a: Array of shape (..., d)

    Returns:
        sum_k coeffs[k] * E_k(a), shape (...)
    """
    a = np.asarray(a, dtype=float)
    _check_arity(t, a)
    if not t.is_symmetric:
        return multilinear_value(t, a)
    return _degree_sum(symmetric_profile(a), t.degree_coeffs)


def edge_gradient(t: FourierTable, a) -> np.ndarray:
    """
    All partial derivatives of a hyperedge polynomial

    Component j pairs coeffs[1:] with the leave-one-out profile
    seq[j-1] * rev[d-j]: one extra convolution per coordinate.

    Args:
        t: FourierTable
        a: Array of shape (..., d)

    Returns:
        Array of shape (..., d)
    """
    a = np.asarray(a, dtype=float)
    _check_arity(t, a)
    if not t.is_symmetric:
        return multilinear_partials(t, a)
    d = t.arity
    pair = cumulative_pair(a)
    tail = t.degree_coeffs[1:]
    partials = [
        _degree_sum(convolve(pair.seq[j - 1], pair.rev[d - j]), tail)
        for j in range(1, d + 1)
    ]
    return np.stack(partials, axis=-1)


def leave_one_out_profile(a, j: int) -> np.ndarray:
    """
    Profile of a without its j-th entry (1-based), recomputed from scratch
    with the same prefix / reversed-suffix fold order as cumulative_pair
    """
    a = np.asarray(a, dtype=float)
    d = a.shape[-1]
    if not 1 <= j <= d:
        raise ValueError(f"Position {j} is not within 1..{d}")
    prefix = symmetric_profile(a[..., :j - 1])
    suffix = symmetric_profile(a[..., j:][..., ::-1])
    return convolve(prefix, suffix)


def leave_one_out_gradient(t: FourierTable, a) -> np.ndarray:
    """Per-coordinate gradient that rebuilds every leave-one-out profile independently"""
    a = np.asarray(a, dtype=float)
    _check_arity(t, a)
    if not t.is_symmetric:
        raise ValueError("Leave-one-out gradient needs a symmetric table")
    tail = t.degree_coeffs[1:]
    return np.stack(
        [_degree_sum(leave_one_out_profile(a, j), tail) for j in range(1, t.arity + 1)],
        axis=-1,
    )

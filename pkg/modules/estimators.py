"""
Gradient providers: exact, two-point finite difference, Moreau-envelope sampling
"""
import logging
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import softmax

from models.ising import HyperIsingModel, Relaxation, SpinState
from models.run_config import GradientKind, GradientProvider, MoreauParams
from modules.hamiltonian import objective_gradient, objective_values

logger = logging.getLogger(__name__)

# Batched objective: (..., n) -> (...)
Objective = Callable[[np.ndarray], np.ndarray]


class DivergenceError(RuntimeError):
    """Objective became non-finite at a shifted or sampled point"""


def _require_finite(values: np.ndarray, where: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        bad = int(np.count_nonzero(~np.isfinite(values)))
        raise DivergenceError(f"Objective is not finite at {bad} {where} point(s)")
    return values


def two_point_gradient(objective: Objective, a: np.ndarray, delta: float) -> np.ndarray:
    """
    Forward-difference estimate (H(a + delta e_i) - H(a)) / delta

    Args:
        objective: Batched objective
        a: Point of shape (n,) or rows of shape (k, n)
        delta: Step size

    Returns:
        Estimated gradient with the shape of a; one objective call on the
        (..., n+1, n) stack of base points and shifted points
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[-1]
    base = a[..., None, :]
    points = np.concatenate([base, base + delta * np.eye(n)], axis=-2)
    values = _require_finite(objective(points), "two-point")
    return (values[..., 1:] - values[..., :1]) / delta


def moreau_gradient(
    objective: Objective,
    a: np.ndarray,
    params: MoreauParams,
    rng: Union[np.random.Generator, Sequence[np.random.Generator]]
) -> np.ndarray:
    """
    Sampled gradient of the Moreau envelope u_t at a.

    Samples b ~ N(a, (delta t / alpha) I) are weighted by softmax(-H(b)/delta);
    their weighted mean estimates the proximal point and the gradient is
    (a - proximal) / t.

    Args:
        objective: Batched objective (evaluated on all of R^n)
        a: Point of shape (n,) or rows of shape (k, n)
        params: Sampling parameters
        rng: Random stream, or one stream per row of a

    Returns:
        Estimated gradient with the shape of a; every row draws its samples
        from its own stream
    """
    a = np.asarray(a, dtype=float)
    rows = a[None, :] if a.ndim == 1 else a
    streams = [rng] if isinstance(rng, np.random.Generator) else list(rng)
    if len(streams) != rows.shape[0]:
        raise ValueError(f"Got {len(streams)} random stream(s) for {rows.shape[0]} point(s)")

    scale = np.sqrt(params.variance)
    noise = np.stack([s.standard_normal((params.samples, rows.shape[-1])) for s in streams])
    samples = rows[:, None, :] + scale * noise
    values = _require_finite(objective(samples), "Moreau sample")
    weights = softmax(-values / params.delta, axis=-1)
    proximal = np.einsum('ks,ksn->kn', weights, samples)
    g = (rows - proximal) / params.t
    return g[0] if a.ndim == 1 else g


def batch_gradient(
    gp: GradientProvider,
    m: HyperIsingModel,
    a: np.ndarray,
    relaxation: Relaxation,
    p: float = 1.0,
    rngs: Optional[Sequence[np.random.Generator]] = None
) -> np.ndarray:
    """
    Gradient of the relaxed objective at k states at once

    Args:
        gp: GradientProvider
        m: HyperIsingModel
        a: States of shape (k, n), each inside the relaxation's domain
        relaxation: Relaxation type
        p: Type II domain parameter
        rngs: One random stream per row (MOREAU only)

    Returns:
        Array of shape (k, n)
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[1] != m.n:
        raise ValueError(f"Expected states of shape (k, {m.n}), received {a.shape}")

    if gp.kind == GradientKind.EXACT:
        return _require_finite(objective_gradient(m, a, relaxation, p), "gradient")

    def objective(points: np.ndarray) -> np.ndarray:
        return np.asarray(objective_values(m, points, relaxation, p))

    if gp.kind == GradientKind.TWO_POINT:
        return two_point_gradient(objective, a, gp.two_point_delta)

    if rngs is None:
        raise ValueError("Moreau gradient needs a random stream")
    return moreau_gradient(objective, a, gp.moreau_params, rngs)


def gradient(
    gp: GradientProvider,
    m: HyperIsingModel,
    s: SpinState,
    rng: np.random.Generator = None
) -> np.ndarray:
    """
    Gradient of the relaxed objective at a state, as selected by the provider

    Args:
        gp: GradientProvider
        m: HyperIsingModel
        s: SpinState (must lie in its domain)
        rng: Random stream (MOREAU only)

    Returns:
        Vector of length n
    """
    if s.n != m.n:
        raise ValueError(f"State has {s.n} spins but the model has {m.n}")
    rngs = None if rng is None else [rng]
    return batch_gradient(gp, m, s.a[None, :], s.relaxation, s.p, rngs)[0]

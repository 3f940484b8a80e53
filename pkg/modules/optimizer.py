"""
ADAM descent over relaxed spins with domain projection
"""
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from models.ising import HyperIsingModel, Relaxation, SpinState, domain_bound
from models.run_config import AdamConfig, GradientKind, GradientProvider, TrajectoryPoint, TrialResult
from modules.estimators import batch_gradient
from modules.hamiltonian import (
    discrete_energy,
    is_satisfying,
    objective_values,
    round_rows,
    satisfied_rows,
)
from utils.constants import MOREAU_LR, MOREAU_STEPS

logger = logging.getLogger(__name__)

Moments = Tuple[np.ndarray, np.ndarray]
Seed = Union[int, Sequence[int]]


def default_adam_for(kind: GradientKind, base: AdamConfig = None) -> AdamConfig:
    """
    ADAM settings for a gradient kind: Moreau runs use lr = 1 and their own step budget

    Args:
        kind: Gradient kind
        base: Settings for exact / two-point runs

    Returns:
        AdamConfig
    """
    base = base or AdamConfig()
    if kind == GradientKind.MOREAU:
        return base.model_copy(update={'lr': MOREAU_LR, 'steps': MOREAU_STEPS})
    return base


def adam_step(
    cfg: AdamConfig,
    t: int,
    a: np.ndarray,
    g: np.ndarray,
    moments: Moments
) -> Tuple[np.ndarray, Moments]:
    """
    One bias-corrected ADAM update

    Args:
        cfg: ADAM hyperparameters
        t: Step index (1-based)
        a: Current state
        g: Gradient at a
        moments: First and second moment estimates

    Returns:
        Tuple of (new state, new moments)
    """
    if t < 1:
        raise ValueError(f"ADAM step index starts at 1 (received {t})")
    m, v = moments
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g
    m_hat = m / (1.0 - cfg.beta1 ** t)
    v_hat = v / (1.0 - cfg.beta2 ** t)
    new_a = a - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
    return new_a, (m, v)


def project(a: np.ndarray, relaxation: Relaxation, p: float = 1.0) -> np.ndarray:
    """Clamp Type I / II states to their boxes; Type III is unconstrained"""
    bound = domain_bound(relaxation, p)
    if bound is None:
        return np.asarray(a, dtype=float)
    return np.clip(a, -bound, bound)


def initial_point(rng: np.random.Generator, n: int, relaxation: Relaxation, p: float = 1.0) -> np.ndarray:
    """Uniform start in [-1,1]^n, [-sqrt p, sqrt p]^n or [-pi, pi]^n"""
    bound = domain_bound(relaxation, p)
    if bound is None:
        bound = np.pi
    return rng.uniform(-bound, bound, size=n)


def _start_points(
    rngs: List[np.random.Generator],
    n: int,
    relaxation: Relaxation,
    p: float,
    init: Optional[np.ndarray]
) -> np.ndarray:
    if init is None:
        return np.stack([initial_point(rng, n, relaxation, p) for rng in rngs])
    start = SpinState(a=np.array(init, dtype=float), relaxation=relaxation, p=p).a
    if start.size != n:
        raise ValueError(f"Start point has {start.size} spins but the model has {n}")
    return np.tile(start, (len(rngs), 1))


def _snapshots(m, relaxation, p, a, g, steps) -> List[TrajectoryPoint]:
    energies = np.atleast_1d(objective_values(m, a, relaxation, p))
    return [
        TrajectoryPoint(step=int(steps[row]), state=a[row].copy(), energy=float(energies[row]), gradient=np.array(g[row]))
        for row in range(a.shape[0])
    ]


def run_trials(
    m: HyperIsingModel,
    relaxation: Relaxation,
    p: float,
    gp: GradientProvider,
    cfg: AdamConfig,
    seeds: Sequence[Seed],
    record_trajectory: bool = False,
    early_stop: bool = False,
    init: Optional[np.ndarray] = None
) -> List[TrialResult]:
    """
    Run independent descent trajectories as one (trials, n) batch

    Every trial keeps its own random stream (start point and Moreau samples)
    and its own ADAM moments, so a trial's result does not depend on which
    other trials share its batch.

    Args:
        m: HyperIsingModel
        relaxation: Relaxation type
        p: Type II domain parameter
        gp: Gradient provider
        cfg: ADAM settings (cfg.steps is the step budget)
        seeds: One seed (or seed sequence) per trial
        record_trajectory: Keep a snapshot per step
        early_stop: Stop each trial at its first satisfying rounding
        init: Optional start point shared by all trials, overriding the random draw

    Returns:
        List of TrialResult in seed order; success is checked after every step
    """
    rngs = [np.random.default_rng(seed) for seed in seeds]
    k = len(rngs)
    if k == 0:
        return []
    a = _start_points(rngs, m.n, relaxation, p, init)

    first_moment = np.zeros((k, m.n))
    second_moment = np.zeros((k, m.n))
    first_success: List[Optional[int]] = [None] * k
    steps_run = np.zeros(k, dtype=int)
    active = np.ones(k, dtype=bool)
    trajectories = [[] for _ in range(k)] if record_trajectory else None

    for step in range(1, cfg.steps + 1):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        g = batch_gradient(gp, m, a[rows], relaxation, p, [rngs[i] for i in rows])
        if trajectories is not None:
            for i, point in zip(rows, _snapshots(m, relaxation, p, a[rows], g, [step - 1] * rows.size)):
                trajectories[i].append(point)

        new_a, (mm, vv) = adam_step(cfg, step, a[rows], g, (first_moment[rows], second_moment[rows]))
        a[rows] = project(new_a, relaxation, p)
        first_moment[rows] = mm
        second_moment[rows] = vv
        steps_run[rows] = step

        solved = satisfied_rows(m, round_rows(a[rows], relaxation))
        for i in rows[solved]:
            if first_success[i] is None:
                first_success[i] = step
                logger.debug(f"Trial {i} reached a satisfying rounding at step {step}")
                if early_stop:
                    active[i] = False

    if trajectories is not None:
        # one more gradient per trial for the closing snapshot
        g = batch_gradient(gp, m, a, relaxation, p, rngs)
        for i, point in enumerate(_snapshots(m, relaxation, p, a, g, steps_run)):
            trajectories[i].append(point)

    final_assignments = round_rows(a, relaxation)
    final_energies = np.atleast_1d(objective_values(m, a, relaxation, p))
    results = []
    for i in range(k):
        if first_success[i] is not None and not is_satisfying(m, final_assignments[i]):
            logger.debug(f"Trial {i} left the satisfying region after its first success")
        results.append(TrialResult(
            success=first_success[i] is not None,
            first_success_step=first_success[i],
            final_energy=float(final_energies[i]),
            final_hamiltonian=discrete_energy(m, final_assignments[i]),
            final_assignment=tuple(int(v) for v in final_assignments[i]),
            steps_run=int(steps_run[i]),
            trajectory=None if trajectories is None else trajectories[i],
        ))
    return results


def run_trial(
    m: HyperIsingModel,
    relaxation: Relaxation,
    p: float,
    gp: GradientProvider,
    cfg: AdamConfig,
    seed: Seed,
    record_trajectory: bool = False,
    early_stop: bool = False,
    init: Optional[np.ndarray] = None
) -> TrialResult:
    """Run one descent trajectory from a random (or given) start; see run_trials"""
    return run_trials(m, relaxation, p, gp, cfg, [seed], record_trajectory, early_stop, init)[0]

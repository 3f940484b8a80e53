"""
Batch experiments: many instances x configurations x trials, aggregated into
success-rate-by-step tables
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from models.ising import HyperIsingModel, Relaxation
from models.run_config import AdamConfig, GradientKind, GradientProvider, TrialResult
from modules.estimators import DivergenceError
from modules.optimizer import run_trials
from utils.constants import SUCCESS_COLUMNS

logger = logging.getLogger(__name__)

ConfigKey = Tuple[Relaxation, GradientProvider]
AdamSettings = Union[AdamConfig, Mapping[GradientKind, AdamConfig]]
TrialSeed = Tuple[int, int, int]

# Models shared with worker processes (set once per worker by the initializer)
_worker_models: List[HyperIsingModel] = []


class BatchTask(BaseModel):
    """All trials of one configuration on one instance, run as a single batch"""
    model_config = ConfigDict(frozen=True)

    instance_index: int
    relaxation: Relaxation
    provider: GradientProvider
    adam: AdamConfig
    p: float
    seeds: Tuple[TrialSeed, ...]
    early_stop: bool = False


def trial_seed(master_seed: int, instance_index: int, trial_index: int) -> TrialSeed:
    """Counter-derived seed; identical across configurations so runs are paired"""
    return (master_seed, instance_index, trial_index)


def _init_worker(models: List[HyperIsingModel]):
    global _worker_models
    _worker_models = models


def _aborted_result(steps: int, message: str) -> TrialResult:
    return TrialResult(
        success=False,
        final_energy=None,
        final_hamiltonian=None,
        final_assignment=(),
        steps_run=steps,
        diagnostic=message,
    )


def _run_task(task: BatchTask) -> List[TrialResult]:
    model = _worker_models[task.instance_index]
    settings = (model, task.relaxation, task.p, task.provider, task.adam)
    try:
        return run_trials(*settings, task.seeds, early_stop=task.early_stop)
    except DivergenceError:
        logger.debug(f"Batch on instance {task.instance_index} diverged, rerunning its trials one by one")

    results = []
    for seed in task.seeds:
        try:
            results.extend(run_trials(*settings, [seed], early_stop=task.early_stop))
        except DivergenceError as e:
            logger.warning(
                f"Trial {seed[2]} on instance {task.instance_index} "
                f"({task.relaxation.value}/{task.provider.label}) aborted: {e}"
            )
            results.append(_aborted_result(task.adam.steps, str(e)))
    return results


def _adam_for(cfg: AdamSettings, kind: GradientKind) -> AdamConfig:
    if isinstance(cfg, AdamConfig):
        return cfg
    return cfg[kind]


def run_batch_trials(
    models: Sequence[HyperIsingModel],
    relaxations: Sequence[Relaxation],
    providers: Sequence[GradientProvider],
    cfg: AdamSettings,
    trials_per_instance: int,
    seed: int,
    p: float = 1.0,
    jobs: int = 1,
    early_stop: bool = False
) -> Dict[ConfigKey, List[List[TrialResult]]]:
    """
    Run every (relaxation, provider) configuration on every model

    Args:
        models: Instances
        relaxations: Relaxation types to try
        providers: Gradient providers to try
        cfg: ADAM settings, or one per gradient kind
        trials_per_instance: Trials per (configuration, instance)
        seed: Master seed
        p: Type II domain parameter
        jobs: Worker processes (1 runs in-process)
        early_stop: Stop each trial at its first success

    Returns:
        Dictionary of (relaxation, provider) -> results[instance][trial]
    """
    configurations = list(dict.fromkeys((r, gp) for r in relaxations for gp in providers))
    tasks = [
        BatchTask(
            instance_index=i_idx,
            relaxation=relaxation,
            provider=provider,
            adam=_adam_for(cfg, provider.kind),
            p=p,
            seeds=tuple(trial_seed(seed, i_idx, t_idx) for t_idx in range(trials_per_instance)),
            early_stop=early_stop,
        )
        for relaxation, provider in configurations
        for i_idx in range(len(models))
    ]
    logger.info(
        f"Running {len(tasks) * trials_per_instance} trials: {len(configurations)} configuration(s) x "
        f"{len(models)} instance(s) x {trials_per_instance} trial(s), jobs={jobs}"
    )

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(list(models),)) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        _init_worker(list(models))
        results = [_run_task(task) for task in tasks]

    grouped: Dict[ConfigKey, List[List[TrialResult]]] = {}
    for task, trials in zip(tasks, results):
        per_instance = grouped.setdefault((task.relaxation, task.provider), [[] for _ in models])
        per_instance[task.instance_index] = trials
    return grouped


def steps_by_provider(
    providers: Sequence[GradientProvider],
    cfg: AdamSettings
) -> Dict[GradientProvider, int]:
    """Step budget of every provider under the given ADAM settings"""
    return {gp: _adam_for(cfg, gp.kind).steps for gp in providers}


def success_matrix(results: List[List[TrialResult]], steps: int) -> np.ndarray:
    """
    Per-instance success rates by step

    Args:
        results: results[instance][trial]
        steps: Step budget

    Returns:
        Array of shape (instances, steps); column s-1 is the rate at step s
    """
    firsts = np.array(
        [[r.first_success_step if r.success else np.inf for r in trials] for trials in results],
        dtype=float,
    )
    step_axis = np.arange(1, steps + 1)
    return (firsts[:, :, None] <= step_axis).mean(axis=1)


def success_rate_table(
    grouped: Dict[ConfigKey, List[List[TrialResult]]],
    steps: Mapping[GradientProvider, int]
) -> pd.DataFrame:
    """
    Success rate per step and configuration: pooled over all trials, plus the
    median and interquartile range across instances

    Args:
        grouped: Output of run_batch_trials
        steps: Step budget per provider (see steps_by_provider)

    Returns:
        DataFrame with SUCCESS_COLUMNS
    """
    frames = []
    for (relaxation, provider), results in grouped.items():
        budget = steps[provider]
        rates = success_matrix(results, budget)
        q1, median, q3 = np.percentile(rates, [25, 50, 75], axis=0)
        frames.append(pd.DataFrame({
            'relaxation': relaxation.value,
            'gradient': provider.label,
            'step': np.arange(1, budget + 1),
            'pooled_rate': rates.mean(axis=0),
            'median_rate': median,
            'q1_rate': q1,
            'q3_rate': q3,
            'iqr': q3 - q1,
        }))
    if not frames:
        return pd.DataFrame(columns=SUCCESS_COLUMNS)
    return pd.concat(frames, ignore_index=True)[SUCCESS_COLUMNS]


def summarize_batch(grouped: Dict[ConfigKey, List[List[TrialResult]]]) -> List[Dict]:
    """
    Final success figures per configuration

    Args:
        grouped: Output of run_batch_trials

    Returns:
        List of dictionaries (one per configuration)
    """
    summary = []
    for (relaxation, provider), results in grouped.items():
        per_instance = np.array([np.mean([r.success for r in trials]) for trials in results])
        all_trials = [r for trials in results for r in trials]
        q1, median, q3 = np.percentile(per_instance, [25, 50, 75]) if per_instance.size else (0.0, 0.0, 0.0)
        summary.append({
            'relaxation': relaxation.value,
            'gradient': provider.label,
            'instances': len(results),
            'trials': len(all_trials),
            'pooled_rate': float(np.mean([r.success for r in all_trials])) if all_trials else 0.0,
            'median_rate': float(median),
            'q1_rate': float(q1),
            'q3_rate': float(q3),
            'iqr': float(q3 - q1),
            'aborted': sum(1 for r in all_trials if r.aborted),
        })
    return summary


def run_batch(
    models: Sequence[HyperIsingModel],
    relaxations: Sequence[Relaxation],
    providers: Sequence[GradientProvider],
    cfg: AdamSettings,
    trials_per_instance: int,
    seed: int,
    p: float = 1.0,
    jobs: int = 1,
    summary: Optional[List[Dict]] = None
) -> pd.DataFrame:
    """
    Success-rate-by-step table for a grid of configurations

    Args:
        models: Instances
        relaxations: Relaxation types
        providers: Gradient providers
        cfg: ADAM settings, or one per gradient kind
        trials_per_instance: Trials per (configuration, instance)
        seed: Master seed; output is deterministic given it
        p: Type II domain parameter
        jobs: Worker processes
        summary: Optional list that receives the final per-configuration summary

    Returns:
        DataFrame with SUCCESS_COLUMNS
    """
    grouped = run_batch_trials(models, relaxations, providers, cfg, trials_per_instance, seed, p, jobs)
    if summary is not None:
        summary.extend(summarize_batch(grouped))
    return success_rate_table(grouped, steps_by_provider(providers, cfg))

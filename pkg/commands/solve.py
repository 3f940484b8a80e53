"""
solve: run descent trials on a formula file and report the best outcome as JSON
"""
import argparse
import logging
from typing import Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from components.run_options import (
    add_adam_options,
    add_execution_options,
    add_gradient_options,
    add_relaxation_options,
    build_run_config,
)
from models.formula import HybridFormula, WeightRule
from models.ising import HyperIsingModel, Relaxation
from models.run_config import GradientKind, RunConfig, TrialResult
from models.validation import (
    MOREAU_SPIN_LIMIT,
    get_formula_report,
    moreau_cost,
    validate_formula,
    validate_run_config,
)
from modules.batch_runner import run_batch_trials
from modules.formula_io import FormulaParseError, read_formula
from modules.hamiltonian import edge_truths, ground_energy, relaxation_target, weak_convexity_report
from modules.model_builder import encoding_stats, to_model
from utils.constants import EXIT_ALL_FAILED, EXIT_INPUT_ERROR, EXIT_SUCCESS, SPIN_TRUE
from utils.exporters import export_to_json

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    parser = subparsers.add_parser('solve', help="Minimize a relaxation of a formula file")
    parser.add_argument('instance', help="Formula file ('p hybrid' format)")
    add_relaxation_options(parser)
    add_gradient_options(parser)
    add_adam_options(parser)
    add_execution_options(parser)
    parser.add_argument('--weights', choices=[w.value for w in WeightRule], default=WeightRule.ARITY.value,
                        help="Weight of constraints without an explicit 'w' (default: arity)")
    parser.add_argument('--early-stop', action='store_true', help="Stop each trial at its first success")
    parser.add_argument('--force', action='store_true', help="Allow Moreau runs on large instances")
    parser.add_argument('--all-trials', action='store_true', help="Include every trial in the JSON")
    parser.add_argument('-o', '--output', default=None, help="JSON output file (default: stdout)")
    parser.set_defaults(handler=run)
    return parser


def best_trial(results: List[TrialResult]) -> Optional[int]:
    """
    Index of the trial with the lowest final discrete energy (earliest on ties)

    Args:
        results: Trials of one configuration

    Returns:
        Trial index, or None when every trial was aborted
    """
    candidates = [i for i, r in enumerate(results) if not r.aborted]
    if not candidates:
        return None
    return min(candidates, key=lambda i: (results[i].final_hamiltonian, i))


def assignment_literals(assignment) -> List[int]:
    """Spin assignment as signed variables: +v when variable v is true"""
    return [v if s == SPIN_TRUE else -v for v, s in enumerate(assignment, start=1)]


def targets(m: HyperIsingModel, cfg: RunConfig) -> Dict[str, float]:
    """Certifying objective value; both the p-scaled and p = 1 forms for Type II when p != 1"""
    out = {'target': relaxation_target(m, cfg.relaxation, cfg.p)}
    if cfg.relaxation == Relaxation.TYPE_II and cfg.p != 1.0:
        out['target_p1'] = relaxation_target(m, cfg.relaxation, 1.0)
        logger.warning(
            f"p = {cfg.p}: Type II target is {out['target']:.6g} (p-scaled), "
            f"{out['target_p1']:.6g} with the p = 1 formula"
        )
    return out


def build_report(
    instance: str,
    formula: HybridFormula,
    m: HyperIsingModel,
    cfg: RunConfig,
    results: List[TrialResult],
    include_trials: bool = False
) -> Dict:
    """
    JSON payload of a solve run

    Args:
        instance: Input path as given
        formula: Parsed formula
        m: Compiled model
        cfg: Run configuration
        results: One result per trial
        include_trials: Add every TrialResult

    Returns:
        Dictionary ready for export_to_json
    """
    successes = [r for r in results if r.success]
    best = best_trial(results)
    first_steps = [r.first_success_step for r in successes]

    report = {
        'instance': instance,
        'num_variables': formula.n,
        'num_constraints': formula.num_constraints,
        'encoding': encoding_stats(formula).to_dict(),
        'relaxation': cfg.relaxation.value,
        'gradient': cfg.provider.label,
        'p': cfg.p,
        'seed': cfg.seed,
        'steps': cfg.adam.steps,
        'trials': len(results),
        'successes': len(successes),
        'aborted': sum(1 for r in results if r.aborted),
        'success_rate': len(successes) / len(results) if results else 0.0,
        'first_success_step': min(first_steps) if first_steps else None,
        'ground_energy': ground_energy(m),
        'targets': targets(m, cfg),
        'weak_convexity': weak_convexity_report(m, cfg.p),
        'best': None,
    }
    if best is not None:
        r = results[best]
        report['best'] = {
            'trial': best,
            'energy': r.final_hamiltonian,
            'relaxed_energy': r.final_energy,
            'satisfying': bool(np.all(edge_truths(m, r.final_assignment) == SPIN_TRUE)),
            'first_success_step': r.first_success_step,
            'assignment': list(r.final_assignment),
            'literals': assignment_literals(r.final_assignment),
        }
    if include_trials:
        report['trial_results'] = [r.to_dict() for r in results]
    return report


def run(args: argparse.Namespace) -> int:
    try:
        formula = read_formula(args.instance)
    except FormulaParseError as e:
        logger.error(f"{args.instance}: {e}")
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error(f"Cannot read {args.instance}: {e}")
        return EXIT_INPUT_ERROR

    is_valid, errors = validate_formula(formula)
    if not is_valid:
        for error in errors:
            logger.error(f"{args.instance}: {error}")
        return EXIT_INPUT_ERROR
    for issue in get_formula_report(formula)['issues']:
        logger.warning(f"{args.instance}: {issue}")

    try:
        cfg = build_run_config(args)
    except ValidationError as e:
        logger.error(f"Invalid run configuration: {e}")
        return EXIT_INPUT_ERROR

    m = to_model(formula, WeightRule(args.weights))
    is_valid, errors = validate_run_config(cfg, m.n, force=args.force)
    if not is_valid:
        for error in errors:
            logger.error(error)
        return EXIT_INPUT_ERROR
    if cfg.provider.kind == GradientKind.MOREAU:
        cost = moreau_cost(m.n, cfg.adam.steps, cfg.provider.moreau_params.samples)
        message = f"Moreau gradient: about {cost:,} spin evaluations per trial"
        if args.force and m.n > MOREAU_SPIN_LIMIT:
            logger.warning(f"{message} (size limit overridden with --force)")
        else:
            logger.info(message)

    grouped = run_batch_trials(
        [m], [cfg.relaxation], [cfg.provider], cfg.adam, cfg.trials, cfg.seed,
        p=cfg.p, jobs=cfg.jobs, early_stop=cfg.early_stop,
    )
    results = grouped[(cfg.relaxation, cfg.provider)][0]

    report = build_report(args.instance, formula, m, cfg, results, include_trials=args.all_trials)
    export_to_json(report, cfg.output_path)
    logger.info(f"{report['successes']}/{report['trials']} trial(s) succeeded")
    return EXIT_SUCCESS if report['successes'] > 0 else EXIT_ALL_FAILED

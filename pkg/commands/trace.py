"""
trace: record the descent trajectory of two coupled spins as CSV
"""
import argparse
import logging
from typing import List

import pandas as pd
from pydantic import ValidationError

from components.run_options import (
    add_adam_options,
    add_gradient_options,
    add_relaxation_options,
    build_adam,
    build_provider,
    parse_float_list,
    resolve_seed,
)
from models.constraint import Constraint, ConstraintKind
from models.formula import HybridFormula, WeightedConstraint, WeightRule
from models.ising import Relaxation
from models.run_config import TrajectoryPoint
from modules.estimators import DivergenceError
from modules.model_builder import to_model
from modules.optimizer import run_trial
from utils.constants import EXIT_ALL_FAILED, EXIT_INPUT_ERROR, EXIT_SUCCESS, TRACE_COLUMNS, TRACE_SCHEMA
from utils.exporters import export_to_csv
from utils.formatters import format_vector

logger = logging.getLogger(__name__)

TRACE_KINDS = {
    'xor': ConstraintKind.XOR,
    'card': ConstraintKind.CARD_GE,
    'clause': ConstraintKind.CLAUSE,
}


def add_parser(subparsers):
    parser = subparsers.add_parser('trace', help="Export the trajectory of a 2-variable constraint")
    parser.add_argument('--constraint', choices=list(TRACE_KINDS), default='xor',
                        help="Constraint over variables 1 and 2 (default: xor)")
    parser.add_argument('--threshold', type=int, default=1, help="K for --constraint card")
    parser.add_argument('--negate', type=str, default='', help="Positions to negate, e.g. '2' or '1,2'")
    parser.add_argument('--init', type=parse_float_list, default=None, metavar='A1,A2',
                        help="Start point (default: uniform draw from the relaxation's domain)")
    add_relaxation_options(parser)
    add_gradient_options(parser)
    add_adam_options(parser)
    parser.add_argument('--seed', type=int, default=None,
                        help="Seed for the start point and sampling estimators")
    parser.add_argument('-o', '--output', default=None, help="CSV output file (default: stdout)")
    parser.set_defaults(handler=run)
    return parser


def two_spin_formula(kind: ConstraintKind, negate: str, threshold: int) -> HybridFormula:
    """Single constraint over variables 1 and 2"""
    negated = {int(v) for v in negate.split(',') if v.strip()}
    literals = [-i if i in negated else i for i in (1, 2)]
    c = Constraint.from_dimacs(
        kind, literals, threshold=threshold if kind == ConstraintKind.CARD_GE else None
    )
    return HybridFormula(n=2, constraints=[WeightedConstraint(constraint=c)])


def trajectory_frame(trajectory: List[TrajectoryPoint]) -> pd.DataFrame:
    """One row per snapshot with TRACE_COLUMNS"""
    return pd.DataFrame({
        'step': [pt.step for pt in trajectory],
        'a1': [float(pt.state[0]) for pt in trajectory],
        'a2': [float(pt.state[1]) for pt in trajectory],
        'objective': [pt.energy for pt in trajectory],
        'grad1': [float(pt.gradient[0]) for pt in trajectory],
        'grad2': [float(pt.gradient[1]) for pt in trajectory],
    })


def run(args: argparse.Namespace) -> int:
    if args.init is not None and len(args.init) != 2:
        logger.error(f"--init needs two values (received {len(args.init)})")
        return EXIT_INPUT_ERROR

    try:
        formula = two_spin_formula(TRACE_KINDS[args.constraint], args.negate, args.threshold)
        provider = build_provider(args)
        adam = build_adam(args, provider.kind)
        relaxation = Relaxation(args.relaxation)
        m = to_model(formula, WeightRule.UNIT)
        seed = resolve_seed(args.seed)
        result = run_trial(
            m, relaxation, args.p, provider, adam, seed,
            record_trajectory=True, init=args.init,
        )
    except (ValidationError, ValueError) as e:
        logger.error(f"Invalid trace setup: {e}")
        return EXIT_INPUT_ERROR
    except DivergenceError as e:
        logger.error(f"Trajectory diverged: {e}")
        return EXIT_ALL_FAILED

    df = trajectory_frame(result.trajectory)
    export_to_csv(df, TRACE_SCHEMA, TRACE_COLUMNS, args.output)

    final = result.trajectory[-1]
    if result.success:
        logger.info(f"Satisfied at step {result.first_success_step}, final point {format_vector(final.state)}")
    else:
        logger.info(f"Never satisfied, final point {format_vector(final.state)}")
    return EXIT_SUCCESS

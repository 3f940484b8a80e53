"""
Shared command-line options: relaxation, gradient provider, ADAM settings,
trials, seeding and parallelism
"""
import argparse
import logging
import sys
from typing import List, Optional

import numpy as np

from models.ising import Relaxation
from models.run_config import AdamConfig, GradientKind, GradientProvider, MoreauParams, RunConfig
from modules.optimizer import default_adam_for
from utils.constants import (
    ADAM_BETA1,
    ADAM_BETA2,
    ADAM_EPSILON,
    DEFAULT_JOBS,
    DEFAULT_P,
    MOREAU_ALPHA,
    MOREAU_DELTA,
    MOREAU_SAMPLES,
    MOREAU_T,
    TWO_POINT_DELTA,
)

logger = logging.getLogger(__name__)

RELAXATION_CHOICES = [r.value for r in Relaxation]
GRADIENT_CHOICES = [k.value for k in GradientKind]


def add_relaxation_options(parser: argparse.ArgumentParser):
    parser.add_argument('--relaxation', choices=RELAXATION_CHOICES, default=Relaxation.TYPE_I.value,
                        help="Relaxation type (default: type1)")
    parser.add_argument('--p', type=float, default=DEFAULT_P,
                        help="Type II domain parameter, spins live in [-sqrt(p), sqrt(p)]")


def add_gradient_options(parser: argparse.ArgumentParser, single: bool = True):
    """
    Gradient provider options

    Args:
        parser: Parser or subparser
        single: Add --gradient for one provider; otherwise the caller adds a list option
    """
    if single:
        parser.add_argument('--gradient', choices=GRADIENT_CHOICES, default=GradientKind.EXACT.value,
                            help="Gradient provider (default: exact)")
    parser.add_argument('--two-point-delta', type=float, default=TWO_POINT_DELTA,
                        help="Forward-difference step")
    parser.add_argument('--moreau-t', type=float, default=MOREAU_T)
    parser.add_argument('--moreau-alpha', type=float, default=MOREAU_ALPHA)
    parser.add_argument('--moreau-delta', type=float, default=MOREAU_DELTA)
    parser.add_argument('--moreau-samples', type=int, default=MOREAU_SAMPLES,
                        help="Gaussian samples per Moreau gradient")


def add_adam_options(parser: argparse.ArgumentParser):
    parser.add_argument('--lr', type=float, default=None,
                        help="Learning rate (default: 0.05, or 1 for Moreau)")
    parser.add_argument('--beta1', type=float, default=ADAM_BETA1)
    parser.add_argument('--beta2', type=float, default=ADAM_BETA2)
    parser.add_argument('--epsilon', type=float, default=ADAM_EPSILON)
    parser.add_argument('--steps', type=int, default=None,
                        help="Step budget (default: 500, or 10000 for Moreau)")


def add_execution_options(parser: argparse.ArgumentParser, trials_default: int = 1):
    parser.add_argument('--trials', type=int, default=trials_default,
                        help="Independent random starts")
    parser.add_argument('--seed', type=int, default=None,
                        help="Master seed; drawn from OS entropy and reported when omitted")
    parser.add_argument('--jobs', type=int, default=DEFAULT_JOBS,
                        help="Worker processes (default from HOISING_JOBS)")


def parse_list(value: str) -> List[str]:
    """Split a comma-separated option value"""
    return [item.strip() for item in value.split(',') if item.strip()]


def parse_int_list(value: str) -> List[int]:
    try:
        return [int(item) for item in parse_list(value)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated integers (received '{value}')")


def parse_float_list(value: str) -> List[float]:
    try:
        return [float(item) for item in parse_list(value)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers (received '{value}')")


def resolve_seed(seed: Optional[int]) -> int:
    """
    Use the given seed, or draw one from OS entropy and report it on stderr

    Args:
        seed: Seed from the command line, or None

    Returns:
        Non-negative integer seed
    """
    if seed is not None:
        return seed
    drawn = int(np.random.SeedSequence().entropy)
    logger.info(f"No seed given, using {drawn}")
    print(f"seed: {drawn}", file=sys.stderr)
    return drawn


def build_provider(args: argparse.Namespace, kind: Optional[GradientKind] = None) -> GradientProvider:
    """Gradient provider from parsed options; kind overrides --gradient"""
    kind = kind or GradientKind(args.gradient)
    return GradientProvider(
        kind=kind,
        two_point_delta=args.two_point_delta,
        moreau_params=MoreauParams(
            t=args.moreau_t,
            alpha=args.moreau_alpha,
            delta=args.moreau_delta,
            samples=args.moreau_samples,
        ),
    )


def build_adam(args: argparse.Namespace, kind: GradientKind) -> AdamConfig:
    """
    ADAM settings for a gradient kind, with command-line overrides applied

    Args:
        args: Parsed options
        kind: Gradient kind (selects the lr / step defaults)

    Returns:
        AdamConfig
    """
    base = default_adam_for(kind, AdamConfig(beta1=args.beta1, beta2=args.beta2, epsilon=args.epsilon))
    updates = {}
    if args.lr is not None:
        updates['lr'] = args.lr
    if args.steps is not None:
        updates['steps'] = args.steps
    if not updates:
        return base
    return AdamConfig(**{**base.model_dump(), **updates})


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """
    RunConfig from the options added by the functions above

    Args:
        args: Parsed options

    Returns:
        RunConfig with a resolved seed
    """
    provider = build_provider(args)
    return RunConfig(
        relaxation=Relaxation(args.relaxation),
        p=args.p,
        provider=provider,
        adam=build_adam(args, provider.kind),
        trials=args.trials,
        seed=resolve_seed(args.seed),
        jobs=args.jobs,
        early_stop=getattr(args, 'early_stop', False),
        output_path=getattr(args, 'output', None),
    )

"""
bench: encoding statistics and success-rate experiments on generated PLE instances
"""
import argparse
import logging
from typing import Dict, List

import pandas as pd
from pydantic import ValidationError

from components.run_options import (
    GRADIENT_CHOICES,
    RELAXATION_CHOICES,
    add_adam_options,
    add_gradient_options,
    build_adam,
    build_provider,
    parse_int_list,
    parse_list,
    resolve_seed,
)
from models.formula import PleSpec, WeightRule
from models.ising import Relaxation
from models.run_config import GradientKind
from models.validation import moreau_cost
from modules.batch_runner import run_batch
from modules.model_builder import encoding_stats, to_model
from modules.ple_generator import generate_ple, generate_ple_batch
from utils.constants import (
    BENCH_COLUMNS,
    BENCH_INSTANCES,
    BENCH_TRIALS,
    DEFAULT_JOBS,
    DEFAULT_P,
    EXIT_INPUT_ERROR,
    EXIT_SUCCESS,
    MOREAU_MAX_N,
    PLE_SIZES,
    STATS_COLUMNS,
    STATS_SCHEMA,
    SUCCESS_SCHEMA,
)
from utils.exporters import export_to_csv, export_to_json
from utils.formatters import format_rate

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    parser = subparsers.add_parser('bench', help="Run PLE benchmarks or report encoding sizes")
    parser.add_argument('--stats', action='store_true', help="Report encoding sizes only")
    parser.add_argument('--n', type=parse_int_list, default=None, metavar='N1,N2,...',
                        help="Parity-bit counts (default: all configured sizes for --stats, 8 otherwise)")
    parser.add_argument('--instances', type=int, default=BENCH_INSTANCES, help="Instances per size")
    parser.add_argument('--trials', type=int, default=BENCH_TRIALS, help="Trials per instance and configuration")
    parser.add_argument('--relaxations', type=parse_list, default=RELAXATION_CHOICES,
                        help="Comma-separated relaxations (default: all)")
    parser.add_argument('--gradients', type=parse_list, default=[GradientKind.EXACT.value],
                        help="Comma-separated gradient providers (default: exact)")
    parser.add_argument('--p', type=float, default=DEFAULT_P, help="Type II domain parameter")
    add_gradient_options(parser, single=False)
    add_adam_options(parser)
    parser.add_argument('--seed', type=int, default=None, help="Master seed")
    parser.add_argument('--jobs', type=int, default=DEFAULT_JOBS, help="Worker processes (default from HOISING_JOBS)")
    parser.add_argument('--force', action='store_true',
                        help=f"Allow Moreau runs above n = {MOREAU_MAX_N}")
    parser.add_argument('-o', '--output', default=None, help="CSV output file (default: stdout)")
    parser.add_argument('--summary', default=None, help="JSON summary file (median and IQR across instances)")
    parser.set_defaults(handler=run)
    return parser


def stats_table(sizes: List[int], seed: int) -> pd.DataFrame:
    """
    Hybrid-encoding size of one generated instance per size

    Args:
        sizes: Parity-bit counts
        seed: Instance seed

    Returns:
        DataFrame with STATS_COLUMNS
    """
    rows = []
    for n in sizes:
        stats = encoding_stats(generate_ple(PleSpec(n_parity_bits=n, seed=seed)).formula)
        rows.append({'n': n, **stats.to_dict()})
    return pd.DataFrame(rows, columns=STATS_COLUMNS)


def _check_moreau(args: argparse.Namespace, sizes: List[int], kinds: List[GradientKind]) -> List[str]:
    """Errors for Moreau runs above the size limit; warnings with the cost when forced"""
    if GradientKind.MOREAU not in kinds:
        return []
    too_large = [n for n in sizes if n > MOREAU_MAX_N]
    if not too_large:
        return []
    steps = build_adam(args, GradientKind.MOREAU).steps
    costs = {
        n: moreau_cost(3 * n, steps, args.moreau_samples) * args.instances * args.trials
        for n in too_large
    }
    described = ", ".join(f"n={n}: ~{cost:,} spin evaluations" for n, cost in costs.items())
    if not args.force:
        return [
            f"Moreau benchmarking is limited to n <= {MOREAU_MAX_N} ({described} per relaxation); "
            f"pass --force to run anyway"
        ]
    logger.warning(f"Running Moreau above n = {MOREAU_MAX_N}: {described} per relaxation")
    return []


def success_grid(
    args: argparse.Namespace,
    sizes: List[int],
    relaxations: List[Relaxation],
    kinds: List[GradientKind],
    seed: int,
    summary: List[Dict]
) -> pd.DataFrame:
    """
    Success-rate-by-step table across sizes and configurations

    Args:
        args: Parsed options
        sizes: Parity-bit counts
        relaxations: Relaxation types
        kinds: Gradient providers
        seed: Master seed (instances and trials)
        summary: Receives one summary row per (n, configuration)

    Returns:
        DataFrame with BENCH_COLUMNS
    """
    providers = [build_provider(args, kind) for kind in kinds]
    adam = {kind: build_adam(args, kind) for kind in kinds}

    frames = []
    for n in sizes:
        instances = generate_ple_batch(n, args.instances, seed)
        models = [to_model(instance.formula, WeightRule.ARITY) for instance in instances]
        logger.info(f"n={n}: {len(models)} instance(s) with {models[0].n} spins each")

        per_size: List[Dict] = []
        df = run_batch(models, relaxations, providers, adam, args.trials, seed,
                       p=args.p, jobs=args.jobs, summary=per_size)
        df.insert(0, 'n', n)
        frames.append(df)
        for row in per_size:
            summary.append({'n': n, **row})
            logger.info(
                f"n={n} {row['relaxation']}/{row['gradient']}: pooled {format_rate(row['pooled_rate'])}, "
                f"median {format_rate(row['median_rate'])}, IQR {format_rate(row['iqr'])}"
            )
    return pd.concat(frames, ignore_index=True)[BENCH_COLUMNS]


def run(args: argparse.Namespace) -> int:
    sizes = args.n or (PLE_SIZES if args.stats else PLE_SIZES[:1])
    if any(n < 2 for n in sizes):
        logger.error(f"Sizes must be at least 2 (received {sizes})")
        return EXIT_INPUT_ERROR
    seed = resolve_seed(args.seed)

    if args.stats:
        df = stats_table(sizes, seed)
        export_to_csv(df, STATS_SCHEMA, STATS_COLUMNS, args.output)
        return EXIT_SUCCESS

    try:
        relaxations = [Relaxation(r) for r in args.relaxations]
        kinds = [GradientKind(k) for k in args.gradients]
    except ValueError as e:
        logger.error(f"{e}; choose from relaxations {RELAXATION_CHOICES} and gradients {GRADIENT_CHOICES}")
        return EXIT_INPUT_ERROR
    if args.instances < 1 or args.trials < 1:
        logger.error("--instances and --trials must be at least 1")
        return EXIT_INPUT_ERROR

    summary: List[Dict] = []
    try:
        errors = _check_moreau(args, sizes, kinds)
        if errors:
            for error in errors:
                logger.error(error)
            return EXIT_INPUT_ERROR
        df = success_grid(args, sizes, relaxations, kinds, seed, summary)
    except ValidationError as e:
        logger.error(f"Invalid benchmark configuration: {e}")
        return EXIT_INPUT_ERROR

    export_to_csv(df, SUCCESS_SCHEMA, BENCH_COLUMNS, args.output)
    if args.summary:
        export_to_json({
            'seed': seed,
            'sizes': sizes,
            'instances': args.instances,
            'trials': args.trials,
            'p': args.p,
            'configurations': summary,
        }, args.summary)
    return EXIT_SUCCESS

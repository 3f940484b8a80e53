"""
generate-ple: write parity-learning-with-error instances in the hybrid formula format
"""
import argparse
import logging
import os
import sys

from pydantic import ValidationError

from components.run_options import resolve_seed
from models.formula import PleInstance
from modules.formula_io import serialize, write_formula
from modules.ple_generator import generate_ple_batch
from utils.constants import (
    EXIT_INPUT_ERROR,
    EXIT_SUCCESS,
    PLE_ERROR_RATE,
    PLE_SUBSET_DENSITY,
    SPIN_TRUE,
)

logger = logging.getLogger(__name__)

INSTANCE_SUFFIX = '.hyb'
PLANTED_SUFFIX = '.sol'


def add_parser(subparsers):
    parser = subparsers.add_parser('generate-ple', help="Generate parity learning with error instances")
    parser.add_argument('--n', type=int, required=True, help="Parity bits")
    parser.add_argument('--m', type=int, default=None, help="Samples (default: 2n)")
    parser.add_argument('--error-rate', type=str, default=str(PLE_ERROR_RATE),
                        help="Fraction of flipped labels, e.g. 1/2 (default from config)")
    parser.add_argument('--density', type=float, default=PLE_SUBSET_DENSITY,
                        help="Inclusion probability of each parity bit in a sample")
    parser.add_argument('--count', type=int, default=1, help="Instances to generate")
    parser.add_argument('--seed', type=int, default=None, help="Master seed; instance k uses seed + k")
    parser.add_argument('--output-dir', default=None,
                        help="Directory for instance files (default: a single instance to stdout)")
    parser.add_argument('--planted', action='store_true',
                        help=f"Also write the planted assignment next to each instance ({PLANTED_SUFFIX})")
    parser.set_defaults(handler=run)
    return parser


def planted_text(instance: PleInstance) -> str:
    """Planted assignment as a 'v <literals> 0' line"""
    literals = [str(v if s == SPIN_TRUE else -v) for v, s in enumerate(instance.planted, start=1)]
    return "v " + " ".join(literals) + " 0\n"


def instance_name(instance: PleInstance) -> str:
    return f"ple_n{instance.spec.n_parity_bits}_s{instance.spec.seed}"


def run(args: argparse.Namespace) -> int:
    if args.count < 1:
        logger.error(f"--count must be at least 1 (received {args.count})")
        return EXIT_INPUT_ERROR
    if args.output_dir is None and args.count > 1:
        logger.error("--count above 1 needs --output-dir")
        return EXIT_INPUT_ERROR

    seed = resolve_seed(args.seed)
    try:
        instances = generate_ple_batch(
            args.n, args.count, seed,
            m=args.m, e=args.error_rate, subset_density=args.density,
        )
    except (ValidationError, ValueError) as e:
        logger.error(f"Invalid PLE parameters: {e}")
        return EXIT_INPUT_ERROR

    if args.output_dir is None:
        sys.stdout.write(serialize(instances[0].formula))
        return EXIT_SUCCESS

    os.makedirs(args.output_dir, exist_ok=True)
    for instance in instances:
        base = os.path.join(args.output_dir, instance_name(instance))
        write_formula(instance.formula, base + INSTANCE_SUFFIX)
        if args.planted:
            with open(base + PLANTED_SUFFIX, 'w', encoding='utf-8', newline='\n') as f:
                f.write(planted_text(instance))
    logger.info(f"Wrote {len(instances)} instance(s) to {args.output_dir}")
    return EXIT_SUCCESS

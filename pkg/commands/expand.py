"""
expand: print the Walsh-Fourier coefficients of one constraint
"""
import argparse
import logging
from fractions import Fraction

import pandas as pd
from pydantic import ValidationError

from models.constraint import Constraint, ConstraintKind
from modules.fourier import compile_general, symmetric_coefficients_exact
from utils.constants import EXIT_INPUT_ERROR, EXIT_SUCCESS
from utils.exporters import export_to_json
from utils.formatters import format_fraction, format_subset

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    parser = subparsers.add_parser('expand', help="Print the Fourier coefficients of a constraint")
    kind = parser.add_mutually_exclusive_group(required=True)
    kind.add_argument('--xor', action='store_true', help="Parity of the literals")
    kind.add_argument('--card', type=int, metavar='K', help="At least K literals true")
    kind.add_argument('--clause', action='store_true', help="Disjunction of the literals")
    parser.add_argument('--arity', type=int, required=True, help="Number of literals")
    parser.add_argument('--negate', type=str, default='',
                        help="Comma-separated 1-based positions whose literal is negated")
    parser.add_argument('--general', action='store_true',
                        help="Print subset-indexed coefficients instead of degree-indexed ones")
    parser.add_argument('--json', action='store_true', help="Emit JSON instead of a table")
    parser.set_defaults(handler=run)
    return parser


def build_constraint(args: argparse.Namespace) -> Constraint:
    """Constraint over variables 1..arity with the requested negations"""
    negated = {int(v) for v in args.negate.split(',') if v.strip()}
    outside = sorted(i for i in negated if not 1 <= i <= args.arity)
    if outside:
        raise ValueError(f"Negated positions {outside} are outside 1..{args.arity}")
    literals = [-i if i in negated else i for i in range(1, args.arity + 1)]
    if args.card is not None:
        return Constraint.from_dimacs(ConstraintKind.CARD_GE, literals, threshold=args.card)
    kind = ConstraintKind.XOR if args.xor else ConstraintKind.CLAUSE
    return Constraint.from_dimacs(kind, literals)


def _describe(c: Constraint) -> str:
    if c.kind == ConstraintKind.CARD_GE:
        return f"card>={c.threshold} over {c.arity} literals"
    return f"{c.kind.value} over {c.arity} literals"


def degree_table(c: Constraint) -> pd.DataFrame:
    """
    Degree-indexed coefficients of a symmetric constraint

    Args:
        c: Symmetric constraint (signs ignored)

    Returns:
        DataFrame with degree, exact and decimal columns
    """
    coeffs = symmetric_coefficients_exact(c)
    return pd.DataFrame({
        'degree': range(len(coeffs)),
        'exact': [format_fraction(v) for v in coeffs],
        'decimal': [float(v) for v in coeffs],
    })


def subset_table(c: Constraint) -> pd.DataFrame:
    """
    Nonzero subset-indexed coefficients, literal signs included

    Args:
        c: Any constraint

    Returns:
        DataFrame with subset, exact and decimal columns, ordered by bitmask
    """
    table = compile_general(c)
    rows = []
    for mask in sorted(table.subset_coeffs):
        # dyadic floats convert to Fraction exactly
        value = Fraction(table.subset_coeffs[mask])
        rows.append({
            'subset': format_subset(mask, c.arity),
            'exact': format_fraction(value),
            'decimal': float(value),
        })
    return pd.DataFrame(rows, columns=['subset', 'exact', 'decimal'])


def run(args: argparse.Namespace) -> int:
    try:
        c = build_constraint(args)
    except (ValidationError, ValueError) as e:
        logger.error(f"Invalid constraint: {e}")
        return EXIT_INPUT_ERROR

    general = args.general or any(s < 0 for s in c.signs)
    if general and not args.general:
        logger.info("Negated literals given, printing subset-indexed coefficients")
    try:
        df = subset_table(c) if general else degree_table(c)
    except ValueError as e:
        logger.error(str(e))
        return EXIT_INPUT_ERROR

    if args.json:
        export_to_json({
            'constraint': _describe(c),
            'variant': 'general' if general else 'symmetric',
            'coefficients': df.to_dict(orient='records'),
        })
    else:
        variant = "subset-indexed" if general else "degree-indexed"
        print(f"{_describe(c)} ({variant}, {len(df)} coefficients)")
        print(df.to_string(index=False))
    return EXIT_SUCCESS

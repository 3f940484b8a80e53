"""
Run validation and formula diagnostics
"""
from typing import Dict, List, Tuple

from models.constraint import ConstraintKind
from models.formula import HybridFormula
from models.run_config import GradientKind, RunConfig
from utils.constants import MOREAU_MAX_N, MOREAU_SAMPLES

# The Moreau size limit is stated in parity bits; PLE models have 3 spins per bit
MOREAU_SPIN_LIMIT = 3 * MOREAU_MAX_N


def validate_run_config(cfg: RunConfig, num_spins: int, force: bool = False) -> Tuple[bool, List[str]]:
    """
    Validate a run configuration against the instance it will solve

    Args:
        cfg: RunConfig
        num_spins: Spins in the model
        force: Allow Moreau runs beyond the default size limit

    Returns:
        Tuple of (is_valid, list_of_errors)
    """
    errors = []

    if cfg.provider.kind == GradientKind.MOREAU and not force:
        limit = MOREAU_SPIN_LIMIT
        if num_spins > limit:
            errors.append(
                f"Moreau gradient on {num_spins} spins exceeds the default limit of {limit} "
                f"(each step costs {cfg.provider.moreau_params.samples} objective evaluations); "
                f"pass --force to run anyway"
            )

    is_valid = len(errors) == 0
    return is_valid, errors


def validate_formula(f: HybridFormula) -> Tuple[bool, List[str]]:
    """
    Validate that a formula can be solved

    Args:
        f: HybridFormula

    Returns:
        Tuple of (is_valid, list_of_errors)
    """
    errors = []

    if f.n == 0:
        errors.append("Formula has no variables")
    if f.num_constraints == 0:
        errors.append("Formula has no constraints")

    is_valid = len(errors) == 0
    return is_valid, errors


def get_formula_report(f: HybridFormula) -> Dict:
    """
    Diagnostics for a formula before solving

    Args:
        f: HybridFormula

    Returns:
        Dictionary with counts and a list of notable issues
    """
    report = {
        'num_variables': f.n,
        'num_constraints': f.num_constraints,
        'kinds': {},
        'issues': [],
    }

    used = set()
    for item in f.constraints:
        c = item.constraint
        used.update(c.variables)
        report['kinds'][c.kind.value] = report['kinds'].get(c.kind.value, 0) + 1

    trivial = [
        idx for idx, item in enumerate(f.constraints)
        if item.constraint.kind == ConstraintKind.CARD_GE and item.constraint.threshold == 0
    ]
    if trivial:
        report['issues'].append(f"{len(trivial)} cardinality constraint(s) with threshold 0 are always true")

    unused = f.n - len(used)
    report['unused_variables'] = unused
    if unused > 0:
        report['issues'].append(f"{unused} variable(s) appear in no constraint")

    if f.num_constraints == 0:
        report['issues'].append("Formula has no constraints")

    return report


def moreau_cost(num_spins: int, steps: int, samples: int = MOREAU_SAMPLES) -> int:
    """Spin-updates a Moreau run evaluates: one n-spin objective per sample per step"""
    return steps * samples * max(num_spins, 1)

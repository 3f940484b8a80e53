"""
Parity learning with error (PLE) instance generation
"""
import logging
from typing import List

import numpy as np

from models.constraint import Constraint, ConstraintKind
from models.formula import HybridFormula, PleInstance, PleSpec, WeightedConstraint
from modules.fourier import evaluate_truth
from utils.constants import SPIN_FALSE, SPIN_TRUE

logger = logging.getLogger(__name__)


class PleGenerator:
    """
    Builds slack-augmented PLE formulas.

    Variables 1..n are parity bits, n+1..n+m are per-sample slacks. Sample j
    becomes XOR(x_A, y_j) with its observed label encoded by the sign of y_j,
    so y_j is true exactly when the sample equation is violated. One
    cardinality constraint over the negated slacks allows at most floor(e*m)
    violations.
    """

    def __init__(self, spec: PleSpec):
        self.spec = spec
        self.rng = np.random.default_rng(spec.seed)

    def generate(self) -> PleInstance:
        """
        Generate the formula and its planted assignment

        Returns:
            PleInstance; the planted assignment satisfies the formula
        """
        spec = self.spec
        n, m, flips = spec.n_parity_bits, spec.m, spec.num_flips

        secret = self.rng.random(n) < 0.5
        subsets = [self._draw_subset() for _ in range(m)]
        flipped = np.zeros(m, dtype=bool)
        flipped[self.rng.choice(m, size=flips, replace=False)] = True

        constraints = []
        for j, subset in enumerate(subsets):
            parity = bool(np.count_nonzero(secret[subset - 1]) % 2)
            label = parity ^ bool(flipped[j])
            slack = n + 1 + j
            literals = [int(i) for i in subset] + [slack if label else -slack]
            constraints.append(WeightedConstraint(
                constraint=Constraint.from_dimacs(ConstraintKind.XOR, literals)
            ))

        cardinality = Constraint.from_dimacs(
            ConstraintKind.CARD_GE,
            [-(n + 1 + j) for j in range(m)],
            threshold=m - flips,
        )
        constraints.append(WeightedConstraint(constraint=cardinality))

        formula = HybridFormula(
            n=n + m,
            constraints=constraints,
            comments=self._header_comments(),
        )

        planted = tuple(
            [SPIN_TRUE if s else SPIN_FALSE for s in secret]
            + [SPIN_TRUE if f else SPIN_FALSE for f in flipped]
        )
        instance = PleInstance(
            spec=spec,
            formula=formula,
            planted=planted,
            flipped=tuple(int(j) + 1 for j in np.flatnonzero(flipped)),
        )
        self._self_test(instance)
        logger.debug(f"Generated PLE instance n={n} m={m} seed={spec.seed}")
        return instance

    def _draw_subset(self) -> np.ndarray:
        # Independent inclusion per parity bit, redrawn when empty
        while True:
            mask = self.rng.random(self.spec.n_parity_bits) < self.spec.subset_density
            if mask.any():
                return np.flatnonzero(mask) + 1

    def _header_comments(self) -> List[str]:
        spec = self.spec
        return [
            f"parity learning with error n={spec.n_parity_bits} m={spec.m} e={spec.e} flips={spec.num_flips}",
            f"seed={spec.seed} subset_density={spec.subset_density:g}",
        ]

    @staticmethod
    def _self_test(instance: PleInstance):
        planted = np.asarray(instance.planted)
        for idx, item in enumerate(instance.formula.constraints):
            c = item.constraint
            if evaluate_truth(c, planted[np.asarray(c.variables) - 1]) != SPIN_TRUE:
                raise RuntimeError(f"Planted assignment violates generated constraint {idx}")


def generate_ple(spec: PleSpec) -> PleInstance:
    """Generate one PLE instance (formula plus planted assignment)"""
    return PleGenerator(spec).generate()


def generate_ple_batch(n_parity_bits: int, count: int, seed: int, **kwargs) -> List[PleInstance]:
    """
    Generate several instances, instance k seeded with seed + k

    Args:
        n_parity_bits: Parity bits per instance
        count: Number of instances
        seed: Master seed
        **kwargs: Extra PleSpec fields (m, e, subset_density)

    Returns:
        List of PleInstance
    """
    return [
        generate_ple(PleSpec(n_parity_bits=n_parity_bits, seed=seed + k, **kwargs))
        for k in range(count)
    ]

"""
Formula -> higher-order Ising model, and encoding size statistics
"""
import logging
from collections import Counter
from typing import Dict

from pydantic import BaseModel, ConfigDict

from models.formula import HybridFormula, WeightRule
from models.ising import HyperEdge, HyperIsingModel
from modules.fourier import compile_constraint, compile_general

logger = logging.getLogger(__name__)


class EncodingStats(BaseModel):
    """Size of the hybrid encoding: spins, hyperedges, arities, Fourier terms"""
    model_config = ConfigDict(frozen=True)

    num_spins: int
    num_edges: int
    arity_histogram: Dict[int, int]
    fourier_terms: int

    @property
    def max_arity(self) -> int:
        return max(self.arity_histogram) if self.arity_histogram else 0

    def to_dict(self) -> dict:
        return {
            'num_spins': self.num_spins,
            'num_edges': self.num_edges,
            'arity_histogram': {str(k): v for k, v in sorted(self.arity_histogram.items())},
            'fourier_terms': self.fourier_terms,
            'max_arity': self.max_arity,
        }


def default_weight(arity: int, rule: WeightRule) -> float:
    """w_e = |e| under ARITY, 1 under UNIT"""
    return float(arity) if rule == WeightRule.ARITY else 1.0


def to_model(f: HybridFormula, default_weight_rule: WeightRule = WeightRule.ARITY) -> HyperIsingModel:
    """
    Compile every constraint into a weighted hyperedge

    Args:
        f: HybridFormula
        default_weight_rule: Weight for constraints without an explicit one

    Returns:
        HyperIsingModel over f.n spins
    """
    edges = []
    for item in f.constraints:
        c = item.constraint
        weight = item.weight if item.weight is not None else default_weight(c.arity, default_weight_rule)
        edges.append(HyperEdge(
            vars=c.variables,
            signs=c.signs,
            table=compile_constraint(c),
            weight=weight,
            constraint=c,
        ))
    logger.debug(f"Built model with {f.n} spins and {len(edges)} hyperedges")
    return HyperIsingModel(n=f.n, edges=edges)


def encoding_stats(f: HybridFormula) -> EncodingStats:
    """
    Hybrid-encoding size of a formula

    Args:
        f: HybridFormula

    Returns:
        EncodingStats (|V|, |E|, arity histogram, stored Fourier terms)
    """
    arities = Counter(item.constraint.arity for item in f.constraints)
    terms = 0
    for item in f.constraints:
        c = item.constraint
        # symmetric tables store one coefficient per degree
        terms += c.arity + 1 if c.is_symmetric else compile_general(c.folded()).num_terms()
    return EncodingStats(
        num_spins=f.n,
        num_edges=f.num_constraints,
        arity_histogram=dict(sorted(arities.items())),
        fourier_terms=terms,
    )

"""
Higher-order Ising model and continuous spin state
"""
from enum import Enum
from functools import cached_property
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.constraint import Constraint, FourierTable

# Slack allowed when checking box domains after float clamping
DOMAIN_TOLERANCE = 1e-12


class Relaxation(str, Enum):
    """Continuous relaxations of the +/-1 spin domain"""
    TYPE_I = "type1"      # hypercube [-1, 1]^n
    TYPE_II = "type2"     # quartic intrinsic locking on [-sqrt(p), sqrt(p)]^n
    TYPE_III = "type3"    # sinusoidal injection locking on R^n


class HyperEdge(BaseModel):
    """
    One weighted hyperedge: a compiled constraint over a few spins
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vars: Tuple[int, ...] = Field(..., min_length=1, description="1-based variable indices")
    signs: Tuple[int, ...]
    table: FourierTable
    weight: float = Field(..., gt=0)
    constraint: Constraint

    @model_validator(mode='after')
    def validate_edge(self):
        """Variables distinct, one sign per variable, table arity matches"""
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"Hyperedge repeats a variable: {self.vars}")
        if len(self.signs) != len(self.vars):
            raise ValueError("Hyperedge needs one sign per variable")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("Hyperedge signs must be +1 or -1")
        if self.table.arity != len(self.vars):
            raise ValueError(f"Table arity {self.table.arity} does not match {len(self.vars)} variables")
        return self

    @property
    def arity(self) -> int:
        return len(self.vars)

    @cached_property
    def index(self) -> np.ndarray:
        """0-based positions into the global spin vector"""
        return np.asarray(self.vars, dtype=np.intp) - 1

    @cached_property
    def sign_vector(self) -> np.ndarray:
        return np.asarray(self.signs, dtype=float)


class HyperIsingModel(BaseModel):
    """
    Weighted hypergraph of +/-1 spins
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=0, description="Number of spins")
    edges: List[HyperEdge] = Field(default_factory=list)

    @model_validator(mode='after')
    def validate_vars(self):
        """Every edge variable must be one of the n spins"""
        for idx, edge in enumerate(self.edges):
            if max(edge.vars) > self.n:
                raise ValueError(f"Edge {idx} references variable {max(edge.vars)} but n = {self.n}")
        return self

    @property
    def total_weight(self) -> float:
        return float(sum(edge.weight for edge in self.edges))


class SpinState(BaseModel):
    """
    Real-valued spins together with the relaxation they live in
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: np.ndarray
    relaxation: Relaxation
    p: float = Field(default=1.0, gt=0)

    @field_validator('a', mode='before')
    @classmethod
    def as_float_vector(cls, v):
        """Coerce to a 1-D float array"""
        arr = np.array(v, dtype=float)
        if arr.ndim != 1:
            raise ValueError(f"Spin state must be a vector (received shape {arr.shape})")
        return arr

    @model_validator(mode='after')
    def validate_domain(self):
        """Type I and II states must stay inside their boxes"""
        bound = domain_bound(self.relaxation, self.p)
        if bound is not None and self.a.size and np.max(np.abs(self.a)) > bound + DOMAIN_TOLERANCE:
            raise ValueError(
                f"State outside the {self.relaxation.value} domain [-{bound:g}, {bound:g}] "
                f"(max |a_i| = {np.max(np.abs(self.a)):g})"
            )
        return self

    @property
    def n(self) -> int:
        return int(self.a.size)


def domain_bound(relaxation: Relaxation, p: float = 1.0):
    """
    Half-width of the box domain for a relaxation

    Args:
        relaxation: Relaxation type
        p: Type II domain parameter

    Returns:
        1.0 for Type I, sqrt(p) for Type II, None for the unconstrained Type III
    """
    if relaxation == Relaxation.TYPE_I:
        return 1.0
    if relaxation == Relaxation.TYPE_II:
        return float(np.sqrt(p))
    return None

"""
Hybrid SAT formula and parity-learning instance specification
"""
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.constraint import Constraint
from utils.constants import PLE_ERROR_RATE, PLE_SUBSET_DENSITY


class WeightRule(str, Enum):
    """How hyperedge weights are chosen when the formula gives none"""
    UNIT = "unit"
    ARITY = "arity"


class WeightedConstraint(BaseModel):
    model_config = ConfigDict(frozen=True)

    constraint: Constraint
    weight: Optional[float] = Field(default=None, gt=0)


class HybridFormula(BaseModel):
    """
    Conjunction of hybrid constraints over variables 1..n
    """
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0)
    constraints: List[WeightedConstraint] = Field(default_factory=list)
    comments: List[str] = Field(default_factory=list)

    @model_validator(mode='after')
    def validate_vars(self):
        """All literals must reference variables <= n"""
        for idx, item in enumerate(self.constraints):
            top = max(item.constraint.variables)
            if top > self.n:
                raise ValueError(f"Constraint {idx} references variable {top} but n = {self.n}")
        return self

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)


class PleSpec(BaseModel):
    """
    Parity learning with error instance parameters.

    Defaults reproduce the benchmark: m = 2n samples, error rate 1/2,
    so exactly n sample labels are flipped.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_parity_bits: int = Field(..., ge=2)
    m: Optional[int] = Field(default=None, ge=1)
    e: Fraction = PLE_ERROR_RATE
    subset_density: float = Field(default=PLE_SUBSET_DENSITY, gt=0, le=1)
    seed: int = Field(..., ge=0)

    @field_validator('e', mode='before')
    @classmethod
    def as_fraction(cls, v):
        """Accept '1/2', 0.5 or Fraction"""
        value = Fraction(str(v)) if not isinstance(v, Fraction) else v
        if not 0 <= value < 1:
            raise ValueError(f"Error rate must be in [0, 1) (received {value})")
        return value

    @model_validator(mode='after')
    def default_samples(self):
        if self.m is None:
            self.__dict__['m'] = 2 * self.n_parity_bits
        return self

    @property
    def num_flips(self) -> int:
        """floor(e * m) labels are flipped"""
        return int(self.e * self.m)


class PleInstance(BaseModel):
    """Generated formula together with the planted satisfying assignment"""
    model_config = ConfigDict(frozen=True)

    spec: PleSpec
    formula: HybridFormula
    planted: Tuple[int, ...]
    flipped: Tuple[int, ...]

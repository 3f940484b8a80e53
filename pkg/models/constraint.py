"""
Hybrid Boolean constraint models and their compiled Fourier tables
"""
from enum import Enum
from functools import cached_property
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from utils.constants import TRUTH_TABLE_MAX_ARITY


class ConstraintKind(str, Enum):
    """Supported hybrid constraint kinds"""
    XOR = "xor"
    CARD_GE = "card"
    CLAUSE = "cnf"
    TRUTH_TABLE = "table"


SYMMETRIC_KINDS = (ConstraintKind.XOR, ConstraintKind.CARD_GE, ConstraintKind.CLAUSE)


class Literal(BaseModel):
    """
    One occurrence of a variable inside a constraint
    """
    model_config = ConfigDict(frozen=True)

    var: int = Field(..., ge=1, description="Variable index (1-based)")
    sign: int = Field(default=1, description="-1 for a negated occurrence")

    @field_validator('sign')
    @classmethod
    def validate_sign(cls, v):
        """Sign must be +1 or -1"""
        if v not in (-1, 1):
            raise ValueError(f"Literal sign must be +1 or -1 (received {v})")
        return v

    @classmethod
    def from_dimacs(cls, value: int) -> "Literal":
        """Build from a signed integer such as -3"""
        if value == 0:
            raise ValueError("Literal 0 is the line terminator, not a variable")
        return cls(var=abs(value), sign=1 if value > 0 else -1)

    def to_dimacs(self) -> int:
        return self.sign * self.var


class Constraint(BaseModel):
    """
    Hybrid Boolean constraint over +/-1 variables (-1 is true)
    """
    model_config = ConfigDict(frozen=True)

    kind: ConstraintKind
    literals: Tuple[Literal, ...] = Field(..., min_length=1)
    threshold: Optional[int] = Field(default=None, description="CARD_GE only")
    table: Optional[Tuple[int, ...]] = Field(default=None, description="TRUTH_TABLE only")

    @model_validator(mode='after')
    def validate_shape(self):
        """Check distinct variables and the kind-specific fields"""
        variables = [lit.var for lit in self.literals]
        if len(set(variables)) != len(variables):
            raise ValueError(f"Constraint repeats a variable: {variables}")

        d = len(self.literals)

        if self.kind == ConstraintKind.CARD_GE:
            if self.threshold is None:
                raise ValueError("Cardinality constraint needs a threshold")
            if not 0 <= self.threshold <= d:
                raise ValueError(f"Threshold must be within 0..{d} (received {self.threshold})")
        elif self.threshold is not None:
            raise ValueError(f"Threshold is only allowed for cardinality constraints (kind {self.kind.value})")

        if self.kind == ConstraintKind.TRUTH_TABLE:
            if self.table is None:
                raise ValueError("Truth-table constraint needs a table")
            if d > TRUTH_TABLE_MAX_ARITY:
                raise ValueError(f"Truth-table arity {d} exceeds cap {TRUTH_TABLE_MAX_ARITY}")
            if len(self.table) != 2 ** d:
                raise ValueError(f"Truth table must have {2 ** d} entries (received {len(self.table)})")
            if any(v not in (-1, 1) for v in self.table):
                raise ValueError("Truth-table entries must be +1 or -1")
        elif self.table is not None:
            raise ValueError(f"Table is only allowed for truth-table constraints (kind {self.kind.value})")

        return self

    @classmethod
    def from_dimacs(
        cls,
        kind: ConstraintKind,
        literals: Sequence[int],
        threshold: Optional[int] = None,
        table: Optional[Sequence[int]] = None
    ) -> "Constraint":
        """
        Build a constraint from signed integer literals

        Args:
            kind: Constraint kind
            literals: Signed variable indices, e.g. [1, -2, 3]
            threshold: Cardinality bound (CARD_GE only)
            table: Truth table (TRUTH_TABLE only)

        Returns:
            Validated Constraint
        """
        return cls(
            kind=kind,
            literals=tuple(Literal.from_dimacs(v) for v in literals),
            threshold=threshold,
            table=None if table is None else tuple(int(v) for v in table),
        )

    @property
    def arity(self) -> int:
        return len(self.literals)

    @property
    def variables(self) -> Tuple[int, ...]:
        return tuple(lit.var for lit in self.literals)

    @property
    def signs(self) -> Tuple[int, ...]:
        return tuple(lit.sign for lit in self.literals)

    @property
    def is_symmetric(self) -> bool:
        return self.kind in SYMMETRIC_KINDS

    def folded(self) -> "Constraint":
        """Same constraint with every literal made positive"""
        return self.model_copy(
            update={'literals': tuple(Literal(var=lit.var) for lit in self.literals)}
        )

    def canonical(self) -> "Constraint":
        """Literals ascending by variable (symmetric kinds only; tables keep their order)"""
        if not self.is_symmetric:
            return self
        return self.model_copy(
            update={'literals': tuple(sorted(self.literals, key=lambda lit: lit.var))}
        )


class TableVariant(str, Enum):
    SYMMETRIC = "symmetric"
    GENERAL = "general"


class FourierTable(BaseModel):
    """
    Walsh-Fourier coefficients of one hyperedge function.

    SYMMETRIC tables hold one coefficient per degree k = 0..d.
    GENERAL tables map a subset bitmask (bit i = position i) to its coefficient;
    zero coefficients are dropped.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    variant: TableVariant
    arity: int = Field(..., ge=1)
    degree_coeffs: Optional[np.ndarray] = None
    subset_coeffs: Optional[Dict[int, float]] = None

    @model_validator(mode='after')
    def validate_coeffs(self):
        """Coefficients must match the variant and the arity"""
        if self.variant == TableVariant.SYMMETRIC:
            if self.degree_coeffs is None or self.subset_coeffs is not None:
                raise ValueError("Symmetric table needs degree coefficients only")
            coeffs = np.array(self.degree_coeffs, dtype=float)
            if coeffs.shape != (self.arity + 1,):
                raise ValueError(
                    f"Symmetric table of arity {self.arity} needs {self.arity + 1} coefficients "
                    f"(received shape {coeffs.shape})"
                )
            coeffs.setflags(write=False)
            self.__dict__['degree_coeffs'] = coeffs
        else:
            if self.subset_coeffs is None or self.degree_coeffs is not None:
                raise ValueError("General table needs subset coefficients only")
            limit = 1 << self.arity
            bad = [mask for mask in self.subset_coeffs if not 0 <= mask < limit]
            if bad:
                raise ValueError(f"Subset masks {bad} do not fit in {self.arity} bits")
        return self

    @property
    def is_symmetric(self) -> bool:
        return self.variant == TableVariant.SYMMETRIC

    @cached_property
    def dense(self) -> np.ndarray:
        """All 2^d subset coefficients (GENERAL tables), indexed by bitmask"""
        dense = np.zeros(1 << self.arity)
        for mask, value in (self.subset_coeffs or {}).items():
            dense[mask] = value
        dense.setflags(write=False)
        return dense

    @cached_property
    def dense_partials(self) -> np.ndarray:
        """Row j holds the subset coefficients of the partial derivative along position j"""
        size = 1 << self.arity
        masks = np.arange(size)
        partials = np.zeros((self.arity, size))
        for j in range(self.arity):
            bit = 1 << j
            without = (masks & bit) == 0
            partials[j, without] = self.dense[masks[without] | bit]
        partials.setflags(write=False)
        return partials

    def num_terms(self) -> int:
        """Size of the stored representation"""
        if self.is_symmetric:
            return self.arity + 1
        return len(self.subset_coeffs)

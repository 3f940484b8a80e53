"""
Optimizer, gradient provider and run configuration models
"""
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.ising import Relaxation
from utils.constants import (
    ADAM_BETA1,
    ADAM_BETA2,
    ADAM_EPSILON,
    ADAM_LR,
    ADAM_STEPS,
    DEFAULT_JOBS,
    DEFAULT_P,
    MOREAU_ALPHA,
    MOREAU_DELTA,
    MOREAU_SAMPLES,
    MOREAU_T,
    TWO_POINT_DELTA,
)


class AdamConfig(BaseModel):
    """
    ADAM hyperparameters (defaults: lr 0.05, beta1 0.9, beta2 0.999)
    """
    model_config = ConfigDict(frozen=True)

    lr: float = Field(default=ADAM_LR, gt=0)
    beta1: float = Field(default=ADAM_BETA1, ge=0, lt=1)
    beta2: float = Field(default=ADAM_BETA2, ge=0, lt=1)
    epsilon: float = Field(default=ADAM_EPSILON, gt=0)
    steps: int = Field(default=ADAM_STEPS, ge=1)


class GradientKind(str, Enum):
    EXACT = "exact"
    TWO_POINT = "two-point"
    MOREAU = "moreau"


class MoreauParams(BaseModel):
    """Sampling parameters of the Moreau-envelope gradient"""
    model_config = ConfigDict(frozen=True)

    t: float = Field(default=MOREAU_T, gt=0)
    alpha: float = Field(default=MOREAU_ALPHA, gt=0)
    delta: float = Field(default=MOREAU_DELTA, gt=0)
    samples: int = Field(default=MOREAU_SAMPLES, ge=2)

    @property
    def variance(self) -> float:
        """Per-coordinate variance of the Gaussian proposal"""
        return self.delta * self.t / self.alpha


class GradientProvider(BaseModel):
    """
    Selects how the gradient of the relaxed objective is obtained
    """
    model_config = ConfigDict(frozen=True)

    kind: GradientKind = GradientKind.EXACT
    two_point_delta: float = Field(default=TWO_POINT_DELTA, gt=0)
    moreau_params: MoreauParams = Field(default_factory=MoreauParams)

    @property
    def label(self) -> str:
        """Kind name, followed by any setting of that kind that differs from its default"""
        changed = []
        if self.kind == GradientKind.TWO_POINT and self.two_point_delta != TWO_POINT_DELTA:
            changed.append(f"delta={self.two_point_delta:g}")
        if self.kind == GradientKind.MOREAU:
            defaults = MoreauParams()
            for name in MoreauParams.model_fields:
                value = getattr(self.moreau_params, name)
                if value != getattr(defaults, name):
                    changed.append(f"{name}={value:g}")
        if not changed:
            return self.kind.value
        return f"{self.kind.value}({' '.join(changed)})"


class RunConfig(BaseModel):
    """
    Everything a solve/bench run needs besides the instances themselves
    """
    model_config = ConfigDict(frozen=True)

    relaxation: Relaxation = Relaxation.TYPE_I
    p: float = Field(default=DEFAULT_P, gt=0)
    provider: GradientProvider = Field(default_factory=GradientProvider)
    adam: AdamConfig = Field(default_factory=AdamConfig)
    trials: int = Field(default=1, ge=1)
    seed: int = Field(..., ge=0)
    jobs: int = Field(default=DEFAULT_JOBS, ge=1)
    early_stop: bool = False
    output_path: Optional[str] = None


class TrajectoryPoint(BaseModel):
    """Snapshot of one step: state, objective and the gradient taken there"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    step: int = Field(..., ge=0)
    state: np.ndarray
    energy: float
    gradient: np.ndarray


class TrialResult(BaseModel):
    """
    Summary of one descent trajectory
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    success: bool
    first_success_step: Optional[int] = None
    # energies are None for aborted trials
    final_energy: Optional[float] = None
    final_hamiltonian: Optional[float] = None
    final_assignment: Tuple[int, ...]
    steps_run: int = Field(..., ge=0)
    trajectory: Optional[List[TrajectoryPoint]] = None
    diagnostic: Optional[str] = None

    @model_validator(mode='after')
    def validate_success(self):
        """success holds exactly when a first success step was recorded"""
        if self.success != (self.first_success_step is not None):
            raise ValueError("success must be True exactly when first_success_step is set")
        return self

    @property
    def aborted(self) -> bool:
        return self.diagnostic is not None

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON output"""
        return {
            'success': self.success,
            'first_success_step': self.first_success_step,
            'final_energy': self.final_energy,
            'final_hamiltonian': self.final_hamiltonian,
            'final_assignment': list(self.final_assignment),
            'steps_run': self.steps_run,
            'diagnostic': self.diagnostic,
        }
